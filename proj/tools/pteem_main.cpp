// Command-line harness around the population samplers.
//
// Subcommands: mixture2d, galaxy, tfbs (the three studies), diagnose (re-read
// a finished run directory and judge its ring repartition), budget (print
// move-budget figures).  Exit codes: 0 success, 2 configuration error,
// 3 runtime error.

#include "CLI11.hpp"

#include "pteem/config.hpp"
#include "pteem/csv.hpp"
#include "pteem/errors.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace fs = std::filesystem;
using namespace pteem;

namespace {

// ---------------------------------------------------------------------------
// Small helpers.

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string join_reals(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt_real(v[i]);
    }
    return out;
}

void ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw run_error("cannot create output directory: " + p.string());
}

fs::path run_dir(const fs::path& base, int run) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%03d", run + 1);
    return base / buf;
}

// key=value manifest; the wall-time line goes last so determinism checks can
// strip it by prefix.
struct Manifest {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(std::string key, std::string value) {
        entries.emplace_back(std::move(key), std::move(value));
    }
    void add_int(std::string key, long long v) { add(std::move(key), fmt_int(v)); }
    void add_real(std::string key, double v) { add(std::move(key), fmt_real(v)); }

    void write(const fs::path& path, double wall_seconds) const {
        std::ofstream out(path);
        if (!out) throw run_error("cannot write manifest: " + path.string());
        out << "# run manifest\n";
        for (const auto& [k, v] : entries) out << k << "=" << v << "\n";
        out << "wall_time_seconds=" << fmt_real(wall_seconds) << "\n";
        if (!out) throw run_error("failed writing manifest: " + path.string());
    }
};

void add_budget(Manifest& m, Algorithm alg, long long burnin, long long ring_init, long long kept,
                int chains, double p_ee) {
    const MoveBudget b = move_budget(alg, burnin, ring_init, kept, chains, p_ee);
    m.add_real("budget_local", b.local);
    m.add_real("budget_global", b.global);
    if (alg == Algorithm::ees) {
        const MoveBudget e = move_budget_ees_example(burnin, ring_init, kept, chains, p_ee);
        m.add_real("budget_local_example", e.local);
        m.add_real("budget_global_example", e.global);
    }
}

fs::path output_dir(const Settings& s, const std::string& subcommand) {
    if (s.has("out")) return fs::path(s.get_string("out", ""));
    if (const char* env = std::getenv("PTEEM_OUT"); env && *env)
        return fs::path(env) / subcommand;
    return fs::path("out") / subcommand;
}

// Flag values collected as strings so files and flags share one validation
// path; only flags the user actually passed land in the bag.
using FlagBag = std::map<std::string, std::string>;

void add_setting_option(CLI::App* cmd, FlagBag& bag, const std::string& flag,
                        const std::string& key, const std::string& desc) {
    cmd->add_option_function<std::string>(
        flag, [&bag, key](const std::string& v) { bag[key] = v; }, desc);
}

Settings build_settings(const std::string& section, const std::string& config_path,
                        const FlagBag& bag) {
    Settings s;
    if (!config_path.empty()) apply_ini(s, load_ini(config_path), section);
    for (const auto& [k, v] : bag) s.set(k, v);
    return s;
}

void warn_chain_count(int n_chains, int n_rings) {
    if (auto w = chain_count_warning(n_chains, n_rings)) std::cerr << "note: " << *w << "\n";
}

// ---------------------------------------------------------------------------
// mixture2d.

struct Vec2Codec {
    std::vector<std::string> header() const { return {"x1", "x2"}; }
    std::vector<std::string> row(const mix2d::Vec2& x) const {
        return {fmt_real(x[0]), fmt_real(x[1])};
    }
};

void write_mixture_summary(const fs::path& dir, const mix2d::MixtureSummary& s) {
    CsvTable per;
    per.header = {"run",   "visited_modes", "ex1",
                  "ex2",   "ex1sq",         "ex2sq",
                  "local_acceptance", "exchange_acceptance"};
    for (std::size_t i = 0; i < s.runs.size(); ++i) {
        const auto& r = s.runs[i];
        per.rows.push_back({fmt_int(static_cast<long long>(i) + 1), fmt_int(r.visited_modes),
                            fmt_real(r.moments.ex1), fmt_real(r.moments.ex2),
                            fmt_real(r.moments.ex1sq), fmt_real(r.moments.ex2sq),
                            fmt_real(r.local_acceptance), fmt_real(r.exchange_acceptance)});
    }
    write_csv((dir / "summary.csv").string(), per);

    CsvTable pooled;
    pooled.header = {"mean_visited", "sd_visited", "mean_ex1",   "sd_ex1",
                     "mean_ex2",     "sd_ex2",     "mean_ex1sq", "sd_ex1sq",
                     "mean_ex2sq",   "sd_ex2sq",   "mean_local_acceptance",
                     "mean_exchange_acceptance"};
    pooled.rows.push_back(
        {fmt_real(s.mean_visited), fmt_real(s.sd_visited), fmt_real(s.mean_moments.ex1),
         fmt_real(s.sd_moments.ex1), fmt_real(s.mean_moments.ex2), fmt_real(s.sd_moments.ex2),
         fmt_real(s.mean_moments.ex1sq), fmt_real(s.sd_moments.ex1sq),
         fmt_real(s.mean_moments.ex2sq), fmt_real(s.sd_moments.ex2sq),
         fmt_real(s.mean_local_acceptance), fmt_real(s.mean_exchange_acceptance)});
    write_csv((dir / "pooled.csv").string(), pooled);

    CsvTable errs;
    errs.header = {"mode", "err_median", "err_max"};
    for (std::size_t i = 0; i < s.err_median.size(); ++i)
        errs.rows.push_back({fmt_int(static_cast<long long>(i) + 1), fmt_real(s.err_median[i]),
                             fmt_real(s.err_max[i])});
    write_csv((dir / "errmodes.csv").string(), errs);
}

int cmd_mixture(const Settings& s) {
    const MixtureInvocation inv = mixture_invocation_from(s);
    const fs::path out = output_dir(s, "mixture2d");
    std::map<Algorithm, mix2d::MixtureSummary> summaries;

    for (Algorithm alg : inv.algorithms) {
        mix2d::MixtureConfig cfg = inv.config;
        cfg.algorithm = alg;
        const fs::path adir = out / algorithm_name(alg);
        ensure_dir(adir);
        const EnergyLadder levels = mix2d::default_energy_levels(cfg.unequal);
        const TemperatureLadder ladder = mix2d::default_temperatures(alg, cfg.unequal);
        if (alg == Algorithm::pteem) warn_chain_count(ladder.size(), levels.rings());

        Timer run_timer;
        auto sink = [&](int run, const Trace<mix2d::Vec2>& trace) {
            const fs::path rdir = run_dir(adir, run);
            ensure_dir(rdir);
            write_samples_csv((rdir / "samples.csv").string(), trace, Vec2Codec{});
            if (!trace.scatter_chains.empty())
                write_scatter_csv((rdir / "scatter.csv").string(), trace, Vec2Codec{});
            if (!trace.rings_record.empty())
                write_rings_csv((rdir / "rings.csv").string(), trace);
            write_occupancy_csv((rdir / "occupancy.csv").string(), levels,
                                trace_occupancy(trace));
            write_events_csv((rdir / "events.csv").string(), trace.events);
            write_exchange_matrix_csv((rdir / "exchange_matrix.csv").string(),
                                      exchange_matrix(trace));

            Manifest m;
            m.add("command", "mixture2d");
            m.add("algorithm", algorithm_name(alg));
            m.add("unequal", cfg.unequal ? "true" : "false");
            m.add_int("runs", cfg.runs);
            m.add_int("burnin", cfg.burnin);
            m.add_int("samples", cfg.kept);
            m.add_int("ring_init", cfg.ring_init);
            m.add_real("p_ee", cfg.p_ee);
            m.add("seed", fmt_int(static_cast<long long>(cfg.seed)));
            m.add_int("run_index", run + 1);
            m.add("run_seed", fmt_int(static_cast<long long>(derive_run_seed(cfg.seed, run))));
            m.add_int("chains", ladder.size());
            m.add("temperatures", join_reals(ladder.temperatures));
            m.add("energy_levels", join_reals(levels.levels));
            add_budget(m, alg, cfg.burnin, cfg.ring_init, cfg.kept, ladder.size(), cfg.p_ee);
            m.write(rdir / "manifest.txt", run_timer.seconds());
            run_timer = Timer{};
        };

        const mix2d::MixtureSummary summary = mix2d::run_mixture_experiment(cfg, sink);
        write_mixture_summary(adir, summary);
        std::printf("[mixture2d/%s] runs=%d visited=%.4g ex1=%.5g ex2=%.5g ex1sq=%.5g "
                    "ex2sq=%.5g local_acc=%.4g exch_acc=%.4g\n",
                    algorithm_name(alg), cfg.runs, summary.mean_visited,
                    summary.mean_moments.ex1, summary.mean_moments.ex2,
                    summary.mean_moments.ex1sq, summary.mean_moments.ex2sq,
                    summary.mean_local_acceptance, summary.mean_exchange_acceptance);
        summaries.emplace(alg, summary);
    }

    if (summaries.size() > 1 && summaries.count(Algorithm::pteem)) {
        CsvTable csv;
        csv.header = {"mode", "numerator", "denominator", "ratio_median", "ratio_max"};
        const auto& den = summaries.at(Algorithm::pteem);
        for (Algorithm alg : {Algorithm::pt, Algorithm::ees}) {
            if (!summaries.count(alg)) continue;
            for (const auto& row : mix2d::err_ratio_table(summaries.at(alg), den))
                csv.rows.push_back({fmt_int(row.mode), algorithm_name(alg), "pteem",
                                    fmt_real(row.ratio_median), fmt_real(row.ratio_max)});
        }
        write_csv((out / "ratios.csv").string(), csv);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// galaxy.

struct GalaxyCodec {
    int k;
    std::vector<std::string> header() const {
        std::vector<std::string> h;
        for (int p = 1; p <= k; ++p) h.push_back("mu" + std::to_string(p));
        for (int p = 1; p <= k; ++p) h.push_back("prec" + std::to_string(p));
        for (int p = 1; p <= k; ++p) h.push_back("w" + std::to_string(p));
        h.push_back("beta");
        h.push_back("label_mode");
        return h;
    }
    std::vector<std::string> row(const galaxy::MixtureParamState& x) const {
        std::vector<std::string> r;
        for (double v : x.mu) r.push_back(fmt_real(v));
        for (double v : x.prec) r.push_back(fmt_real(v));
        for (double v : x.w) r.push_back(fmt_real(v));
        r.push_back(fmt_real(x.beta));
        r.push_back(fmt_int(galaxy::label_mode_of(x.mu)));
        return r;
    }
};

int cmd_galaxy(const Settings& s) {
    const galaxy::GalaxyConfig cfg = galaxy_config_from(s);
    const fs::path out = output_dir(s, "galaxy") / algorithm_name(cfg.algorithm);
    ensure_dir(out);
    const EnergyLadder levels = galaxy::default_energy_levels();
    const TemperatureLadder ladder = galaxy::default_temperatures();
    if (cfg.algorithm == Algorithm::pteem) warn_chain_count(ladder.size(), levels.rings());

    Timer run_timer;
    auto sink = [&](int run, const Trace<galaxy::MixtureParamState>& trace) {
        const fs::path rdir = run_dir(out, run);
        ensure_dir(rdir);
        write_samples_csv((rdir / "samples.csv").string(), trace, GalaxyCodec{cfg.hyper.k});
        if (!trace.rings_record.empty()) write_rings_csv((rdir / "rings.csv").string(), trace);
        write_occupancy_csv((rdir / "occupancy.csv").string(), levels, trace_occupancy(trace));
        write_events_csv((rdir / "events.csv").string(), trace.events);
        write_exchange_matrix_csv((rdir / "exchange_matrix.csv").string(),
                                  exchange_matrix(trace));

        Manifest m;
        m.add("command", "galaxy");
        m.add("algorithm", algorithm_name(cfg.algorithm));
        m.add("data", cfg.data_path);
        m.add_int("runs", cfg.runs);
        m.add_int("burnin", cfg.burnin);
        m.add_int("samples", cfg.kept);
        m.add("seed", fmt_int(static_cast<long long>(cfg.seed)));
        m.add_int("run_index", run + 1);
        m.add("run_seed", fmt_int(static_cast<long long>(derive_run_seed(cfg.seed, run))));
        m.add_int("components", cfg.hyper.k);
        m.add_int("chains", ladder.size());
        m.add("temperatures", join_reals(ladder.temperatures));
        m.add("energy_levels", join_reals(levels.levels));
        add_budget(m, cfg.algorithm, cfg.burnin, 0, cfg.kept, ladder.size(), 0.0);
        m.write(rdir / "manifest.txt", run_timer.seconds());
        run_timer = Timer{};
    };

    const galaxy::GalaxySummary summary = galaxy::run_galaxy_experiment(cfg, sink);

    CsvTable per;
    per.header = {"run", "visited_label_modes", "mean_mode_err", "exchange_acceptance"};
    for (std::size_t i = 0; i < summary.runs.size(); ++i) {
        const auto& r = summary.runs[i];
        per.rows.push_back({fmt_int(static_cast<long long>(i) + 1),
                            fmt_int(r.visited_label_modes), fmt_real(r.mean_mode_err),
                            fmt_real(r.exchange_acceptance)});
    }
    write_csv((out / "summary.csv").string(), per);

    CsvTable pooled;
    pooled.header = {"mean_visited", "sd_visited", "mean_exchange_acceptance"};
    pooled.rows.push_back({fmt_real(summary.mean_visited), fmt_real(summary.sd_visited),
                           fmt_real(summary.mean_exchange_acceptance)});
    write_csv((out / "pooled.csv").string(), pooled);

    std::printf("[galaxy/%s] runs=%d label_modes=%.5g exch_acc=%.4g\n",
                algorithm_name(cfg.algorithm), cfg.runs, summary.mean_visited,
                summary.mean_exchange_acceptance);
    return 0;
}

// ---------------------------------------------------------------------------
// tfbs.

void write_allocation_samples(const fs::path& path, const Trace<tfbs::Allocation>& trace) {
    CsvTable csv;
    csv.header = {"iteration", "n_sites", "sites"};
    for (std::size_t t = 0; t < trace.samples.size(); ++t) {
        const auto& a = trace.samples[t];
        std::string sites;
        for (std::size_t i = 0; i < a.active.size(); ++i) {
            if (!a.active[i]) continue;
            if (!sites.empty()) sites += " ";
            sites += fmt_int(static_cast<long long>(i));
        }
        csv.rows.push_back({fmt_int(trace.burnin + static_cast<long long>(t)),
                            fmt_int(a.count), sites});
    }
    write_csv(path.string(), csv);
}

int cmd_tfbs(const Settings& s) {
    const tfbs::TfbsConfig cfg = tfbs_config_from(s);
    const fs::path out = output_dir(s, "tfbs") / algorithm_name(cfg.algorithm);
    ensure_dir(out);

    const bool ring_driven = cfg.algorithm == Algorithm::pteem;
    const EnergyLadder levels =
        ring_driven ? tfbs::default_pteem_levels() : tfbs::default_ees_levels();
    const std::vector<double> temperatures = ring_driven
                                                 ? tfbs::default_pteem_temperatures().temperatures
                                                 : tfbs::default_ees_temperatures();
    const int chains = static_cast<int>(temperatures.size());
    if (ring_driven) warn_chain_count(chains, levels.rings());

    Timer run_timer;
    auto sink = [&](int run, const tfbs::TfbsModel& model, const tfbs::Dataset& data,
                    const Trace<tfbs::Allocation>& trace) {
        const fs::path rdir = run_dir(out, run);
        ensure_dir(rdir);
        tfbs::write_sequences((rdir / "sequences.fasta").string(), data.sequences);

        CsvTable sites;
        sites.header = {"site", "sequence", "offset", "position"};
        for (std::size_t i = 0; i < data.true_sites.size(); ++i) {
            const auto& [sq, off] = data.true_sites[i];
            sites.rows.push_back({fmt_int(static_cast<long long>(i) + 1), fmt_int(sq + 1),
                                  fmt_int(off), fmt_int(model.long_index(sq, off))});
        }
        write_csv((rdir / "sites.csv").string(), sites);

        const std::vector<double> probs = tfbs::site_probabilities(model, trace.samples);
        CsvTable post;
        post.header = {"position", "sequence", "offset", "probability"};
        for (int i = 0; i < model.n_positions(); ++i) {
            const auto [sq, off] = model.position(i);
            post.rows.push_back(
                {fmt_int(i), fmt_int(sq + 1), fmt_int(off), fmt_real(probs[i])});
        }
        write_csv((rdir / "posterior.csv").string(), post);

        write_allocation_samples(rdir / "samples.csv", trace);
        if (!trace.rings_record.empty()) write_rings_csv((rdir / "rings.csv").string(), trace);
        write_occupancy_csv((rdir / "occupancy.csv").string(), levels, trace_occupancy(trace));
        write_events_csv((rdir / "events.csv").string(), trace.events);
        write_exchange_matrix_csv((rdir / "exchange_matrix.csv").string(),
                                  exchange_matrix(trace));

        Manifest m;
        m.add("command", "tfbs");
        m.add("algorithm", algorithm_name(cfg.algorithm));
        m.add_int("runs", cfg.runs);
        m.add_int("burnin", cfg.burnin);
        m.add_int("samples", cfg.kept);
        m.add_int("ring_init", cfg.ring_init);
        m.add_real("p_ee", cfg.p_ee);
        m.add("seed", fmt_int(static_cast<long long>(cfg.seed)));
        m.add_int("run_index", run + 1);
        m.add("run_seed", fmt_int(static_cast<long long>(derive_run_seed(cfg.seed, run))));
        m.add_int("chains", chains);
        m.add("temperatures", join_reals(temperatures));
        m.add("energy_levels", join_reals(levels.levels));
        m.add_int("n_sequences", cfg.generation.n_sequences);
        m.add_int("background_length", cfg.generation.background_length);
        m.add_int("sites_per_sequence", cfg.generation.sites_per_sequence);
        m.add_int("motif_width", cfg.generation.motif.width());
        add_budget(m, cfg.algorithm, cfg.burnin, cfg.ring_init, cfg.kept, chains, cfg.p_ee);
        m.write(rdir / "manifest.txt", run_timer.seconds());
        run_timer = Timer{};
    };

    const tfbs::TfbsSummary summary = tfbs::run_tfbs_experiment(cfg, sink);

    CsvTable per;
    per.header = {"run", "n_sites", "detected_window", "detected_exact", "exchange_acceptance"};
    for (std::size_t i = 0; i < summary.runs.size(); ++i) {
        const auto& r = summary.runs[i];
        per.rows.push_back({fmt_int(static_cast<long long>(i) + 1), fmt_int(r.detection.n_sites),
                            fmt_int(r.detection.detected_window),
                            fmt_int(r.detection.detected_exact),
                            fmt_real(r.exchange_acceptance)});
    }
    write_csv((out / "summary.csv").string(), per);

    CsvTable pooled;
    pooled.header = {"mean_detected_window", "mean_detected_exact", "mean_exchange_acceptance"};
    pooled.rows.push_back({fmt_real(summary.mean_detected_window),
                           fmt_real(summary.mean_detected_exact),
                           fmt_real(summary.mean_exchange_acceptance)});
    write_csv((out / "pooled.csv").string(), pooled);

    std::printf("[tfbs/%s] runs=%d detected_window=%.4g detected_exact=%.4g exch_acc=%.4g\n",
                algorithm_name(cfg.algorithm), cfg.runs, summary.mean_detected_window,
                summary.mean_detected_exact, summary.mean_exchange_acceptance);
    return 0;
}

// ---------------------------------------------------------------------------
// diagnose.

int cmd_diagnose(const std::string& dir) {
    const fs::path d(dir);
    std::vector<std::vector<long long>> table;
    int n_chains = 0;
    if (fs::exists(d / "rings.csv")) {
        const auto record = read_rings_csv((d / "rings.csv").string(), &n_chains);
        int n_rings = 0;
        for (const auto& row : record)
            for (int r : row) n_rings = std::max(n_rings, r);
        table = occupancy_table(record, n_chains, n_rings);
    } else if (fs::exists(d / "occupancy.csv")) {
        table = read_occupancy_csv((d / "occupancy.csv").string());
        n_chains = static_cast<int>(table.size());
    } else {
        throw run_error("no rings.csv or occupancy.csv under " + dir);
    }
    const int n_rings = table.empty() ? 0 : static_cast<int>(table.front().size());
    std::printf("occupancy table: %d chains x %d rings\n", n_chains, n_rings);
    if (auto w = chain_count_warning(n_chains, n_rings)) std::printf("note: %s\n", w->c_str());

    const RepartitionDiagnosis diag = check_repartition(table);
    if (diag.ok) {
        std::printf("ring repartition: OK (every adjacent chain pair shares a ring)\n");
    } else {
        for (const auto& f : diag.findings) {
            if (f.gap)
                std::printf("ring repartition: energy gap between chains %d and %d "
                            "(no shared ring)\n",
                            f.chain_low, f.chain_low + 1);
            else
                std::printf("ring repartition: low overlap %.3g%% between chains %d and %d\n",
                            100.0 * f.overlap, f.chain_low, f.chain_low + 1);
        }
    }

    if (fs::exists(d / "events.csv")) {
        const auto events = read_events_csv((d / "events.csv").string());
        long long proposed = 0, accepted = 0, skipped = 0;
        for (const auto& e : events) {
            if (!e.proposed) {
                ++skipped;
                continue;
            }
            ++proposed;
            if (e.accepted) ++accepted;
        }
        const double rate = proposed ? static_cast<double>(accepted) / proposed : 0.0;
        std::printf("exchange log: %lld proposed, %lld accepted (rate %.4g), %lld skipped "
                    "(all iterations including warm-up)\n",
                    proposed, accepted, rate, skipped);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// budget.

struct BudgetArgs {
    std::string algorithm = "pteem";
    int chains = 20;
    long long burnin = 2500;
    long long samples = 2500;
    long long ring_init = 500;
    double p_ee = 0.1;
};

int cmd_budget(const BudgetArgs& args) {
    const Algorithm alg = parse_algorithm(args.algorithm);
    const MoveBudget b =
        move_budget(alg, args.burnin, args.ring_init, args.samples, args.chains, args.p_ee);
    std::printf("algorithm=%s chains=%d burnin=%lld samples=%lld", algorithm_name(alg),
                args.chains, args.burnin, args.samples);
    if (alg == Algorithm::ees)
        std::printf(" ring_init=%lld p_ee=%g", args.ring_init, args.p_ee);
    std::printf("\nlocal_moves=%.10g\nglobal_moves=%.10g\n", b.local, b.global);
    if (alg == Algorithm::ees) {
        const MoveBudget e =
            move_budget_ees_example(args.burnin, args.ring_init, args.samples, args.chains,
                                    args.p_ee);
        std::printf("local_moves_example=%.10g\nglobal_moves_example=%.10g\n", e.local, e.global);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Population MCMC harness (parallel tempering, ring-driven exchange, "
                 "equi-energy sampling)"};
    app.require_subcommand(1);

    // mixture2d
    auto* mix = app.add_subcommand("mixture2d", "20-mode Gaussian mixture benchmark");
    std::string mix_config;
    FlagBag mix_bag;
    mix->add_option("--config", mix_config, "INI settings file");
    add_setting_option(mix, mix_bag, "--algorithm", "algorithm", "pt, pteem, ees or all");
    add_setting_option(mix, mix_bag, "--runs", "runs", "independent repetitions");
    add_setting_option(mix, mix_bag, "--burnin", "burnin", "burn-in iterations");
    add_setting_option(mix, mix_bag, "--samples", "samples", "kept iterations");
    add_setting_option(mix, mix_bag, "--ring-init", "ring_init",
                       "ring warm-up iterations (equi-energy sampler)");
    add_setting_option(mix, mix_bag, "--p-ee", "p_ee", "equi-energy jump probability");
    add_setting_option(mix, mix_bag, "--seed", "seed", "base seed");
    add_setting_option(mix, mix_bag, "--threads", "threads", "local-phase threads");
    add_setting_option(mix, mix_bag, "--out", "out", "output directory");
    mix->add_flag_callback(
        "--unequal", [&mix_bag] { mix_bag["unequal"] = "true"; },
        "unequal component variances");

    // galaxy
    auto* gal = app.add_subcommand("galaxy", "velocity-mixture label-mode benchmark");
    std::string gal_config;
    FlagBag gal_bag;
    gal->add_option("--config", gal_config, "INI settings file");
    add_setting_option(gal, gal_bag, "--algorithm", "algorithm", "pt or pteem");
    add_setting_option(gal, gal_bag, "--runs", "runs", "independent repetitions");
    add_setting_option(gal, gal_bag, "--burnin", "burnin", "burn-in iterations");
    add_setting_option(gal, gal_bag, "--samples", "samples", "kept iterations");
    add_setting_option(gal, gal_bag, "--seed", "seed", "base seed");
    add_setting_option(gal, gal_bag, "--threads", "threads", "local-phase threads");
    add_setting_option(gal, gal_bag, "--data", "data", "velocity data file");
    add_setting_option(gal, gal_bag, "--out", "out", "output directory");

    // tfbs
    auto* tf = app.add_subcommand("tfbs", "motif-discovery benchmark on synthetic sequences");
    std::string tf_config;
    FlagBag tf_bag;
    tf->add_option("--config", tf_config, "INI settings file");
    add_setting_option(tf, tf_bag, "--algorithm", "algorithm", "pteem or ees");
    add_setting_option(tf, tf_bag, "--runs", "runs", "independent repetitions");
    add_setting_option(tf, tf_bag, "--burnin", "burnin", "burn-in iterations");
    add_setting_option(tf, tf_bag, "--samples", "samples", "kept iterations");
    add_setting_option(tf, tf_bag, "--ring-init", "ring_init",
                       "ring warm-up iterations (equi-energy sampler)");
    add_setting_option(tf, tf_bag, "--p-ee", "p_ee", "equi-energy jump probability");
    add_setting_option(tf, tf_bag, "--seed", "seed", "base seed");
    add_setting_option(tf, tf_bag, "--threads", "threads", "local-phase threads");
    add_setting_option(tf, tf_bag, "--out", "out", "output directory");

    // diagnose
    auto* diag = app.add_subcommand("diagnose", "judge the ring repartition of a run directory");
    std::string diag_dir;
    diag->add_option("dir", diag_dir, "run directory holding rings.csv/occupancy.csv")
        ->required();

    // budget
    auto* bud = app.add_subcommand("budget", "print local/global move budgets");
    BudgetArgs budget_args;
    bud->add_option("--algorithm", budget_args.algorithm, "pt, pteem or ees")
        ->capture_default_str();
    bud->add_option("--chains", budget_args.chains, "chain count")->capture_default_str();
    bud->add_option("--burnin", budget_args.burnin, "burn-in iterations")->capture_default_str();
    bud->add_option("--samples", budget_args.samples, "kept iterations")->capture_default_str();
    bud->add_option("--ring-init", budget_args.ring_init, "ring warm-up iterations")
        ->capture_default_str();
    bud->add_option("--p-ee", budget_args.p_ee, "equi-energy jump probability")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (mix->parsed()) return cmd_mixture(build_settings("mixture2d", mix_config, mix_bag));
        if (gal->parsed()) return cmd_galaxy(build_settings("galaxy", gal_config, gal_bag));
        if (tf->parsed()) return cmd_tfbs(build_settings("tfbs", tf_config, tf_bag));
        if (diag->parsed()) return cmd_diagnose(diag_dir);
        if (bud->parsed()) return cmd_budget(budget_args);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const run_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
