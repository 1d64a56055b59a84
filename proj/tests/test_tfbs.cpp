#include "doctest.h"

#include "pteem/tfbs.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

using namespace pteem;
using namespace pteem::tfbs;

namespace {

// Small generated instance shared by several tests.
Dataset small_dataset(int n_seq = 2, int bg_len = 40, int sites = 1, std::uint64_t seed = 71) {
    GenerationConfig config;
    config.n_sequences = n_seq;
    config.background_length = bg_len;
    config.sites_per_sequence = sites;
    RngStream rng(seed, kDataStream);
    return generate_dataset(config, rng);
}

TfbsModel small_model(const Dataset& data, int width = 12) {
    return TfbsModel(data.sequences, width, default_background(), TfbsPriors{});
}

// One-sequence instance small enough to enumerate exactly.
TfbsModel tiny_model(std::uint64_t seed = 5) {
    GenerationConfig config;
    config.n_sequences = 1;
    config.background_length = 10;
    config.sites_per_sequence = 0;
    RngStream rng(seed, kDataStream);
    Dataset data = generate_dataset(config, rng);
    TfbsPriors priors;
    priors.a = 2.0;
    priors.b = 10.0;
    return TfbsModel(data.sequences, 3, default_background(), priors);
}

std::uint32_t mask_of(const Allocation& a) {
    std::uint32_t m = 0;
    for (std::size_t i = 0; i < a.active.size(); ++i)
        if (a.active[i]) m |= 1u << i;
    return m;
}

// independent-set count on a line with minimum spacing w
long long spaced_subsets(int n, int w) {
    if (n <= 0) return 1;
    return spaced_subsets(n - 1, w) + spaced_subsets(n - w, w);
}

} // namespace

TEST_CASE("base coding and sequence round trips") {
    CHECK(base_index('A') == 0);
    CHECK(base_index('c') == 1);
    CHECK(base_index('G') == 2);
    CHECK(base_index('t') == 3);
    CHECK_THROWS_AS((void)base_index('N'), config_error);
    Sequence s{0, 1, 2, 3};
    CHECK(sequence_string(s) == "ACGT");
}

TEST_CASE("default background and motif are proper distributions") {
    auto bg = default_background();
    for (int f = 0; f < 4; ++f) {
        double row = 0.0;
        for (int t = 0; t < 4; ++t) row += bg.trans[f][t];
        CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(bg.trans[f][f] == 0.64);
    }
    // uniform law is stationary for the symmetric transition matrix
    for (int t = 0; t < 4; ++t) {
        double mass = 0.0;
        for (int f = 0; f < 4; ++f) mass += bg.stationary[f] * bg.trans[f][t];
        CHECK(mass == doctest::Approx(0.25).epsilon(1e-12));
    }
    auto motif = default_motif();
    REQUIRE(motif.width() == 12);
    for (const auto& col : motif.cols) {
        double total = 0.0;
        for (double v : col) total += v;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("dataset generation splices the planted sites") {
    GenerationConfig config; // defaults: 10 sequences, 200 + 2 x 12
    RngStream rng(123, kDataStream);
    Dataset data = generate_dataset(config, rng);
    REQUIRE(data.sequences.size() == 10);
    for (const auto& s : data.sequences) CHECK(s.size() == 224);
    REQUIRE(data.true_sites.size() == 20);
    // planted sites never overlap (offsets ascending per sequence by splicing)
    for (std::size_t i = 0; i + 1 < data.true_sites.size(); ++i) {
        auto [s1, o1] = data.true_sites[i];
        auto [s2, o2] = data.true_sites[i + 1];
        if (s1 == s2) CHECK(o2 - o1 >= 12);
    }
    TfbsModel model(data.sequences, 12, default_background(), TfbsPriors{});
    CHECK(model.n_positions() == 2130);
}

TEST_CASE("fasta and plain-line parsing") {
    {
        std::istringstream in(">one\nACGT\nacg\n>two\nTTTT\n");
        auto seqs = parse_sequences(in);
        REQUIRE(seqs.size() == 2);
        CHECK(sequence_string(seqs[0]) == "ACGTACG");
        CHECK(sequence_string(seqs[1]) == "TTTT");
    }
    {
        std::istringstream in("acgt\nACGA\n");
        auto seqs = parse_sequences(in);
        REQUIRE(seqs.size() == 2);
        CHECK(sequence_string(seqs[0]) == "ACGT");
    }
    {
        std::istringstream in("ACGT\n>late\nAC\n");
        CHECK_THROWS_AS((void)parse_sequences(in), config_error);
    }
    {
        std::istringstream in("ACNT\n");
        CHECK_THROWS_AS((void)parse_sequences(in), config_error);
    }
    {
        std::istringstream in("");
        CHECK_THROWS_AS((void)parse_sequences(in), config_error);
    }

    auto data = small_dataset();
    auto path = std::filesystem::temp_directory_path() / "pteem_test_seqs.fasta";
    write_sequences(path.string(), data.sequences);
    auto back = load_sequences(path.string());
    CHECK(back == data.sequences);
    std::filesystem::remove(path);
}

TEST_CASE("model construction guards") {
    auto data = small_dataset();
    CHECK_THROWS_AS(TfbsModel({Sequence{0, 1}}, 12, default_background(), TfbsPriors{}),
                    config_error);
    TfbsPriors bad;
    bad.a = 0.0;
    CHECK_THROWS_AS(TfbsModel(data.sequences, 12, default_background(), bad), config_error);
    CHECK_THROWS_AS(TfbsModel({Sequence{0, 9, 1}}, 2, default_background(), TfbsPriors{}),
                    config_error);
    BackgroundModel zero = default_background();
    zero.trans[0][1] = 0.0;
    zero.trans[0][0] = 0.76;
    CHECK_THROWS_AS(TfbsModel(data.sequences, 12, zero, TfbsPriors{}), config_error);
}

TEST_CASE("long index layout and background window probabilities") {
    auto data = small_dataset();
    auto model = small_model(data);
    int expected = 0;
    for (std::size_t s = 0; s < data.sequences.size(); ++s)
        expected += static_cast<int>(data.sequences[s].size()) - 12 + 1;
    CHECK(model.n_positions() == expected);
    // position <-> long index round trip
    for (int i = 0; i < model.n_positions(); ++i) {
        auto [s, o] = model.position(i);
        CHECK(model.long_index(s, o) == i);
    }
    // explicit background probability of one interior and one leading window
    const auto& bg = default_background();
    for (int i : {0, model.long_index(1, 5)}) {
        auto [s, o] = model.position(i);
        const auto& seq = data.sequences[s];
        double lb = o == 0 ? std::log(bg.stationary[seq[0]])
                           : std::log(bg.trans[seq[o - 1]][seq[o]]);
        for (int t = 1; t < 12; ++t) lb += std::log(bg.trans[seq[o + t - 1]][seq[o + t]]);
        CHECK(model.log_bg(i) == doctest::Approx(lb).epsilon(1e-13));
    }
    CHECK_THROWS_AS((void)model.long_index(0, 100000), run_error);
}

TEST_CASE("set_site maintains the sufficient statistics incrementally") {
    auto data = small_dataset();
    auto model = small_model(data);
    Allocation a = model.empty_allocation();
    model.set_site(a, 3, true);
    model.set_site(a, 40, true);
    CHECK(a.count == 2);
    CHECK_THROWS_AS(model.set_site(a, 3, true), run_error); // no-op flip
    model.set_site(a, 3, false);
    CHECK(a.count == 1);
    auto rebuilt = model.allocation_from_flags(a.active);
    CHECK(rebuilt.count == a.count);
    CHECK(rebuilt.sum_log_bg == doctest::Approx(a.sum_log_bg).epsilon(1e-12));
    CHECK(rebuilt.col_counts == a.col_counts);
}

TEST_CASE("overlaps_other and has_overlap agree") {
    auto data = small_dataset();
    auto model = small_model(data);
    Allocation a = model.empty_allocation();
    int i = model.long_index(0, 10);
    model.set_site(a, i, true);
    CHECK_FALSE(model.has_overlap(a));
    CHECK(model.overlaps_other(a, model.long_index(0, 5)));
    CHECK(model.overlaps_other(a, model.long_index(0, 21)));
    CHECK_FALSE(model.overlaps_other(a, model.long_index(0, 22)));
    CHECK_FALSE(model.overlaps_other(a, model.long_index(1, 10)));
    // an overlapping allocation carries zero mass
    model.set_site(a, model.long_index(0, 15), true);
    CHECK(model.has_overlap(a));
    CHECK(model.collapsed_log_posterior(a) == -HUGE_VAL);
    CHECK(model.energy(a) == HUGE_VAL);
}

TEST_CASE("energy anchors the empty allocation at the pinned constant") {
    auto data = small_dataset();
    auto model = small_model(data);
    Allocation empty = model.empty_allocation();
    CHECK(model.energy(empty) == doctest::Approx(TfbsModel::kEnergyAnchor).epsilon(1e-12));
    CHECK(TfbsModel::kEnergyAnchor == 200.0);
}

TEST_CASE("prior allocation draw is deterministic, overlap-free, and near the prior rate") {
    auto data = small_dataset(10, 224, 1, 99);
    auto model = small_model(data);

    RngStream rng_a(4242, kInitStream);
    RngStream rng_b(4242, kInitStream);
    Allocation a = model.prior_allocation(rng_a);
    Allocation b = model.prior_allocation(rng_b);
    CHECK(a.active == b.active);
    CHECK_FALSE(model.has_overlap(a));
    CHECK(model.collapsed_log_posterior(a) ==
          doctest::Approx(model.collapsed_log_posterior_fresh(a)).epsilon(1e-10));

    // Mean active count over draws tracks the prior abundance a/(a+b) = 1%
    // of ~2130 candidate positions, thinned slightly by overlap exclusion.
    RngStream rng(77, kInitStream);
    double total = 0.0;
    const int draws = 200;
    for (int d = 0; d < draws; ++d) {
        Allocation x = model.prior_allocation(rng);
        CHECK_FALSE(model.has_overlap(x));
        total += x.count;
    }
    const double mean = total / draws;
    CHECK(mean > 12.0);
    CHECK(mean < 30.0);
}

TEST_CASE("flip odds equal the collapsed-posterior difference") {
    auto data = small_dataset(3, 60, 1, 99);
    auto model = small_model(data);
    RngStream rng(1001, 1);
    Allocation a = model.empty_allocation();
    int checked = 0;
    for (int sweep = 0; sweep < 6; ++sweep) {
        tfbs_gibbs_sweep(model, a, 1.0, rng);
        double base = model.collapsed_log_posterior_fresh(a);
        for (int i = 0; i < model.n_positions() && checked < 400; ++i) {
            if (a.active[i] || model.overlaps_other(a, i)) continue;
            double odds = flip_log_odds(model, a, i);
            auto plus = a;
            model.set_site(plus, i, true);
            double diff = model.collapsed_log_posterior_fresh(plus) - base;
            REQUIRE(std::abs(odds - diff) <= 1e-9 * std::max(1.0, std::abs(odds)));
            ++checked;
        }
    }
    CHECK(checked >= 200);
}

TEST_CASE("incremental statistics survive long sweep runs") {
    auto data = small_dataset(2, 50, 1, 11);
    auto model = small_model(data);
    RngStream rng(2002, 2);
    Allocation a = model.empty_allocation();
    for (int sweep = 0; sweep < 50; ++sweep) tfbs_gibbs_sweep(model, a, 1.1, rng);
    CHECK(model.collapsed_log_posterior(a) ==
          doctest::Approx(model.collapsed_log_posterior_fresh(a)).epsilon(1e-10));
    auto rebuilt = model.allocation_from_flags(a.active);
    CHECK(rebuilt.count == a.count);
    CHECK(rebuilt.col_counts == a.col_counts);
    CHECK(rebuilt.sum_log_bg == doctest::Approx(a.sum_log_bg).epsilon(1e-10));
}

TEST_CASE("flip probability flattens to one half as T grows") {
    auto data = small_dataset();
    auto model = small_model(data);
    Allocation a = model.empty_allocation();
    double lo = flip_log_odds(model, a, 7);
    double p = 1.0 / (1.0 + std::exp(-lo / 1e12));
    CHECK(p == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("enumeration visits every legal allocation exactly once") {
    auto model = tiny_model();
    REQUIRE(model.n_positions() == 8);
    auto all = enumerate_allocations(model);
    CHECK(static_cast<long long>(all.size()) == spaced_subsets(8, 3)); // 28
    std::set<std::uint32_t> masks;
    bool has_empty = false;
    for (const auto& [mask, lp] : all) {
        masks.insert(mask);
        if (mask == 0) {
            has_empty = true;
            // anchor: h(empty) = 100 means empty_log - lp = 0
            Allocation empty = model.empty_allocation();
            CHECK(model.collapsed_log_posterior(empty) == doctest::Approx(lp));
        }
        CHECK(std::isfinite(lp));
    }
    CHECK(has_empty);
    CHECK(masks.size() == all.size());
}

TEST_CASE("one tempered sweep preserves the exact posterior (chi-square)") {
    auto model = tiny_model();
    auto all = enumerate_allocations(model);
    const int cells = static_cast<int>(all.size());
    std::vector<double> logp(cells);
    for (int c = 0; c < cells; ++c) logp[c] = all[c].second;
    double mx = *std::max_element(logp.begin(), logp.end());
    double total = 0.0;
    for (double lp : logp) total += std::exp(lp - mx);
    std::vector<double> p(cells);
    for (int c = 0; c < cells; ++c) p[c] = std::exp(logp[c] - mx) / total;
    std::map<std::uint32_t, int> index;
    for (int c = 0; c < cells; ++c) index[all[c].first] = c;

    const int n = 20000;
    RngStream rng(424242, 3);
    std::vector<long long> counts(cells, 0);
    for (int t = 0; t < n; ++t) {
        int c = rng.categorical_logw(logp);
        std::vector<std::uint8_t> flags(model.n_positions(), 0);
        for (int i = 0; i < model.n_positions(); ++i)
            if (all[c].first & (1u << i)) flags[i] = 1;
        Allocation a = model.allocation_from_flags(flags);
        tfbs_gibbs_sweep(model, a, 1.0, rng); // invariance: law must not move
        ++counts[index.at(mask_of(a))];
    }

    // pool cells with small expectation, then Pearson chi-square
    std::vector<int> order(cells);
    for (int c = 0; c < cells; ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return p[x] < p[y]; });
    double chi2 = 0.0;
    int dof_cells = 0;
    double pool_exp = 0.0;
    long long pool_obs = 0;
    for (int c : order) {
        pool_exp += n * p[c];
        pool_obs += counts[c];
        if (pool_exp >= 10.0) {
            chi2 += (pool_obs - pool_exp) * (pool_obs - pool_exp) / pool_exp;
            ++dof_cells;
            pool_exp = 0.0;
            pool_obs = 0;
        }
    }
    if (pool_exp > 0.0) {
        chi2 += (pool_obs - pool_exp) * (pool_obs - pool_exp) / std::max(pool_exp, 1.0);
        ++dof_cells;
    }
    const double dof = std::max(1, dof_cells - 1);
    CHECK(chi2 < dof + 6.0 * std::sqrt(2.0 * dof) + 10.0);
}

TEST_CASE("equi-energy acceptance agrees with the truncated score route") {
    auto data = small_dataset(2, 40, 1, 17);
    auto model = small_model(data);
    RngStream rng(31415, 4);
    Allocation x = model.empty_allocation();
    Allocation y = model.empty_allocation();
    for (int s = 0; s < 4; ++s) tfbs_gibbs_sweep(model, x, 1.0, rng);
    for (int s = 0; s < 4; ++s) tfbs_gibbs_sweep(model, y, 1.3, rng);

    for (auto [hi, hj, ti, tj] :
         std::vector<std::array<double, 4>>{{10.0, 31.6, 1.0, 1.1}, {56.2, 100.0, 1.02, 1.3}}) {
        double direct = tfbs_ee_acceptance(model, x, y, hi, hj, ti, tj);
        double hx = model.energy(x), hy = model.energy(y);
        auto trunc_score = [](double h, double H, double T) { return -std::max(h, H) / T; };
        double lr = trunc_score(hy, hi, ti) - trunc_score(hx, hi, ti) +
                    trunc_score(hx, hj, tj) - trunc_score(hy, hj, tj);
        CHECK(direct == doctest::Approx(std::min(1.0, std::exp(lr))).epsilon(1e-12));
    }
}

TEST_CASE("independence move keeps the slot consistent and can accept") {
    auto data = small_dataset(2, 40, 1, 23);
    auto model = small_model(data);
    ChainSlot<Allocation> slot;
    slot.x = model.empty_allocation();
    ModelEval ev = model.evaluate(slot.x);
    slot.score = ev.score;
    slot.energy = ev.energy;
    RngStream rng(8080, 5);
    int accepted = 0;
    for (int t = 0; t < 300; ++t) {
        accepted += ees_tfbs_local_move(model, slot, 1.3, 56.2, rng) ? 1 : 0;
        ModelEval check = model.evaluate(slot.x);
        REQUIRE(slot.score == doctest::Approx(check.score).epsilon(1e-12));
        REQUIRE(slot.energy == doctest::Approx(check.energy).epsilon(1e-12));
    }
    CHECK(accepted > 0);
    CHECK(accepted < 300); // some rejections too: it is a genuine MH move
}

TEST_CASE("site probability table and detection statistics") {
    GenerationConfig config;
    config.n_sequences = 1;
    config.background_length = 20;
    config.sites_per_sequence = 0;
    RngStream rng(60, kDataStream);
    Dataset data = generate_dataset(config, rng);
    TfbsModel model(data.sequences, 3, default_background(), TfbsPriors{});
    REQUIRE(model.n_positions() == 18);

    std::vector<Allocation> samples;
    Allocation a = model.empty_allocation();
    model.set_site(a, model.long_index(0, 5), true);
    samples.push_back(a);
    samples.push_back(a);
    samples.push_back(model.empty_allocation());
    auto probs = site_probabilities(model, samples);
    CHECK(probs[model.long_index(0, 5)] == doctest::Approx(2.0 / 3.0));
    CHECK(probs[0] == 0.0);

    std::vector<std::pair<int, int>> truth{{0, 5}, {0, 12}};
    std::vector<double> handmade(model.n_positions(), 0.0);
    handmade[model.long_index(0, 5)] = 0.9;  // exact hit
    handmade[model.long_index(0, 14)] = 0.85; // within +-3 of offset 12
    auto st = evaluate_detection(model, truth, handmade, 0.8, 3);
    CHECK(st.n_sites == 2);
    CHECK(st.detected_exact == 1);
    CHECK(st.detected_window == 2);
    auto strict = evaluate_detection(model, truth, handmade, 0.8, 1);
    CHECK(strict.detected_window == 1);
}

TEST_CASE("default ladders for the motif study") {
    auto t = default_pteem_temperatures();
    REQUIRE(t.size() == 15);
    CHECK(t[0] == 1.0);
    CHECK(t[14] == 1.3);
    CHECK(default_pteem_levels().rings() == 5);
    auto et = default_ees_temperatures();
    REQUIRE(et.size() == 9);
    CHECK(et.front() == 1.0);
    CHECK(et.back() == 1.3);
    CHECK(default_ees_levels().rings() == 9);
    CHECK(default_pteem_levels().levels[0] == 10.0);
    CHECK(default_pteem_levels().levels[4] == 100.0);
}

TEST_CASE("experiment driver runs both samplers end to end") {
    TfbsConfig config;
    config.runs = 1;
    config.burnin = 15;
    config.kept = 25;
    config.ring_init = 10;
    config.generation.n_sequences = 2;
    config.generation.background_length = 40;
    config.generation.sites_per_sequence = 1;
    config.seed = 31337;

    for (Algorithm alg : {Algorithm::pteem, Algorithm::ees}) {
        config.algorithm = alg;
        int sink_calls = 0;
        auto summary = run_tfbs_experiment(
            config, [&](int run, const TfbsModel& model, const Dataset& data,
                        const Trace<Allocation>& trace) {
                ++sink_calls;
                CHECK(run == 0);
                CHECK(trace.samples.size() == 25);
                CHECK(data.true_sites.size() == 2);
                CHECK(model.n_positions() > 0);
            });
        CHECK(sink_calls == 1);
        REQUIRE(summary.runs.size() == 1);
        CHECK(summary.runs[0].detection.n_sites == 2);
        CHECK(summary.runs[0].detection.detected_window >= 0);
        CHECK(summary.runs[0].detection.detected_window <= 2);
    }

    config.algorithm = Algorithm::pt;
    CHECK_THROWS_AS((void)run_tfbs_experiment(config), config_error);
    config.algorithm = Algorithm::pteem;
    config.runs = 0;
    CHECK_THROWS_AS((void)run_tfbs_experiment(config), config_error);
}
