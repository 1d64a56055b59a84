#include "pteem/tfbs.hpp"

#include "pteem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace pteem::tfbs {

namespace {

double log_sigmoid(double z) {
    return z > 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z > 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

int draw4(const std::array<double, 4>& p, RngStream& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (int b = 0; b < 3; ++b) {
        acc += p[b];
        if (u <= acc) return b;
    }
    return 3;
}

void validate_distribution(const std::array<double, 4>& p, const char* what) {
    double s = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw config_error(std::string(what) + ": negative probability");
        s += v;
    }
    if (std::fabs(s - 1.0) > 1e-9)
        throw config_error(std::string(what) + ": probabilities must sum to 1");
}

} // namespace

int base_index(char c) {
    switch (c) {
    case 'A': case 'a': return 0;
    case 'C': case 'c': return 1;
    case 'G': case 'g': return 2;
    case 'T': case 't': return 3;
    default: throw config_error(std::string("sequence contains a non-ACGT character: '") + c + "'");
    }
}

char base_char(int b) {
    static const char tab[4] = {'A', 'C', 'G', 'T'};
    if (b < 0 || b > 3) throw run_error("base index out of range");
    return tab[b];
}

std::string sequence_string(const Sequence& s) {
    std::string out;
    out.reserve(s.size());
    for (std::uint8_t b : s) out.push_back(base_char(b));
    return out;
}

BackgroundModel default_background() {
    BackgroundModel bg;
    for (int f = 0; f < 4; ++f)
        for (int t = 0; t < 4; ++t) bg.trans[f][t] = f == t ? 0.64 : 0.12;
    bg.stationary = {0.25, 0.25, 0.25, 0.25};
    return bg;
}

MotifMatrix default_motif() {
    // Columns of the width-12 reference matrix, rows ordered A, C, G, T.
    static const double rows[4][12] = {
        {0.6, 0.1, 0.0, 0.6, 0.1, 0.0, 0.3, 0.0, 0.2, 0.0, 0.5, 0.0},
        {0.0, 0.0, 0.8, 0.0, 0.0, 0.0, 0.0, 0.0, 0.2, 0.5, 0.25, 0.7},
        {0.0, 0.2, 0.0, 0.1, 0.8, 0.7, 0.0, 0.9, 0.0, 0.0, 0.25, 0.2},
        {0.4, 0.7, 0.2, 0.3, 0.1, 0.3, 0.7, 0.1, 0.6, 0.5, 0.0, 0.1}};
    MotifMatrix m;
    m.cols.resize(12);
    for (int j = 0; j < 12; ++j)
        for (int b = 0; b < 4; ++b) m.cols[j][b] = rows[b][j];
    return m;
}

// ---------------------------------------------------------------------------
// Synthetic data.

Dataset generate_dataset(const GenerationConfig& config, RngStream& rng) {
    const int w = config.motif.width();
    if (config.n_sequences < 1) throw config_error("need at least one sequence");
    if (config.background_length < 0) throw config_error("background length cannot be negative");
    if (config.sites_per_sequence < 0) throw config_error("sites per sequence cannot be negative");
    if (w < 1) throw config_error("motif width must be at least 1");
    for (const auto& col : config.motif.cols) validate_distribution(col, "motif column");
    for (const auto& row : config.background.trans) validate_distribution(row, "background row");
    validate_distribution(config.background.stationary, "background stationary law");

    Dataset out;
    out.sequences.reserve(config.n_sequences);
    for (int s = 0; s < config.n_sequences; ++s) {
        Sequence bg(config.background_length);
        for (int t = 0; t < config.background_length; ++t)
            bg[t] = static_cast<std::uint8_t>(
                draw4(t == 0 ? config.background.stationary : config.background.trans[bg[t - 1]],
                      rng));

        std::vector<int> cuts(config.sites_per_sequence);
        for (int& c : cuts) c = rng.uniform_int(config.background_length + 1);
        std::sort(cuts.begin(), cuts.end());

        Sequence seq;
        seq.reserve(bg.size() + static_cast<std::size_t>(config.sites_per_sequence) * w);
        int prev = 0;
        for (int c : cuts) {
            seq.insert(seq.end(), bg.begin() + prev, bg.begin() + c);
            out.true_sites.emplace_back(s, static_cast<int>(seq.size()));
            for (int j = 0; j < w; ++j)
                seq.push_back(static_cast<std::uint8_t>(draw4(config.motif.cols[j], rng)));
            prev = c;
        }
        seq.insert(seq.end(), bg.begin() + prev, bg.end());
        out.sequences.push_back(std::move(seq));
    }
    return out;
}

std::vector<Sequence> parse_sequences(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    bool fasta = false;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '>') fasta = true;
        lines.push_back(line);
    }
    std::vector<Sequence> seqs;
    if (fasta) {
        for (const auto& l : lines) {
            if (l[0] == '>') {
                seqs.emplace_back();
                continue;
            }
            if (seqs.empty()) throw config_error("sequence data precedes the first '>' header");
            for (char c : l) seqs.back().push_back(static_cast<std::uint8_t>(base_index(c)));
        }
    } else {
        for (const auto& l : lines) {
            Sequence s;
            s.reserve(l.size());
            for (char c : l) s.push_back(static_cast<std::uint8_t>(base_index(c)));
            seqs.push_back(std::move(s));
        }
    }
    if (seqs.empty()) throw config_error("no sequences found");
    for (const auto& s : seqs)
        if (s.empty()) throw config_error("empty sequence record");
    return seqs;
}

std::vector<Sequence> load_sequences(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw run_error("cannot open sequence file: " + path);
    return parse_sequences(in);
}

void write_sequences(const std::string& path, const std::vector<Sequence>& seqs) {
    std::ofstream out(path);
    if (!out) throw run_error("cannot write sequence file: " + path);
    for (std::size_t s = 0; s < seqs.size(); ++s)
        out << ">seq" << (s + 1) << "\n" << sequence_string(seqs[s]) << "\n";
    if (!out) throw run_error("failed writing sequence file: " + path);
}

// ---------------------------------------------------------------------------
// Model.

TfbsModel::TfbsModel(std::vector<Sequence> sequences, int width, BackgroundModel background,
                     TfbsPriors priors)
    : sequences_(std::move(sequences)), width_(width), background_(background), priors_(priors) {
    if (width_ < 1) throw config_error("motif width must be at least 1");
    if (sequences_.empty()) throw config_error("need at least one sequence");
    if (!(priors_.a > 0.0) || !(priors_.b > 0.0) || !(priors_.beta > 0.0))
        throw config_error("allocation priors must be positive");
    for (const auto& row : background_.trans) validate_distribution(row, "background row");
    validate_distribution(background_.stationary, "background stationary law");
    for (int f = 0; f < 4; ++f) {
        if (!(background_.stationary[f] > 0.0))
            throw config_error("background stationary law must be strictly positive");
        for (int t = 0; t < 4; ++t)
            if (!(background_.trans[f][t] > 0.0))
                throw config_error("background transitions must be strictly positive");
    }

    const int n_seqs = static_cast<int>(sequences_.size());
    seq_first_.resize(n_seqs);
    for (int s = 0; s < n_seqs; ++s) {
        const auto& seq = sequences_[s];
        if (static_cast<int>(seq.size()) < width_)
            throw config_error("sequence shorter than the motif width");
        for (std::uint8_t b : seq)
            if (b > 3) throw config_error("sequence contains an invalid base code");
        seq_first_[s] = n_positions_;
        const int n_off = static_cast<int>(seq.size()) - width_ + 1;
        for (int o = 0; o < n_off; ++o) {
            pos_seq_.push_back(s);
            pos_off_.push_back(o);
        }
        n_positions_ += n_off;
    }

    log_bg_.resize(n_positions_);
    for (int i = 0; i < n_positions_; ++i) {
        const auto& seq = sequences_[pos_seq_[i]];
        const int o = pos_off_[i];
        double lb = o == 0 ? std::log(background_.stationary[seq[0]])
                           : std::log(background_.trans[seq[o - 1]][seq[o]]);
        for (int t = 1; t < width_; ++t)
            lb += std::log(background_.trans[seq[o + t - 1]][seq[o + t]]);
        log_bg_[i] = lb;
    }

    const Allocation empty = empty_allocation();
    empty_log_ = 0.0; // placeholder so collapsed_log_posterior is callable
    empty_log_ = collapsed_log_posterior(empty);
}

int TfbsModel::long_index(int seq, int offset) const {
    if (seq < 0 || seq >= static_cast<int>(sequences_.size()))
        throw run_error("sequence index out of range");
    const int n_off = static_cast<int>(sequences_[seq].size()) - width_ + 1;
    if (offset < 0 || offset >= n_off) throw run_error("site offset out of range");
    return seq_first_[seq] + offset;
}

Allocation TfbsModel::empty_allocation() const {
    Allocation a;
    a.active.assign(n_positions_, 0);
    a.col_counts.assign(width_, {0, 0, 0, 0});
    return a;
}

Allocation TfbsModel::prior_allocation(RngStream& rng) const {
    Allocation a = empty_allocation();
    const double p = priors_.a / (priors_.a + priors_.b);
    for (int i = 0; i < n_positions_; ++i)
        if (rng.uniform01() < p && !overlaps_other(a, i)) set_site(a, i, true);
    return a;
}

void TfbsModel::set_site(Allocation& a, int i, bool on) const {
    if (i < 0 || i >= n_positions_) throw run_error("site index out of range");
    if ((a.active[i] != 0) == on) throw run_error("allocation flip is a no-op");
    a.active[i] = on ? 1 : 0;
    const int d = on ? 1 : -1;
    a.count += d;
    for (int j = 0; j < width_; ++j) a.col_counts[j][base_at(i, j)] += d;
    a.sum_log_bg += d * log_bg_[i];
}

bool TfbsModel::overlaps_other(const Allocation& a, int i) const {
    const int s = pos_seq_[i];
    const int o = pos_off_[i];
    const int n_off = static_cast<int>(sequences_[s].size()) - width_ + 1;
    const int lo = std::max(0, o - width_ + 1);
    const int hi = std::min(n_off - 1, o + width_ - 1);
    for (int oo = lo; oo <= hi; ++oo)
        if (oo != o && a.active[seq_first_[s] + oo]) return true;
    return false;
}

bool TfbsModel::has_overlap(const Allocation& a) const {
    int last_seq = -1;
    int last_off = 0;
    for (int i = 0; i < n_positions_; ++i) {
        if (!a.active[i]) continue;
        if (pos_seq_[i] == last_seq && pos_off_[i] - last_off < width_) return true;
        last_seq = pos_seq_[i];
        last_off = pos_off_[i];
    }
    return false;
}

Allocation TfbsModel::allocation_from_flags(const std::vector<std::uint8_t>& active) const {
    if (static_cast<int>(active.size()) != n_positions_)
        throw run_error("allocation flag vector has the wrong length");
    Allocation a = empty_allocation();
    for (int i = 0; i < n_positions_; ++i)
        if (active[i]) set_site(a, i, true);
    return a;
}

double TfbsModel::collapsed_log_posterior(const Allocation& a) const {
    if (static_cast<int>(a.active.size()) != n_positions_)
        throw run_error("allocation flag vector has the wrong length");
    if (has_overlap(a)) return -HUGE_VAL;
    const double pa = priors_.a, pb = priors_.b, be = priors_.beta;
    const double L = n_positions_;
    double lp = -a.sum_log_bg + std::lgamma(a.count + pa) + std::lgamma(L - a.count + pb) -
                std::lgamma(L + pa + pb);
    for (int j = 0; j < width_; ++j) {
        for (int b = 0; b < 4; ++b) lp += std::lgamma(a.col_counts[j][b] + be);
        lp -= std::lgamma(a.count + 4.0 * be);
    }
    return lp;
}

double TfbsModel::collapsed_log_posterior_fresh(const Allocation& a) const {
    return collapsed_log_posterior(allocation_from_flags(a.active));
}

ModelEval TfbsModel::evaluate(const State& x) const {
    const double s = collapsed_log_posterior(x);
    return {s, empty_log_ - s + kEnergyAnchor};
}

std::string TfbsModel::describe(const State& x) const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "allocation with %d active sites over %d positions", x.count,
                  n_positions_);
    return buf;
}

// ---------------------------------------------------------------------------
// Moves.

double flip_log_odds(const TfbsModel& model, const Allocation& a, int i) {
    if (a.active[i]) throw run_error("flip odds require the position to be switched off");
    const auto& pr = model.priors();
    const double cnt = a.count;
    const double L = model.n_positions();
    double lo = -model.log_bg(i) + std::log(cnt + pr.a) - std::log(L - cnt - 1.0 + pr.b);
    for (int j = 0; j < model.width(); ++j)
        lo += std::log(a.col_counts[j][model.base_at(i, j)] + pr.beta) -
              std::log(cnt + 4.0 * pr.beta);
    return lo;
}

void tfbs_gibbs_sweep(const TfbsModel& model, Allocation& a, double T, RngStream& rng) {
    if (!(T >= 1.0)) throw config_error("temperature must be >= 1");
    const int L = model.n_positions();
    for (int i = 0; i < L; ++i) {
        if (a.active[i]) model.set_site(a, i, false);
        if (model.overlaps_other(a, i)) continue; // overlap carries zero mass: forced off
        const double p = sigmoid(flip_log_odds(model, a, i) / T);
        if (rng.uniform01() < p) model.set_site(a, i, true);
    }
}

double tfbs_ee_acceptance(const TfbsModel& model, const Allocation& x, const Allocation& y,
                          double h_i, double h_j, double t_i, double t_j) {
    const double hx = model.energy(x);
    const double hy = model.energy(y);
    const double lr = (std::max(hx, h_i) - std::max(hy, h_i)) / t_i +
                      (std::max(hy, h_j) - std::max(hx, h_j)) / t_j;
    if (std::isnan(lr)) return 0.0;
    return std::min(1.0, std::exp(lr));
}

std::vector<double> independence_log_odds(const TfbsModel& model, const Allocation& ref) {
    const auto& pr = model.priors();
    const int L = model.n_positions();
    const int w = model.width();
    const double p0 = (ref.count + pr.a) / (L + pr.a + pr.b);
    const double base_term = std::log(p0) - std::log1p(-p0);
    std::vector<std::array<double, 4>> log_theta(w);
    for (int j = 0; j < w; ++j)
        for (int b = 0; b < 4; ++b)
            log_theta[j][b] =
                std::log((ref.col_counts[j][b] + pr.beta) / (ref.count + 4.0 * pr.beta));
    std::vector<double> out(L);
    for (int i = 0; i < L; ++i) {
        double s = base_term - model.log_bg(i);
        for (int j = 0; j < w; ++j) s += log_theta[j][model.base_at(i, j)];
        out[i] = s;
    }
    return out;
}

bool ees_tfbs_local_move(const TfbsModel& model, ChainSlot<Allocation>& slot, double T, double H,
                         RngStream& rng) {
    const int L = model.n_positions();
    const std::vector<double> fwd = independence_log_odds(model, slot.x);
    std::vector<std::uint8_t> flags(L, 0);
    double log_fwd = 0.0;
    for (int i = 0; i < L; ++i) {
        const double z = fwd[i] / T;
        const bool on = rng.uniform01() < sigmoid(z);
        flags[i] = on ? 1 : 0;
        log_fwd += on ? log_sigmoid(z) : log_sigmoid(-z);
    }
    Allocation prop = model.allocation_from_flags(flags);
    const ModelEval ev = model.evaluate(prop);
    if (!std::isfinite(ev.energy)) return false; // overlapping proposal: zero target mass

    const std::vector<double> rev = independence_log_odds(model, prop);
    double log_rev = 0.0;
    for (int i = 0; i < L; ++i) {
        const double z = rev[i] / T;
        log_rev += slot.x.active[i] ? log_sigmoid(z) : log_sigmoid(-z);
    }
    double lr = (std::max(slot.energy, H) - std::max(ev.energy, H)) / T + log_rev - log_fwd;
    if (std::isnan(lr)) lr = -HUGE_VAL;
    if (std::log(rng.uniform01()) < lr) {
        slot.x = std::move(prop);
        slot.score = ev.score;
        slot.energy = ev.energy;
        return true;
    }
    return false;
}

std::vector<std::pair<std::uint32_t, double>> enumerate_allocations(const TfbsModel& model) {
    const int L = model.n_positions();
    if (L > 25) throw config_error("allocation enumeration supports at most 25 positions");
    std::vector<std::pair<std::uint32_t, double>> out;
    Allocation a = model.empty_allocation();
    std::uint32_t mask = 0;
    std::function<void(int)> rec = [&](int from) {
        out.emplace_back(mask, model.collapsed_log_posterior(a));
        for (int i = from; i < L; ++i) {
            if (model.overlaps_other(a, i)) continue;
            model.set_site(a, i, true);
            mask |= 1u << i;
            rec(i + 1);
            model.set_site(a, i, false);
            mask &= ~(1u << i);
        }
    };
    rec(0);
    return out;
}

std::vector<double> site_probabilities(const TfbsModel& model,
                                       const std::vector<Allocation>& samples) {
    if (samples.empty()) throw run_error("no samples to estimate site probabilities from");
    std::vector<double> probs(model.n_positions(), 0.0);
    for (const auto& a : samples)
        for (int i = 0; i < model.n_positions(); ++i)
            if (a.active[i]) probs[i] += 1.0;
    for (double& p : probs) p /= static_cast<double>(samples.size());
    return probs;
}

DetectionStats evaluate_detection(const TfbsModel& model,
                                  const std::vector<std::pair<int, int>>& true_sites,
                                  const std::vector<double>& probs, double threshold, int window) {
    DetectionStats st;
    st.n_sites = static_cast<int>(true_sites.size());
    for (const auto& [s, o] : true_sites) {
        if (probs[model.long_index(s, o)] > threshold) ++st.detected_exact;
        const int n_off = static_cast<int>(model.sequences()[s].size()) - model.width() + 1;
        bool hit = false;
        for (int d = -window; d <= window && !hit; ++d) {
            const int oo = o + d;
            if (oo < 0 || oo >= n_off) continue;
            hit = probs[model.long_index(s, oo)] > threshold;
        }
        if (hit) ++st.detected_window;
    }
    return st;
}

bool TfbsGibbsKernel::step(const TfbsModel& model, ChainSlot<Allocation>& slot, double T,
                           std::optional<double> truncation, RngStream& rng) const {
    if (truncation.has_value())
        throw config_error("the allocation Gibbs kernel has no truncated-target form");
    tfbs_gibbs_sweep(model, slot.x, T, rng);
    const ModelEval ev = model.evaluate(slot.x);
    slot.score = ev.score;
    slot.energy = ev.energy;
    return true;
}

bool TfbsEesKernelSet::step(int chain, const TfbsModel& model, ChainSlot<Allocation>& slot,
                            double T, double H, RngStream& rng) const {
    if (chain == 0) {
        // The coldest chain samples the plain posterior by Gibbs; its
        // truncation level sits at the bottom of the energy scale by design.
        tfbs_gibbs_sweep(model, slot.x, T, rng);
        const ModelEval ev = model.evaluate(slot.x);
        slot.score = ev.score;
        slot.energy = ev.energy;
        return true;
    }
    return ees_tfbs_local_move(model, slot, T, H, rng);
}

// ---------------------------------------------------------------------------
// Experiment driver.

TemperatureLadder default_pteem_temperatures() {
    return build_temperature_ladder(1.3, 15, TemperatureScheme::inverse_even);
}

EnergyLadder default_pteem_levels() {
    return build_energy_ladder(10.0, 100.0, 5, EnergyScheme::log_levels);
}

std::vector<double> default_ees_temperatures() {
    return {1.0, 1.001, 1.002, 1.005, 1.01, 1.02, 1.06, 1.1, 1.3};
}

EnergyLadder default_ees_levels() {
    return build_energy_ladder(10.0, 100.0, 9, EnergyScheme::log_levels);
}

TfbsSummary run_tfbs_experiment(const TfbsConfig& config, const TfbsTraceSink& per_run) {
    if (config.algorithm == Algorithm::pt)
        throw config_error("the motif study runs under pteem or ees");
    if (config.runs <= 0) throw config_error("runs must be positive");

    TfbsSummary summary;
    summary.config = config;
    summary.runs.reserve(config.runs);

    for (int r = 0; r < config.runs; ++r) {
        const std::uint64_t run_seed = derive_run_seed(config.seed, r);
        RngStream data_rng(run_seed, kDataStream);
        const Dataset data = generate_dataset(config.generation, data_rng);
        const TfbsModel model(data.sequences, config.generation.motif.width(),
                              config.generation.background, config.priors);

        Trace<Allocation> trace;
        RngStream init_rng(run_seed, kInitStream);
        if (config.algorithm == Algorithm::pteem) {
            PopulationOptions opt;
            opt.temperatures = default_pteem_temperatures();
            opt.rings = default_pteem_levels();
            opt.burnin = config.burnin;
            opt.kept = config.kept;
            opt.seed = run_seed;
            opt.threads = config.threads;
            std::vector<Allocation> init;
            for (std::size_t c = 0; c < opt.temperatures.size(); ++c)
                init.push_back(model.prior_allocation(init_rng));
            trace = run_pteem(model, TfbsGibbsKernel{}, opt, std::move(init));
        } else {
            EesOptions opt;
            opt.temperatures = default_ees_temperatures();
            opt.levels = default_ees_levels();
            opt.p_ee = config.p_ee;
            opt.burnin = config.burnin;
            opt.ring_init = config.ring_init;
            opt.kept = config.kept;
            opt.seed = run_seed;
            std::vector<Allocation> init;
            for (std::size_t c = 0; c < opt.temperatures.size(); ++c)
                init.push_back(model.prior_allocation(init_rng));
            trace = run_ees(model, TfbsEesKernelSet{}, opt, std::move(init));
        }

        const std::vector<double> probs = site_probabilities(model, trace.samples);
        TfbsRunResult res;
        res.detection = evaluate_detection(model, data.true_sites, probs, config.detect_threshold,
                                           config.detect_window);
        res.exchange_acceptance = exchange_acceptance(trace);
        summary.runs.push_back(res);
        if (per_run) per_run(r, model, data, trace);
    }

    double dw = 0, de = 0, ea = 0;
    for (const auto& r : summary.runs) {
        dw += r.detection.detected_window;
        de += r.detection.detected_exact;
        ea += r.exchange_acceptance;
    }
    const double nr = static_cast<double>(summary.runs.size());
    summary.mean_detected_window = dw / nr;
    summary.mean_detected_exact = de / nr;
    summary.mean_exchange_acceptance = ea / nr;
    return summary;
}

} // namespace pteem::tfbs
