#include "pteem/mixture2d.hpp"

#include "pteem/csv.hpp"
#include "pteem/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pteem::mix2d {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Mode centers of the benchmark target.
constexpr double kMeans[20][2] = {
    {2.18, 5.76}, {8.67, 9.59}, {4.24, 8.48}, {8.41, 1.68}, {3.93, 8.82},
    {3.25, 3.47}, {1.70, 0.50}, {4.59, 5.60}, {6.91, 5.81}, {6.87, 5.40},
    {5.41, 2.65}, {2.70, 7.88}, {4.98, 3.70}, {1.14, 2.39}, {8.33, 9.50},
    {4.93, 1.50}, {1.83, 0.09}, {2.26, 0.31}, {5.54, 6.86}, {1.69, 8.11}};

} // namespace

double GaussianMixture2D::log_density(const Vec2& x) const {
    // log-sum-exp over the component log terms; stable arbitrarily far from
    // the modes because only differences to the max term are exponentiated.
    double best = -HUGE_VAL;
    std::size_t m = means.size();
    if (m == 0 || m > 64) throw config_error("mixture: component count out of range");
    double terms[64];
    for (std::size_t i = 0; i < m; ++i) {
        double dx = x[0] - means[i][0];
        double dy = x[1] - means[i][1];
        double s2 = sigmas[i] * sigmas[i];
        double t = std::log(weights[i]) - std::log(kTwoPi * s2) - (dx * dx + dy * dy) / (2.0 * s2);
        terms[i] = t;
        if (t > best) best = t;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += std::exp(terms[i] - best);
    return best + std::log(sum);
}

std::string GaussianMixture2D::describe(const Vec2& x) const {
    return "x = (" + fmt_real(x[0]) + ", " + fmt_real(x[1]) + ")";
}

GaussianMixture2D benchmark_mixture() {
    GaussianMixture2D model;
    model.means.reserve(20);
    for (const auto& m : kMeans) model.means.push_back({m[0], m[1]});
    model.sigmas.assign(20, 0.1);
    model.weights.assign(20, 0.05);
    return model;
}

void configure_unequal_variances(GaussianMixture2D& model) {
    if (model.sigmas.size() != 20) throw config_error("unequal variances expect the 20-mode target");
    for (int i = 0; i < 5; ++i) model.sigmas[i] = 0.4;
    for (int i = 5; i < 13; ++i) model.sigmas[i] = 0.1;
    for (int i = 13; i < 20; ++i) model.sigmas[i] = 0.05;
}

Moments true_moments(const GaussianMixture2D& model) {
    Moments m;
    for (std::size_t i = 0; i < model.means.size(); ++i) {
        double w = model.weights[i];
        double s2 = model.sigmas[i] * model.sigmas[i];
        m.ex1 += w * model.means[i][0];
        m.ex2 += w * model.means[i][1];
        m.ex1sq += w * (model.means[i][0] * model.means[i][0] + s2);
        m.ex2sq += w * (model.means[i][1] * model.means[i][1] + s2);
    }
    return m;
}

int assign_mode(const GaussianMixture2D& model, const Vec2& x, bool* visited) {
    int best = 0;
    double best_d2 = HUGE_VAL;
    for (std::size_t i = 0; i < model.means.size(); ++i) {
        double dx = x[0] - model.means[i][0];
        double dy = x[1] - model.means[i][1];
        double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = static_cast<int>(i);
        }
    }
    if (visited) {
        double radius = 4.0 * model.sigmas[best];
        *visited = best_d2 < radius * radius;
    }
    return best;
}

ModeStats mode_stats(const GaussianMixture2D& model, const std::vector<Vec2>& samples) {
    int m = static_cast<int>(model.means.size());
    std::vector<long long> counts(m, 0);
    long long visiting = 0;
    for (const auto& x : samples) {
        bool visited = false;
        int mode = assign_mode(model, x, &visited);
        if (visited) {
            ++counts[mode];
            ++visiting;
        }
    }
    ModeStats stats;
    stats.freq.assign(m, 0.0);
    stats.err.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        if (counts[i] > 0) ++stats.visited_modes;
        if (visiting > 0) stats.freq[i] = static_cast<double>(counts[i]) / visiting;
        stats.err[i] = std::abs(stats.freq[i] - model.weights[i]);
    }
    return stats;
}

TemperatureLadder default_temperatures(Algorithm alg, bool unequal) {
    if (alg == Algorithm::ees) {
        if (unequal) return build_temperature_ladder(60.0, 6, TemperatureScheme::log_even);
        return temperature_ladder_from({1.0, 2.8, 7.7, 21.6, 60.0});
    }
    return build_temperature_ladder(60.0, 20, TemperatureScheme::log_even);
}

EnergyLadder default_energy_levels(bool unequal) {
    if (!unequal) return energy_ladder_from({0.2, 2.0, 6.3, 20.0, 63.2});
    EnergyLadder inner = build_energy_ladder(1.5, 20.0, 5, EnergyScheme::log_levels);
    std::vector<double> levels;
    levels.push_back(0.5);
    levels.insert(levels.end(), inner.levels.begin(), inner.levels.end());
    return energy_ladder_from(std::move(levels));
}

namespace {

std::vector<Vec2> initial_states(int n, std::uint64_t seed) {
    RngStream rng(seed, kInitStream);
    std::vector<Vec2> init(n);
    for (auto& x : init) {
        x[0] = rng.uniform01();
        x[1] = rng.uniform01();
    }
    return init;
}

struct MixKernelSet {
    RwKernel<GaussianMixture2D> rw;
    bool step(int, const GaussianMixture2D& model, ChainSlot<Vec2>& slot, double T, double H,
              RngStream& rng) const {
        return rw.step(model, slot, T, std::optional<double>(H), rng);
    }
};

MixtureRunResult analyse(const GaussianMixture2D& model, const Trace<Vec2>& trace) {
    MixtureRunResult result;
    result.modes = mode_stats(model, trace.samples);
    result.visited_modes = result.modes.visited_modes;
    Moments m;
    for (const auto& x : trace.samples) {
        m.ex1 += x[0];
        m.ex2 += x[1];
        m.ex1sq += x[0] * x[0];
        m.ex2sq += x[1] * x[1];
    }
    double n = static_cast<double>(trace.samples.size());
    m.ex1 /= n;
    m.ex2 /= n;
    m.ex1sq /= n;
    m.ex2sq /= n;
    result.moments = m;
    result.local_acceptance = local_acceptance(trace);
    result.exchange_acceptance = exchange_acceptance(trace);
    return result;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
    double n = static_cast<double>(v.size());
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    sd = 0.0;
    if (v.size() > 1) {
        for (double x : v) sd += (x - mean) * (x - mean);
        sd = std::sqrt(sd / (n - 1.0));
    }
}

} // namespace

MixtureSummary run_mixture_experiment(const MixtureConfig& config, const MixtureTraceSink& per_run) {
    if (config.runs <= 0) throw config_error("mixture experiment: runs must be positive");
    GaussianMixture2D model = benchmark_mixture();
    if (config.unequal) configure_unequal_variances(model);

    MixtureSummary summary;
    summary.config = config;
    int n_modes = static_cast<int>(model.means.size());

    for (int run = 0; run < config.runs; ++run) {
        std::uint64_t run_seed = derive_run_seed(config.seed, run);
        Trace<Vec2> trace;
        if (config.algorithm == Algorithm::ees) {
            EesOptions options;
            options.temperatures = default_temperatures(config.algorithm, config.unequal).temperatures;
            options.levels = default_energy_levels(config.unequal);
            options.p_ee = config.p_ee;
            options.burnin = config.burnin;
            options.ring_init = config.ring_init;
            options.kept = config.kept;
            options.seed = run_seed;
            int K = static_cast<int>(options.temperatures.size());
            trace = run_ees(model, MixKernelSet{}, options, initial_states(K, run_seed));
        } else {
            PopulationOptions options;
            options.temperatures = default_temperatures(config.algorithm, config.unequal);
            options.rings = default_energy_levels(config.unequal);
            options.use_rings = true; // ring diagnostics recorded for plain PT too
            options.burnin = config.burnin;
            options.kept = config.kept;
            options.seed = run_seed;
            options.threads = config.threads;
            options.scatter_chains = {1, 7, 14, 20};
            std::vector<Vec2> init = initial_states(options.temperatures.size(), run_seed);
            if (config.algorithm == Algorithm::pteem)
                trace = run_pteem(model, RwKernel<GaussianMixture2D>{}, options, std::move(init));
            else
                trace = run_pt(model, RwKernel<GaussianMixture2D>{}, options, std::move(init));
        }
        if (per_run) per_run(run, trace);
        summary.runs.push_back(analyse(model, trace));
    }

    std::vector<double> visited, ex1, ex2, ex1sq, ex2sq, lacc, xacc;
    for (const auto& r : summary.runs) {
        visited.push_back(r.visited_modes);
        ex1.push_back(r.moments.ex1);
        ex2.push_back(r.moments.ex2);
        ex1sq.push_back(r.moments.ex1sq);
        ex2sq.push_back(r.moments.ex2sq);
        lacc.push_back(r.local_acceptance);
        xacc.push_back(r.exchange_acceptance);
    }
    mean_sd(visited, summary.mean_visited, summary.sd_visited);
    double sd;
    mean_sd(ex1, summary.mean_moments.ex1, summary.sd_moments.ex1);
    mean_sd(ex2, summary.mean_moments.ex2, summary.sd_moments.ex2);
    mean_sd(ex1sq, summary.mean_moments.ex1sq, summary.sd_moments.ex1sq);
    mean_sd(ex2sq, summary.mean_moments.ex2sq, summary.sd_moments.ex2sq);
    mean_sd(lacc, summary.mean_local_acceptance, sd);
    mean_sd(xacc, summary.mean_exchange_acceptance, sd);

    summary.err_median.assign(n_modes, 0.0);
    summary.err_max.assign(n_modes, 0.0);
    for (int i = 0; i < n_modes; ++i) {
        std::vector<double> errs;
        for (const auto& r : summary.runs) errs.push_back(r.modes.err[i]);
        summary.err_median[i] = median_of(errs);
        summary.err_max[i] = *std::max_element(errs.begin(), errs.end());
    }
    return summary;
}

std::vector<ErrRatioRow> err_ratio_table(const MixtureSummary& num, const MixtureSummary& den) {
    if (num.err_median.size() != den.err_median.size())
        throw config_error("error-ratio table: summaries cover different mode counts");
    std::vector<ErrRatioRow> table;
    for (std::size_t i = 0; i < num.err_median.size(); ++i) {
        ErrRatioRow row;
        row.mode = static_cast<int>(i) + 1;
        row.ratio_median = den.err_median[i] > 0 ? num.err_median[i] / den.err_median[i] : HUGE_VAL;
        row.ratio_max = den.err_max[i] > 0 ? num.err_max[i] / den.err_max[i] : HUGE_VAL;
        table.push_back(row);
    }
    return table;
}

} // namespace pteem::mix2d
