#pragma once

// Benchmark target: a 20-component bivariate Gaussian mixture on roughly
// [0,10]^2 with equal weights.  The components are isotropic; the "unequal"
// variant widens modes 1-5 and sharpens modes 14-20 so the energy rings see
// modes at genuinely different depths.

#include "pteem/engines.hpp"
#include "pteem/model.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pteem::mix2d {

using Vec2 = std::array<double, 2>;

struct GaussianMixture2D {
    using State = Vec2;

    std::vector<Vec2> means;
    std::vector<double> sigmas;
    std::vector<double> weights;

    double log_density(const Vec2& x) const; // normalized mixture density, log-sum-exp
    double tempering_score(const Vec2& x) const { return log_density(x); }
    double energy(const Vec2& x) const { return -log_density(x); }
    ModelEval evaluate(const Vec2& x) const {
        double ld = log_density(x);
        return {ld, -ld};
    }
    std::string describe(const Vec2& x) const;
};

// The 20 fixed modes, sigma = 0.1 and weight 0.05 everywhere.
GaussianMixture2D benchmark_mixture();

// Widened/sharpened variant: sigma = 0.4 for modes 1-5, 0.1 for 6-13,
// 0.05 for 14-20.
void configure_unequal_variances(GaussianMixture2D& model);

// Exact moments E(X1), E(X2), E(X1^2), E(X2^2).
struct Moments {
    double ex1 = 0, ex2 = 0, ex1sq = 0, ex2sq = 0;
};
Moments true_moments(const GaussianMixture2D& model);

// Nearest mode center; visited means the sample landed within 4 sigma of it.
int assign_mode(const GaussianMixture2D& model, const Vec2& x, bool* visited);

struct ModeStats {
    int visited_modes = 0;
    std::vector<double> freq; // visit share per mode (over visiting samples)
    std::vector<double> err;  // |freq_i - w_i|
};
ModeStats mode_stats(const GaussianMixture2D& model, const std::vector<Vec2>& samples);

// ---------------------------------------------------------------------------
// Experiment driver.

struct MixtureConfig {
    Algorithm algorithm = Algorithm::pteem;
    bool unequal = false;
    int runs = 100;
    long long burnin = 2500;
    long long kept = 2500;
    long long ring_init = 500; // sequential sampler only
    double p_ee = 0.1;         // sequential sampler only
    std::uint64_t seed = 20060527;
    int threads = 1;
};

struct MixtureRunResult {
    int visited_modes = 0;
    Moments moments;
    double local_acceptance = 0.0;
    double exchange_acceptance = 0.0;
    ModeStats modes;
};

struct MixtureSummary {
    MixtureConfig config;
    std::vector<MixtureRunResult> runs;
    double mean_visited = 0, sd_visited = 0;
    Moments mean_moments;
    Moments sd_moments;
    double mean_local_acceptance = 0, mean_exchange_acceptance = 0;
    std::vector<double> err_median; // per mode, across runs
    std::vector<double> err_max;
};

// Runs the configured sampler `runs` times on fresh seeds; `per_run` (when
// set) receives each finished trace for serialization.
using MixtureTraceSink = std::function<void(int run, const Trace<Vec2>&)>;
MixtureSummary run_mixture_experiment(const MixtureConfig& config,
                                      const MixtureTraceSink& per_run = {});

// Per-mode med/max error ratios between two summaries (numerator / denominator).
struct ErrRatioRow {
    int mode = 0;
    double ratio_median = 0.0;
    double ratio_max = 0.0;
};
std::vector<ErrRatioRow> err_ratio_table(const MixtureSummary& num, const MixtureSummary& den);

// Default ladders used by the experiment (exposed for tests and the CLI).
TemperatureLadder default_temperatures(Algorithm alg, bool unequal);
EnergyLadder default_energy_levels(bool unequal);

} // namespace pteem::mix2d
