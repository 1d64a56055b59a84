#include "doctest.h"

#include "pteem/galaxy.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

using namespace pteem;
using namespace pteem::galaxy;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double log_normal_pdf(double x, double mean, double var) {
    return -0.5 * std::log(2.0 * 3.14159265358979323846 * var) - (x - mean) * (x - mean) / (2.0 * var);
}

double log_gamma_pdf(double x, double shape, double rate) {
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_dirichlet_pdf(const std::vector<double>& w, const std::vector<double>& a) {
    double asum = 0.0, lp = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        asum += a[i];
        lp += (a[i] - 1.0) * std::log(w[i]) - std::lgamma(a[i]);
    }
    return lp + std::lgamma(asum);
}

GalaxyModel small_model() {
    GalaxyModel model;
    model.data = {9.2, 9.8, 10.1, 16.2, 19.9, 20.3, 20.8, 21.1, 22.5, 23.0, 24.1, 33.0, 34.5};
    model.hyper.k = 3;
    return model;
}

MixtureParamState random_state(const GalaxyModel& model, std::uint64_t seed) {
    RngStream rng(seed, kInitStream);
    return initial_state(model, rng);
}

} // namespace

TEST_CASE("single-component single-observation joint matches the written formula") {
    GalaxyModel model;
    model.data = {21.4};
    model.hyper.k = 1;
    const auto& hp = model.hyper;

    MixtureParamState x;
    x.mu = {19.0};
    x.prec = {0.7};
    x.w = {1.0};
    x.c = {0};
    x.beta = 0.35;

    double d = model.data[0] - x.mu[0];
    double ll = 0.5 * std::log(x.prec[0]) - 0.5 * kLog2Pi - 0.5 * x.prec[0] * d * d;
    CHECK(model.log_likelihood(x) == doctest::Approx(ll).epsilon(1e-14));

    double lp = log_gamma_pdf(x.beta, hp.g, hp.h);
    lp += log_normal_pdf(x.mu[0], hp.xi, 1.0 / hp.kappa);
    lp += log_gamma_pdf(x.prec[0], hp.alpha, x.beta);
    // k = 1: the Dirichlet factor and the label factor are both log(1) = 0
    CHECK(model.log_prior(x) == doctest::Approx(lp).epsilon(1e-12));

    CHECK(model.log_density(x) == doctest::Approx(ll + lp).epsilon(1e-12));
    model.energy_offset = -185.0;
    CHECK(model.energy(x) == doctest::Approx(-(ll + lp) - 185.0).epsilon(1e-12));
    CHECK(model.tempering_score(x) == doctest::Approx(ll).epsilon(1e-14));
}

TEST_CASE("off-support states have zero density") {
    GalaxyModel model = small_model();
    auto x = random_state(model, 9);
    auto bad = x;
    bad.beta = 0.0;
    CHECK(model.log_prior(bad) == -HUGE_VAL);
    bad = x;
    bad.prec[1] = -0.2;
    CHECK(model.log_prior(bad) == -HUGE_VAL);
    CHECK(model.log_likelihood(bad) == -HUGE_VAL);
    bad = x;
    bad.mu.pop_back();
    CHECK_THROWS_AS((void)model.log_prior(bad), run_error);
    bad = x;
    bad.c[0] = 7;
    CHECK_THROWS_AS((void)model.log_likelihood(bad), run_error);
}

// The sweep's conditionals, checked against the tempered joint: replacing one
// block must change the conditional log-density and the tempered joint by the
// same amount.  This validates every shape/rate/mean/variance choice.
TEST_CASE("gibbs conditionals are consistent with the tempered joint") {
    GalaxyModel model = small_model();
    const auto& hp = model.hyper;
    const int k = hp.k;
    const int n = static_cast<int>(model.data.size());

    for (double T : {1.0, 2.7}) {
        MixtureParamState x = random_state(model, 31 + static_cast<int>(10 * T));
        // counts and sums under the current labels
        std::vector<int> m(k, 0);
        std::vector<double> sum(k, 0.0);
        for (int l = 0; l < n; ++l) {
            ++m[x.c[l]];
            sum[x.c[l]] += model.data[l];
        }
        auto tempered = [&](const MixtureParamState& s) {
            return tempered_posterior_log(model, s, T);
        };

        // mean block
        {
            int p = 1;
            double lambda = x.prec[p] * m[p] / T + hp.kappa;
            double mean = (x.prec[p] / T * sum[p] + hp.xi * hp.kappa) / lambda;
            auto y = x;
            y.mu[p] = x.mu[p] + 0.83;
            double lhs = log_normal_pdf(y.mu[p], mean, 1.0 / lambda) -
                         log_normal_pdf(x.mu[p], mean, 1.0 / lambda);
            double rhs = tempered(y) - tempered(x);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
        }

        // precision block
        {
            int p = 2;
            double ssq = 0.0;
            for (int l = 0; l < n; ++l)
                if (x.c[l] == p) {
                    double d = model.data[l] - x.mu[p];
                    ssq += d * d;
                }
            double shape = hp.alpha + m[p] / (2.0 * T);
            double rate = x.beta + ssq / (2.0 * T);
            auto y = x;
            y.prec[p] = x.prec[p] * 1.74;
            double lhs = log_gamma_pdf(y.prec[p], shape, rate) -
                         log_gamma_pdf(x.prec[p], shape, rate);
            double rhs = tempered(y) - tempered(x);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
        }

        // weight block (untempered conditional)
        {
            std::vector<double> a(k);
            for (int p = 0; p < k; ++p) a[p] = hp.delta + m[p];
            auto y = x;
            y.w = {0.5, 0.2, 0.3};
            double lhs = log_dirichlet_pdf(y.w, a) - log_dirichlet_pdf(x.w, a);
            double rhs = tempered(y) - tempered(x);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
        }

        // label block
        {
            int l = 4;
            auto logw = [&](int p) {
                double d = model.data[l] - x.mu[p];
                return std::log(x.w[p]) +
                       (0.5 * std::log(x.prec[p]) - 0.5 * x.prec[p] * d * d) / T;
            };
            auto y = x;
            y.c[l] = (x.c[l] + 1) % k;
            double lhs = logw(y.c[l]) - logw(x.c[l]);
            double rhs = tempered(y) - tempered(x);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
        }

        // precision-rate block (untempered conditional)
        {
            double sp = 0.0;
            for (double v : x.prec) sp += v;
            auto y = x;
            y.beta = x.beta * 0.58;
            double lhs = log_gamma_pdf(y.beta, hp.g + k * hp.alpha, hp.h + sp) -
                         log_gamma_pdf(x.beta, hp.g + k * hp.alpha, hp.h + sp);
            double rhs = tempered(y) - tempered(x);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
        }
    }
}

TEST_CASE("gibbs sweeps on an empty dataset sample the prior") {
    GalaxyModel model;
    model.hyper.k = 2;
    model.hyper.alpha = 2.0;
    model.hyper.g = 3.0;
    model.hyper.h = 2.0;
    model.hyper.kappa = 0.25;
    model.hyper.xi = 5.0;

    RngStream rng(4096, 1);
    MixtureParamState x = initial_state(model, rng);
    const int sweeps = 150000;
    double mean_beta = 0.0, mean_prec = 0.0, mean_mu = 0.0, mean_w = 0.0;
    for (int t = 0; t < sweeps; ++t) {
        galaxy_gibbs_sweep(model, x, 1.0, rng);
        mean_beta += x.beta;
        mean_prec += x.prec[0];
        mean_mu += x.mu[0];
        mean_w += x.w[0];
    }
    mean_beta /= sweeps;
    mean_prec /= sweeps;
    mean_mu /= sweeps;
    mean_w /= sweeps;
    // prior moments: E beta = g/h = 1.5, E prec = alpha E[1/beta] = alpha h/(g-1) = 2,
    // E mu = xi, E w = 1/2
    CHECK(mean_beta == doctest::Approx(1.5).epsilon(0.03));
    CHECK(mean_prec == doctest::Approx(2.0).epsilon(0.05));
    CHECK(std::abs(mean_mu - 5.0) < 0.05);
    CHECK(std::abs(mean_w - 0.5) < 0.01);
}

TEST_CASE("equi-energy acceptance agrees with the two-route computation") {
    GalaxyModel model = small_model();
    auto x_i = random_state(model, 100);
    auto x_j = random_state(model, 200);
    RngStream rng(300, 2);
    galaxy_gibbs_sweep(model, x_i, 1.0, rng);
    galaxy_gibbs_sweep(model, x_j, 2.5, rng);

    for (auto [t_i, t_j] : std::vector<std::pair<double, double>>{{1.0, 1.3}, {1.6, 3.2}}) {
        double direct = galaxy_ee_acceptance(model, x_i, x_j, t_i, t_j);
        double cross = tempered_posterior_log(model, x_j, t_i) +
                       tempered_posterior_log(model, x_i, t_j) -
                       tempered_posterior_log(model, x_i, t_i) -
                       tempered_posterior_log(model, x_j, t_j);
        double expected = std::min(1.0, std::exp(cross));
        CHECK(direct == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("label modes rank sort permutations bijectively") {
    CHECK(label_mode_of({1.0, 2.0, 3.0}) == 1);
    CHECK(label_mode_of({3.0, 2.0, 1.0}) == 6);
    CHECK(label_mode_of({10.0}) == 1);

    std::vector<double> vals{1.0, 2.0, 3.0, 4.0};
    std::set<int> ranks;
    std::sort(vals.begin(), vals.end());
    do {
        int r = label_mode_of(vals);
        CHECK(r >= 1);
        CHECK(r <= 24);
        ranks.insert(r);
    } while (std::next_permutation(vals.begin(), vals.end()));
    CHECK(ranks.size() == 24);

    // ties broken by index: stable sort keeps the earlier component first
    CHECK(label_mode_of({5.0, 5.0, 1.0}) == label_mode_of({6.0, 7.0, 1.0}));
    CHECK_THROWS_AS((void)label_mode_of({}), config_error);
}

TEST_CASE("velocity file parsing") {
    namespace fs = std::filesystem;
    auto path = fs::temp_directory_path() / "pteem_test_velocities.txt";
    {
        std::ofstream out(path);
        out << "# header comment\n\n  9.17 \n10.4\n\n# mid comment\n33.0\n";
    }
    auto v = load_velocities(path.string());
    REQUIRE(v.size() == 3);
    CHECK(v[0] == doctest::Approx(9.17));
    CHECK(v[2] == doctest::Approx(33.0));
    {
        std::ofstream out(path);
        out << "12.0\nnot-a-number\n";
    }
    CHECK_THROWS((void)load_velocities(path.string()));
    fs::remove(path);
    CHECK_THROWS_AS((void)load_velocities(path.string()), run_error);
}

TEST_CASE("initial states have valid shapes") {
    GalaxyModel model = small_model();
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto x = random_state(model, seed);
        REQUIRE(x.mu.size() == 3);
        REQUIRE(x.prec.size() == 3);
        REQUIRE(x.w.size() == 3);
        REQUIRE(x.c.size() == model.data.size());
        CHECK(x.beta > 0.0);
        double wsum = 0.0;
        for (double w : x.w) wsum += w;
        CHECK(wsum == doctest::Approx(1.0));
        for (auto lab : x.c) CHECK(lab < 3);
        CHECK(std::isfinite(model.log_density(x)));
    }
}

TEST_CASE("gibbs kernel updates the slot and refuses truncation") {
    GalaxyModel model = small_model();
    GalaxyGibbsKernel kernel;
    ChainSlot<MixtureParamState> slot;
    slot.x = random_state(model, 77);
    ModelEval ev = model.evaluate(slot.x);
    slot.score = ev.score;
    slot.energy = ev.energy;
    RngStream rng(77, 3);
    CHECK(kernel.step(model, slot, 1.5, std::nullopt, rng));
    ModelEval after = model.evaluate(slot.x);
    CHECK(slot.score == doctest::Approx(after.score).epsilon(1e-12));
    CHECK(slot.energy == doctest::Approx(after.energy).epsilon(1e-12));
    CHECK_THROWS_AS((void)kernel.step(model, slot, 1.5, 100.0, rng), config_error);
}

TEST_CASE("default ladders for the velocity study") {
    auto t = default_temperatures();
    REQUIRE(t.size() == 20);
    CHECK(t[0] == 1.0);
    CHECK(t[19] == 4.0);
    auto e = default_energy_levels();
    REQUIRE(e.rings() == 5);
    CHECK(e.levels[0] == 180.0);
    CHECK(e.levels[4] == 260.0);
}

TEST_CASE("experiment driver end to end on a small synthetic file") {
    namespace fs = std::filesystem;
    auto path = fs::temp_directory_path() / "pteem_test_galaxy_data.txt";
    {
        std::ofstream out(path);
        for (double v : {9.2, 9.9, 10.3, 19.5, 20.1, 20.8, 21.2, 22.4, 23.1, 32.8, 33.9, 34.2})
            out << v << "\n";
    }
    GalaxyConfig config;
    config.runs = 2;
    config.burnin = 30;
    config.kept = 50;
    config.seed = 99;
    config.data_path = path.string();
    config.hyper.k = 3;

    int sink_calls = 0;
    auto summary = run_galaxy_experiment(config, [&](int run, const Trace<MixtureParamState>& t) {
        ++sink_calls;
        CHECK(run < 2);
        CHECK(t.samples.size() == 50);
        CHECK(t.n_chains == 20);
    });
    CHECK(sink_calls == 2);
    REQUIRE(summary.runs.size() == 2);
    for (const auto& r : summary.runs) {
        CHECK(r.visited_label_modes >= 1);
        CHECK(r.visited_label_modes <= 6);
        CHECK(r.exchange_acceptance >= 0.0);
        CHECK(r.exchange_acceptance <= 1.0);
    }

    auto bad = config;
    bad.algorithm = Algorithm::ees;
    CHECK_THROWS_AS((void)run_galaxy_experiment(bad), config_error);
    bad = config;
    bad.hyper.k = 9;
    CHECK_THROWS_AS((void)run_galaxy_experiment(bad), config_error);
    bad = config;
    bad.runs = 0;
    CHECK_THROWS_AS((void)run_galaxy_experiment(bad), config_error);
    fs::remove(path);
}
