#pragma once

// Target abstractions shared by every sampler.
//
// A model exposes three views of one unnormalized density pi~:
//   log_density(x)      log pi~(x), -inf off support
//   tempering_score(x)  the term raised to 1/T by the flattened family; for
//                       plain targets this is log_density itself, models that
//                       temper only part of the density (a likelihood, say)
//                       override it
//   energy(x)           h(x), the ring-assignment energy; for plain targets
//                       -log_density, possibly shifted by a documented
//                       convention constant
//
// Exchange acceptances only ever use tempering_score differences, ring
// bookkeeping only uses energy, so the two stay independent.

#include "pteem/errors.hpp"

#include <cmath>
#include <concepts>
#include <optional>
#include <string>

namespace pteem {

// Score and energy of one state, computed together because most models share
// nearly all the work between the two.
struct ModelEval {
    double score = 0.0;
    double energy = 0.0;
};

template <class M>
concept TargetModel = requires(const M& m, const typename M::State& x) {
    typename M::State;
    { m.log_density(x) } -> std::convertible_to<double>;
    { m.tempering_score(x) } -> std::convertible_to<double>;
    { m.energy(x) } -> std::convertible_to<double>;
    { m.evaluate(x) } -> std::convertible_to<ModelEval>;
    { m.describe(x) } -> std::convertible_to<std::string>;
};

// h(x) = -log pi~(x) with the NaN guard required of every energy evaluation.
template <class M>
double energy_of(const M& m, const typename M::State& x) {
    double h = m.energy(x);
    if (std::isnan(h)) throw run_error("energy evaluation produced NaN (" + m.describe(x) + ")");
    return h;
}

// One member of the flattened family pi^{1/T}, optionally energy-truncated:
// log density is score/T without truncation and -max{h(x), H}/T with it.
template <class M>
struct TemperedDensity {
    const M* base = nullptr;
    double temperature = 1.0;
    std::optional<double> truncation;

    TemperedDensity(const M& m, double T, std::optional<double> H = std::nullopt)
        : base(&m), temperature(T), truncation(H) {
        if (!(T >= 1.0)) throw config_error("temperature must be >= 1");
    }

    double log_density(const typename M::State& x) const {
        if (truncation) {
            double h = energy_of(*base, x);
            return -std::max(h, *truncation) / temperature;
        }
        return base->tempering_score(x) / temperature;
    }
};

} // namespace pteem
