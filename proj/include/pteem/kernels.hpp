#pragma once

// Local move kernels.  The random-walk Metropolis step is the shared
// workhorse; Gibbs sweeps are model-specific and live with their experiment
// (they satisfy the same kernel shape: update one chain in place at its
// temperature and report acceptance).

#include "pteem/model.hpp"
#include "pteem/rng.hpp"

#include <cmath>
#include <optional>

namespace pteem {

// Proposal spread tied to the chain temperature: tau_i = 0.25 * sqrt(T_i).
inline double rw_proposal_scale(double temperature) { return 0.25 * std::sqrt(temperature); }

struct RWProposal {
    double scale = 0.25;
};

// One random-walk MH update of x against an arbitrary log density.
// log_x caches log_density(x) and is kept in sync.  Acceptance is
// min{1, exp(l(y) - l(x))}; a -inf proposal is always rejected, and two
// -inf values reject as well (the zero-density convention).
template <class State, class LogDensity>
bool rw_mh_step(State& x, double& log_x, const LogDensity& log_density, const RWProposal& proposal,
                RngStream& rng) {
    State y = x;
    for (auto& coord : y) coord += proposal.scale * rng.normal();
    double log_y = log_density(y);
    if (std::isnan(log_y)) throw run_error("rw_mh_step: proposal log-density is NaN");
    double logu = std::log(rng.uniform01());
    bool accept;
    if (log_y == -HUGE_VAL)
        accept = false;
    else if (log_x == -HUGE_VAL)
        accept = true;
    else
        accept = logu < log_y - log_x;
    if (accept) {
        x = y;
        log_x = log_y;
    }
    return accept;
}

// Engine-facing adapter: random-walk MH against the powered family pi^{1/T}
// or, when a truncation level is given, against the energy-truncated version
// exp(-max{h, H}/T).  Works for any model whose state is a mutable range of
// doubles.
template <TargetModel Model>
struct RwKernel {
    double scale_base = 0.25;

    template <class Slot>
    bool step(const Model& model, Slot& slot, double temperature, std::optional<double> truncation,
              RngStream& rng) const {
        double scale = scale_base * std::sqrt(temperature);
        auto y = slot.x;
        for (auto& coord : y) coord += scale * rng.normal();
        ModelEval ev = model.evaluate(y);
        if (std::isnan(ev.score) || std::isnan(ev.energy))
            throw run_error("rw step: evaluation produced NaN (" + model.describe(y) + ")");
        double log_ratio;
        if (truncation)
            log_ratio = (std::max(slot.energy, *truncation) - std::max(ev.energy, *truncation)) /
                        temperature;
        else
            log_ratio = (ev.score - slot.score) / temperature;
        double logu = std::log(rng.uniform01());
        if (std::isnan(log_ratio)) log_ratio = -HUGE_VAL; // both sides at zero density
        if (logu < log_ratio) {
            slot.x = y;
            slot.score = ev.score;
            slot.energy = ev.energy;
            return true;
        }
        return false;
    }
};

} // namespace pteem
