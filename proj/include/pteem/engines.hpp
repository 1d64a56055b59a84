#pragma once

// The three population samplers.
//
// PT      N chains targeting pi^{1/T_i}; each iteration does one local move
//         per chain followed by one proposed swap of a uniformly chosen
//         adjacent pair.
//
// PTEEM   same population, but the global move is ring-driven: among energy
//         rings currently holding at least two chains one is chosen uniformly,
//         two distinct chains are chosen uniformly inside it, and the swap is
//         accepted with min{1, exp[(1/T_i - 1/T_k)(score_k - score_i)]}.
//         If no ring holds two chains the move is skipped and logged.
//
// EES     K chains with truncated-tempered targets exp(-max{h, H_i}/T_i),
//         run sequentially from the hottest chain down.  Every chain files its
//         post-burn-in states into per-ring stores; a colder chain proposes,
//         with probability p_ee, an equi-energy jump drawn uniformly from the
//         donor chain's store for the ring of its current state (falling back
//         to a local move when that store is empty).
//
// The local phase of PT/PTEEM is data-parallel: chains only touch their own
// slot and their own random stream, so the loop runs identically serial or
// under OpenMP (options.threads selects; 1 = serial reference path).

#include "pteem/kernels.hpp"
#include "pteem/ladder.hpp"
#include "pteem/model.hpp"
#include "pteem/rng.hpp"
#include "pteem/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pteem {

enum class Algorithm { pt, pteem, ees };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::pt: return "pt";
    case Algorithm::pteem: return "pteem";
    default: return "ees";
    }
}

// ---------------------------------------------------------------------------
// Move accounting (the budget figures reported in run manifests).

struct MoveBudget {
    double local = 0.0;
    double global = 0.0;
};

// PT/PTEEM: local = N(M+B), global = M+B.
// EES, as printed: local = K(B+R) + (M-R)
//                          + (1-p)[K(K-1)/2 (B+R) + (K-1)(M-R)],
//                  global = p[K(K-1)/2 (B+R) + (K-1)(M-R)].
MoveBudget move_budget(Algorithm alg, long long burnin, long long ring_init, long long kept,
                       int chains, double p_ee);

// The worked example accompanying the formulas substitutes M for (M-R) in the
// late terms; that reading is reported alongside the printed one.
MoveBudget move_budget_ees_example(long long burnin, long long ring_init, long long kept,
                                   int chains, double p_ee);

// ---------------------------------------------------------------------------
// Shared pieces.

template <class State>
struct ChainSlot {
    State x{};
    double score = 0.0;  // tempering score, cached
    double energy = 0.0; // ring energy, cached
    int ring = 1;
};

namespace detail {

template <class Model, class Kernel, class State>
void local_phase(const Model& model, const Kernel& kernel, std::vector<ChainSlot<State>>& slots,
                 const std::vector<double>& temperatures, std::vector<RngStream>& chain_rng,
                 std::vector<unsigned char>& accepted, int threads) {
    int n = static_cast<int>(slots.size());
    if (threads > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
        for (int i = 0; i < n; ++i)
            accepted[i] = kernel.step(model, slots[i], temperatures[i], std::nullopt, chain_rng[i])
                              ? 1
                              : 0;
#else
        for (int i = 0; i < n; ++i)
            accepted[i] = kernel.step(model, slots[i], temperatures[i], std::nullopt, chain_rng[i])
                              ? 1
                              : 0;
#endif
    } else {
        for (int i = 0; i < n; ++i)
            accepted[i] = kernel.step(model, slots[i], temperatures[i], std::nullopt, chain_rng[i])
                              ? 1
                              : 0;
    }
}

// min{1, exp[(1/T_i - 1/T_k)(score_k - score_i)]} as a log ratio; the
// zero-density convention maps a NaN (both scores -inf) to rejection.
inline double swap_log_ratio(double t_i, double t_k, double score_i, double score_k) {
    double ratio = (1.0 / t_i - 1.0 / t_k) * (score_k - score_i);
    if (std::isnan(ratio)) return -HUGE_VAL;
    return ratio;
}

template <class State>
void swap_slots(ChainSlot<State>& a, ChainSlot<State>& b) {
    std::swap(a.x, b.x);
    std::swap(a.score, b.score);
    std::swap(a.energy, b.energy);
    std::swap(a.ring, b.ring);
}

} // namespace detail

// ---------------------------------------------------------------------------
// PT / PTEEM.

struct PopulationOptions {
    TemperatureLadder temperatures;
    EnergyLadder rings;           // required for PTEEM; optional for PT (diagnostics only)
    bool use_rings = false;       // set by run_pteem
    long long burnin = 0;
    long long kept = 0;
    std::uint64_t seed = 0;
    int threads = 1;
    std::vector<int> scatter_chains; // extra chains recorded for plot data
};

template <TargetModel Model, class Kernel>
Trace<typename Model::State> run_population(const Model& model, const Kernel& kernel,
                                            Algorithm alg, const PopulationOptions& options,
                                            std::vector<typename Model::State> init) {
    using State = typename Model::State;
    const int n = options.temperatures.size();
    if (static_cast<int>(init.size()) != n)
        throw config_error("population engine: need one initial state per chain");
    if (options.burnin <= 0 || options.kept <= 0)
        throw config_error("population engine: burnin and kept iteration counts must be positive");
    const bool ring_driven = alg == Algorithm::pteem;
    if (ring_driven && options.rings.rings() < 2)
        throw config_error("ring-driven exchange needs an energy ladder with at least 2 levels");
    const bool track_rings = ring_driven || (options.use_rings && options.rings.rings() >= 2);

    std::vector<ChainSlot<State>> slots(n);
    for (int i = 0; i < n; ++i) {
        slots[i].x = std::move(init[i]);
        ModelEval ev = model.evaluate(slots[i].x);
        slots[i].score = ev.score;
        slots[i].energy = ev.energy;
        if (track_rings) slots[i].ring = ring_index(options.rings, slots[i].energy);
    }

    std::vector<RngStream> chain_rng;
    chain_rng.reserve(n);
    for (int i = 0; i < n; ++i) chain_rng.emplace_back(options.seed, chain_stream(i));
    RngStream exch_rng(options.seed, kExchangeStream);

    Trace<State> trace;
    trace.n_chains = n;
    trace.n_rings = track_rings ? options.rings.rings() : 0;
    trace.burnin = options.burnin;
    trace.kept = options.kept;
    trace.seed = options.seed;
    trace.local_total.assign(n, {});
    trace.local_kept.assign(n, {});
    trace.samples.reserve(static_cast<std::size_t>(options.kept));
    trace.scatter_chains = options.scatter_chains;
    trace.scatter.assign(trace.scatter_chains.size(), {});
    if (track_rings) trace.rings_record.reserve(static_cast<std::size_t>(options.kept));

    std::vector<unsigned char> accepted(n, 0);
    std::vector<int> eligible_rings;
    std::vector<std::vector<int>> ring_members(track_rings ? options.rings.rings() : 0);

    const long long total = options.burnin + options.kept;
    for (long long t = 0; t < total; ++t) {
        detail::local_phase(model, kernel, slots, options.temperatures.temperatures, chain_rng,
                            accepted, options.threads);
        const bool keep = t >= options.burnin;
        for (int i = 0; i < n; ++i) {
            ++trace.local_total[i].proposed;
            trace.local_total[i].accepted += accepted[i];
            if (keep) {
                ++trace.local_kept[i].proposed;
                trace.local_kept[i].accepted += accepted[i];
            }
            if (track_rings) slots[i].ring = ring_index(options.rings, slots[i].energy);
        }

        ExchangeEvent event;
        event.iteration = t;
        if (ring_driven) {
            event.kind = MoveKind::exchange;
            for (auto& members : ring_members) members.clear();
            for (int i = 0; i < n; ++i)
                if (std::isfinite(slots[i].energy)) ring_members[slots[i].ring - 1].push_back(i);
            eligible_rings.clear();
            for (int j = 0; j < static_cast<int>(ring_members.size()); ++j)
                if (ring_members[j].size() >= 2) eligible_rings.push_back(j);
            if (eligible_rings.empty()) {
                event.proposed = false; // skipped, still logged
            } else {
                int ring = eligible_rings[exch_rng.uniform_int(static_cast<int>(eligible_rings.size()))];
                const auto& members = ring_members[ring];
                int c = static_cast<int>(members.size());
                int a = exch_rng.uniform_int(c);
                int b = exch_rng.uniform_int(c - 1);
                if (b >= a) ++b;
                int i = std::min(members[a], members[b]);
                int k = std::max(members[a], members[b]);
                double log_ratio = detail::swap_log_ratio(options.temperatures[i],
                                                          options.temperatures[k], slots[i].score,
                                                          slots[k].score);
                bool ok = std::log(exch_rng.uniform01()) < log_ratio;
                if (ok) detail::swap_slots(slots[i], slots[k]);
                event.proposed = true;
                event.accepted = ok;
                event.chain_i = i + 1;
                event.chain_k = k + 1;
                event.ring = ring + 1;
            }
        } else if (n < 2) {
            event.kind = MoveKind::swap;
            event.proposed = false; // single chain: nothing to swap, still logged
        } else {
            event.kind = MoveKind::swap;
            int i = exch_rng.uniform_int(n - 1);
            int k = i + 1;
            double log_ratio = detail::swap_log_ratio(options.temperatures[i],
                                                      options.temperatures[k], slots[i].score,
                                                      slots[k].score);
            bool ok = std::log(exch_rng.uniform01()) < log_ratio;
            if (ok) detail::swap_slots(slots[i], slots[k]);
            event.proposed = true;
            event.accepted = ok;
            event.chain_i = i + 1;
            event.chain_k = k + 1;
        }
        trace.events.push_back(event);

        if (keep) {
            trace.samples.push_back(slots[0].x);
            for (std::size_t s = 0; s < trace.scatter_chains.size(); ++s)
                trace.scatter[s].push_back(slots[trace.scatter_chains[s] - 1].x);
            if (track_rings) {
                std::vector<int> row(n);
                for (int i = 0; i < n; ++i) row[i] = slots[i].ring;
                trace.rings_record.push_back(std::move(row));
            }
        }
    }
    return trace;
}

template <TargetModel Model, class Kernel>
Trace<typename Model::State> run_pteem(const Model& model, const Kernel& kernel,
                                       PopulationOptions options,
                                       std::vector<typename Model::State> init) {
    options.use_rings = true;
    return run_population(model, kernel, Algorithm::pteem, options, std::move(init));
}

template <TargetModel Model, class Kernel>
Trace<typename Model::State> run_pt(const Model& model, const Kernel& kernel,
                                    const PopulationOptions& options,
                                    std::vector<typename Model::State> init) {
    return run_population(model, kernel, Algorithm::pt, options, std::move(init));
}

// ---------------------------------------------------------------------------
// EES.

struct EesOptions {
    std::vector<double> temperatures; // T_1 = 1 < ... < T_K
    EnergyLadder levels;              // exactly K levels; H_1 doubles as chain 1's truncation
    double p_ee = 0.1;
    long long burnin = 0;    // B
    long long ring_init = 0; // R
    long long kept = 0;      // M (chain 1 keeps its last M states)
    std::uint64_t seed = 0;
};

// Kernel sets route each chain to its local move (the motif sampler uses a
// Gibbs sweep on chain 1 and an independence move above it; continuous models
// use the random-walk kernel everywhere).
template <TargetModel Model, class KernelSet>
Trace<typename Model::State> run_ees(const Model& model, const KernelSet& kernels,
                                     const EesOptions& options,
                                     std::vector<typename Model::State> init) {
    using State = typename Model::State;
    const int K = static_cast<int>(options.temperatures.size());
    if (K < 2) throw config_error("equi-energy sampler: need at least 2 chains");
    if (options.levels.rings() != K)
        throw config_error("equi-energy sampler: need exactly one energy level per chain");
    if (static_cast<int>(init.size()) != K)
        throw config_error("equi-energy sampler: need one initial state per chain");
    if (options.burnin <= 0 || options.ring_init <= 0 || options.kept <= 0)
        throw config_error("equi-energy sampler: burnin, ring_init and kept must be positive");
    if (!(options.p_ee > 0.0) || !(options.p_ee < 1.0))
        throw config_error("equi-energy sampler: jump probability must lie in (0, 1)");
    if (options.temperatures.front() != 1.0)
        throw config_error("equi-energy sampler: first chain must run at T = 1");
    for (int i = 1; i < K; ++i)
        if (!(options.temperatures[i] > options.temperatures[i - 1]))
            throw config_error("equi-energy sampler: temperatures must increase");

    struct Stored {
        State x;
        double score;
        double energy;
    };

    Trace<State> trace;
    trace.n_chains = K;
    trace.n_rings = K;
    trace.burnin = options.burnin;
    trace.kept = options.kept;
    trace.seed = options.seed;
    trace.local_total.assign(K, {});
    trace.local_kept.assign(K, {});
    trace.samples.reserve(static_cast<std::size_t>(options.kept));

    // Per-chain ring occupancy accumulated directly (the chains do not run in
    // lockstep, so there is no joint per-iteration record).
    std::vector<std::vector<long long>> occupancy(K, std::vector<long long>(K, 0));

    const long long total = options.burnin + options.ring_init + options.kept;
    std::vector<std::vector<Stored>> donor_rings; // ring stores of chain idx+1
    std::vector<std::vector<Stored>> own_rings(K);

    for (int idx = K - 1; idx >= 0; --idx) { // hottest chain first
        RngStream rng(options.seed, chain_stream(idx));
        double T = options.temperatures[idx];
        double H = options.levels.levels[idx];
        double H_donor = idx + 1 < K ? options.levels.levels[idx + 1] : 0.0;
        double T_donor = idx + 1 < K ? options.temperatures[idx + 1] : 1.0;
        const bool has_donor = idx + 1 < K;

        ChainSlot<State> slot;
        slot.x = init[idx];
        ModelEval ev = model.evaluate(slot.x);
        slot.score = ev.score;
        slot.energy = ev.energy;

        for (int j = 0; j < K; ++j) own_rings[j].clear();

        for (long long t = 0; t < total; ++t) {
            bool jumped = false;
            if (has_donor && rng.uniform01() < options.p_ee) {
                int ring = ring_index(options.levels, slot.energy);
                const auto& store = donor_rings[ring - 1];
                if (store.empty()) {
                    ++trace.jump_fallbacks;
                } else {
                    jumped = true;
                    const Stored& y = store[rng.uniform_int(static_cast<int>(store.size()))];
                    double log_ratio =
                        (std::max(slot.energy, H) - std::max(y.energy, H)) / T +
                        (std::max(y.energy, H_donor) - std::max(slot.energy, H_donor)) / T_donor;
                    if (std::isnan(log_ratio)) log_ratio = -HUGE_VAL;
                    bool ok = std::log(rng.uniform01()) < log_ratio;
                    ExchangeEvent event;
                    event.iteration = t;
                    event.kind = MoveKind::jump;
                    event.proposed = true;
                    event.accepted = ok;
                    event.chain_i = idx + 1;
                    event.chain_k = idx + 2;
                    event.ring = ring;
                    trace.events.push_back(event);
                    if (ok) {
                        slot.x = y.x;
                        slot.score = y.score;
                        slot.energy = y.energy;
                    }
                }
            }
            if (!jumped) {
                bool accepted = kernels.step(idx, model, slot, T, H, rng);
                ++trace.local_total[idx].proposed;
                trace.local_total[idx].accepted += accepted ? 1 : 0;
                if (t >= options.burnin) {
                    ++trace.local_kept[idx].proposed;
                    trace.local_kept[idx].accepted += accepted ? 1 : 0;
                }
            }
            if (t >= options.burnin) {
                int ring = ring_index(options.levels, slot.energy);
                ++occupancy[idx][ring - 1];
                if (std::isfinite(slot.energy))
                    own_rings[ring - 1].push_back({slot.x, slot.score, slot.energy});
                if (idx == 0 && t >= options.burnin + options.ring_init)
                    trace.samples.push_back(slot.x);
            }
        }
        donor_rings = std::move(own_rings);
        own_rings.assign(K, {});
    }

    // The chains do not run in lockstep, so there is no joint per-iteration
    // ring record; the accumulated table is published directly.
    trace.precomputed_occupancy = std::move(occupancy);
    return trace;
}

// Occupancy table of any trace: per-iteration records when present (PT/PTEEM),
// otherwise the table the sequential sampler accumulated.
template <class State>
std::vector<std::vector<long long>> trace_occupancy(const Trace<State>& trace) {
    if (!trace.rings_record.empty())
        return occupancy_table(trace.rings_record, trace.n_chains, trace.n_rings);
    if (!trace.precomputed_occupancy.empty()) return trace.precomputed_occupancy;
    throw run_error("trace carries no ring occupancy information");
}

} // namespace pteem
