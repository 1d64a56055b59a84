#pragma once

// What a run records.  The trace is deliberately plain data: samples of the
// target chain, per-iteration ring assignments, every global-move event, and
// acceptance counters.  Everything downstream (occupancy tables, exchange
// matrices, CSV files, summary statistics) is derived from it.

#include "pteem/csv.hpp"
#include "pteem/errors.hpp"
#include "pteem/ladder.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pteem {

enum class MoveKind : std::uint8_t { exchange, swap, jump };

inline const char* move_kind_name(MoveKind k) {
    switch (k) {
    case MoveKind::exchange: return "exchange";
    case MoveKind::swap: return "swap";
    default: return "jump";
    }
}

struct ExchangeEvent {
    long long iteration = 0; // 0-based engine iteration
    MoveKind kind = MoveKind::exchange;
    int chain_i = 0; // 1-based; 0 when the move was skipped
    int chain_k = 0;
    int ring = 0;    // 1-based ring of the proposal; 0 when not ring-driven
    bool proposed = false; // false = skipped (no eligible ring / empty donor ring)
    bool accepted = false;
};

struct ChainCounters {
    long long proposed = 0;
    long long accepted = 0;
};

template <class State>
struct Trace {
    int n_chains = 0;
    int n_rings = 0; // 0 when the run carries no energy ladder (plain PT)
    long long burnin = 0;
    long long kept = 0;
    std::uint64_t seed = 0;

    std::vector<State> samples; // chain 1, post burn-in
    std::vector<int> scatter_chains; // 1-based chains mirrored for plot data
    std::vector<std::vector<State>> scatter; // one series per scatter chain

    std::vector<std::vector<int>> rings_record; // [kept iteration][chain] -> ring

    // Filled by the sequential sampler instead of rings_record (its chains do
    // not share iteration indices).
    std::vector<std::vector<long long>> precomputed_occupancy;

    std::vector<ExchangeEvent> events; // all iterations, burn-in included

    // Local-move counters; *_kept covers post-burn-in iterations only.
    std::vector<ChainCounters> local_total;
    std::vector<ChainCounters> local_kept;

    long long jump_fallbacks = 0; // equi-energy jumps skipped on empty rings
};

// Acceptance of local moves pooled over chains (post burn-in).
template <class State>
double local_acceptance(const Trace<State>& trace) {
    long long prop = 0, acc = 0;
    for (const auto& c : trace.local_kept) {
        prop += c.proposed;
        acc += c.accepted;
    }
    return prop ? static_cast<double>(acc) / static_cast<double>(prop) : 0.0;
}

// Acceptance of global moves among the ones actually proposed (post burn-in).
template <class State>
double exchange_acceptance(const Trace<State>& trace) {
    long long prop = 0, acc = 0;
    for (const auto& e : trace.events) {
        if (e.iteration < trace.burnin || !e.proposed) continue;
        ++prop;
        if (e.accepted) ++acc;
    }
    return prop ? static_cast<double>(acc) / static_cast<double>(prop) : 0.0;
}

// Row i: percentage split of chain (i+1)'s accepted global moves by partner
// chain.  Rows with no accepted moves stay all-zero.
template <class State>
std::vector<std::vector<double>> exchange_matrix(const Trace<State>& trace) {
    int n = trace.n_chains;
    std::vector<std::vector<double>> counts(n, std::vector<double>(n, 0.0));
    for (const auto& e : trace.events) {
        if (!e.accepted || e.iteration < trace.burnin) continue;
        counts[e.chain_i - 1][e.chain_k - 1] += 1.0;
        counts[e.chain_k - 1][e.chain_i - 1] += 1.0;
    }
    for (int i = 0; i < n; ++i) {
        double total = 0.0;
        for (double v : counts[i]) total += v;
        if (total > 0.0)
            for (double& v : counts[i]) v = 100.0 * v / total;
    }
    return counts;
}

void write_exchange_matrix_csv(const std::string& path, const std::vector<std::vector<double>>& m);
std::vector<std::vector<double>> read_exchange_matrix_csv(const std::string& path);

void write_events_csv(const std::string& path, const std::vector<ExchangeEvent>& events);
std::vector<ExchangeEvent> read_events_csv(const std::string& path);

template <class State>
void write_rings_csv(const std::string& path, const Trace<State>& trace) {
    CsvTable csv;
    csv.header.push_back("iteration");
    for (int c = 1; c <= trace.n_chains; ++c) csv.header.push_back("chain" + std::to_string(c));
    for (std::size_t t = 0; t < trace.rings_record.size(); ++t) {
        std::vector<std::string> row;
        row.push_back(fmt_int(trace.burnin + static_cast<long long>(t)));
        for (int r : trace.rings_record[t]) row.push_back(fmt_int(r));
        csv.rows.push_back(std::move(row));
    }
    write_csv(path, csv);
}

std::vector<std::vector<int>> read_rings_csv(const std::string& path, int* n_chains_out = nullptr);

// Samples are serialized through a codec so each experiment controls its
// column layout: codec.header() names the columns, codec.row(state) renders
// one state.
template <class State, class Codec>
void write_samples_csv(const std::string& path, const Trace<State>& trace, const Codec& codec) {
    CsvTable csv;
    csv.header.push_back("iteration");
    for (const auto& name : codec.header()) csv.header.push_back(name);
    for (std::size_t t = 0; t < trace.samples.size(); ++t) {
        std::vector<std::string> row;
        row.push_back(fmt_int(trace.burnin + static_cast<long long>(t)));
        for (const auto& field : codec.row(trace.samples[t])) row.push_back(field);
        csv.rows.push_back(std::move(row));
    }
    write_csv(path, csv);
}

template <class State, class Codec>
void write_scatter_csv(const std::string& path, const Trace<State>& trace, const Codec& codec) {
    CsvTable csv;
    csv.header.push_back("iteration");
    csv.header.push_back("chain");
    for (const auto& name : codec.header()) csv.header.push_back(name);
    for (std::size_t s = 0; s < trace.scatter_chains.size(); ++s) {
        for (std::size_t t = 0; t < trace.scatter[s].size(); ++t) {
            std::vector<std::string> row;
            row.push_back(fmt_int(trace.burnin + static_cast<long long>(t)));
            row.push_back(fmt_int(trace.scatter_chains[s]));
            for (const auto& field : codec.row(trace.scatter[s][t])) row.push_back(field);
            csv.rows.push_back(std::move(row));
        }
    }
    write_csv(path, csv);
}

} // namespace pteem
