#include "pteem/ladder.hpp"

#include "pteem/csv.hpp"
#include "pteem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace pteem {

TemperatureLadder build_temperature_ladder(double t_max, int n, TemperatureScheme scheme) {
    if (!(t_max > 1.0)) throw config_error("temperature ladder: t_max must exceed 1");
    if (n < 2) throw config_error("temperature ladder: need at least 2 chains");
    TemperatureLadder ladder;
    ladder.scheme = scheme;
    ladder.temperatures.resize(n);
    for (int i = 0; i < n; ++i) {
        double frac = static_cast<double>(i) / (n - 1);
        switch (scheme) {
        case TemperatureScheme::log_even:
            ladder.temperatures[i] = std::pow(t_max, frac);
            break;
        case TemperatureScheme::inverse_even:
            ladder.temperatures[i] = 1.0 / (1.0 - frac * (1.0 - 1.0 / t_max));
            break;
        case TemperatureScheme::inverse_geometric:
            ladder.temperatures[i] = 1.0 / std::pow(t_max, -frac);
            break;
        }
    }
    ladder.temperatures.front() = 1.0; // exact endpoints, no fp drift
    ladder.temperatures.back() = t_max;
    for (int i = 1; i < n; ++i)
        if (!(ladder.temperatures[i] > ladder.temperatures[i - 1]))
            throw config_error("temperature ladder is not strictly increasing");
    return ladder;
}

TemperatureLadder temperature_ladder_from(std::vector<double> temperatures) {
    if (temperatures.size() < 2) throw config_error("temperature ladder: need at least 2 chains");
    if (temperatures.front() != 1.0) throw config_error("temperature ladder must start at T = 1");
    for (std::size_t i = 1; i < temperatures.size(); ++i)
        if (!(temperatures[i] > temperatures[i - 1]))
            throw config_error("temperature ladder is not strictly increasing");
    TemperatureLadder ladder;
    ladder.temperatures = std::move(temperatures);
    return ladder;
}

EnergyLadder build_energy_ladder(double h1, double hd, int d, EnergyScheme scheme) {
    if (!(h1 > 0.0) || !(hd > h1)) throw config_error("energy ladder: need 0 < h1 < hd");
    if (d < 2) throw config_error("energy ladder: need at least 2 levels");
    EnergyLadder ladder;
    ladder.levels.resize(d);
    if (scheme == EnergyScheme::log_levels) {
        double ratio = hd / h1;
        for (int j = 0; j < d; ++j)
            ladder.levels[j] = h1 * std::pow(ratio, static_cast<double>(j) / (d - 1));
    } else {
        // Increments geometric; ratio tied to the endpoint span, r^{d-1} = hd/h1,
        // so consecutive gaps grow at the same rate a log-even ladder's levels do.
        ladder.levels[0] = h1;
        if (d == 2) {
            ladder.levels[1] = hd;
        } else {
            double r = std::pow(hd / h1, 1.0 / (d - 1));
            double unit = 0.0;
            for (int j = 0; j < d - 1; ++j) unit += std::pow(r, j);
            double g1 = (hd - h1) / unit;
            for (int j = 1; j < d; ++j)
                ladder.levels[j] = ladder.levels[j - 1] + g1 * std::pow(r, j - 1);
        }
    }
    ladder.levels.front() = h1;
    ladder.levels.back() = hd;
    for (int j = 1; j < d; ++j)
        if (!(ladder.levels[j] > ladder.levels[j - 1]))
            throw config_error("energy ladder is not strictly increasing");
    return ladder;
}

EnergyLadder energy_ladder_from(std::vector<double> levels) {
    if (levels.size() < 2) throw config_error("energy ladder: need at least 2 levels");
    for (std::size_t j = 1; j < levels.size(); ++j)
        if (!(levels[j] > levels[j - 1]))
            throw config_error("energy ladder is not strictly increasing");
    EnergyLadder ladder;
    ladder.levels = std::move(levels);
    return ladder;
}

int ring_index(const EnergyLadder& ladder, double h) {
    if (std::isnan(h)) throw run_error("ring_index: energy is NaN");
    int d = ladder.rings();
    if (h == HUGE_VAL) return d;
    // First ring is everything below H_2; upper_bound over H_2..H_d.
    int ring = 1;
    for (int j = 1; j < d; ++j) {
        if (h >= ladder.levels[j])
            ring = j + 1;
        else
            break;
    }
    return ring;
}

std::vector<std::vector<long long>>
occupancy_table(const std::vector<std::vector<int>>& rings_record, int n_chains, int n_rings) {
    if (rings_record.empty()) throw run_error("occupancy_table: empty trace");
    std::vector<std::vector<long long>> table(n_chains, std::vector<long long>(n_rings, 0));
    for (const auto& row : rings_record) {
        if (static_cast<int>(row.size()) != n_chains)
            throw run_error("occupancy_table: ring record row width mismatch");
        for (int c = 0; c < n_chains; ++c) {
            int r = row[c];
            if (r < 1 || r > n_rings) throw run_error("occupancy_table: ring index out of range");
            ++table[c][r - 1];
        }
    }
    return table;
}

RepartitionDiagnosis check_repartition(const std::vector<std::vector<long long>>& table) {
    RepartitionDiagnosis diag;
    if (table.size() < 2) return diag;
    const double kMinOverlap = 0.01;
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        const auto& u = table[i];
        const auto& v = table[i + 1];
        if (u.size() != v.size()) throw run_error("check_repartition: ragged table");
        long long su = 0, sv = 0;
        for (long long x : u) su += x;
        for (long long x : v) sv += x;
        if (su == 0 || sv == 0) throw run_error("check_repartition: empty chain row");
        bool shared = false;
        double overlap = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            if (u[j] > 0 && v[j] > 0) shared = true;
            overlap += std::min(static_cast<double>(u[j]) / su, static_cast<double>(v[j]) / sv);
        }
        if (!shared || overlap < kMinOverlap) {
            RepartitionFinding f;
            f.chain_low = static_cast<int>(i) + 1;
            f.gap = !shared;
            f.overlap = overlap;
            diag.findings.push_back(f);
            diag.ok = false;
        }
    }
    return diag;
}

std::optional<std::string> chain_count_warning(int n_chains, int n_rings) {
    if (n_chains >= 3 * n_rings) return std::nullopt;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "warning: %d chains for %d rings; at least %d chains (3 per ring) are advised",
                  n_chains, n_rings, 3 * n_rings);
    return std::string(buf);
}

std::string ring_label(const EnergyLadder& ladder, int ring) {
    char buf[96];
    int d = ladder.rings();
    if (ring == 1)
        std::snprintf(buf, sizeof buf, "(-inf;%g)", ladder.levels[1]);
    else if (ring == d)
        std::snprintf(buf, sizeof buf, "[%g;+inf)", ladder.levels[d - 1]);
    else
        std::snprintf(buf, sizeof buf, "[%g;%g)", ladder.levels[ring - 1], ladder.levels[ring]);
    return buf;
}

void write_occupancy_csv(const std::string& path, const EnergyLadder& ladder,
                         const std::vector<std::vector<long long>>& table) {
    CsvTable csv;
    csv.header.push_back("chain");
    for (int j = 1; j <= ladder.rings(); ++j) csv.header.push_back(ring_label(ladder, j));
    for (std::size_t c = 0; c < table.size(); ++c) {
        std::vector<std::string> row;
        row.push_back(fmt_int(static_cast<long long>(c) + 1));
        for (long long count : table[c]) row.push_back(fmt_int(count));
        csv.rows.push_back(std::move(row));
    }
    write_csv(path, csv);
}

std::vector<std::vector<long long>> read_occupancy_csv(const std::string& path) {
    CsvTable csv = read_csv(path);
    std::vector<std::vector<long long>> table;
    for (const auto& row : csv.rows) {
        std::vector<long long> counts;
        for (std::size_t j = 1; j < row.size(); ++j) counts.push_back(parse_int(row[j]));
        table.push_back(std::move(counts));
    }
    return table;
}

} // namespace pteem
