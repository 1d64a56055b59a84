#pragma once

// Temperature and energy ladders plus the ring bookkeeping built on them.
//
// Energy levels H_1 < ... < H_d (H_{d+1} = +inf implicit) induce d rings:
//   D_1 = (-inf, H_2),  D_j = [H_j, H_{j+1}) for 2 <= j <= d.
// Note that H_1 never acts as a boundary; it documents the low end of the
// scale (and the truncation level of the coldest chain in the equi-energy
// sampler).

#include <optional>
#include <string>
#include <vector>

namespace pteem {

enum class TemperatureScheme { log_even, inverse_even, inverse_geometric };
enum class EnergyScheme { log_levels, log_increments };

struct TemperatureLadder {
    std::vector<double> temperatures; // T_1 = 1 < ... < T_n = t_max
    TemperatureScheme scheme = TemperatureScheme::log_even;

    int size() const { return static_cast<int>(temperatures.size()); }
    double operator[](int i) const { return temperatures[i]; } // 0-based
};

struct EnergyLadder {
    std::vector<double> levels; // H_1 < ... < H_d

    int rings() const { return static_cast<int>(levels.size()); }
};

TemperatureLadder build_temperature_ladder(double t_max, int n, TemperatureScheme scheme);
EnergyLadder build_energy_ladder(double h1, double hd, int d, EnergyScheme scheme);

// Explicit ladders (validated) for configs given as literal lists.
TemperatureLadder temperature_ladder_from(std::vector<double> temperatures);
EnergyLadder energy_ladder_from(std::vector<double> levels);

// 1-based ring of an energy value.  +inf maps to ring d (bookkeeping
// convention; such states are excluded from exchange proposals upstream),
// -inf to ring 1.  NaN is an error.
int ring_index(const EnergyLadder& ladder, double h);

// Counts[chain][ring]: how many recorded iterations chain n spent in ring j.
// rings_record is iteration-major (record[t][chain] = 1-based ring).
std::vector<std::vector<long long>>
occupancy_table(const std::vector<std::vector<int>>& rings_record, int n_chains, int n_rings);

struct RepartitionFinding {
    int chain_low = 0;  // 1-based index of the colder chain of the pair
    bool gap = false;   // no ring occupied by both chains at all
    double overlap = 0.0; // sum_j min of the two row-normalized masses
};

struct RepartitionDiagnosis {
    bool ok = true;                        // no gaps and no low-overlap pairs
    std::vector<RepartitionFinding> findings; // one entry per flagged adjacent pair
};

// A healthy ladder has every adjacent chain pair sharing noticeable mass in
// some ring.  A pair sharing no ring is reported as an energy gap; a pair
// whose shared mass is below 1% is reported as a warning.
RepartitionDiagnosis check_repartition(const std::vector<std::vector<long long>>& table);

// Advice from the chain-count guidance (at least three chains per ring).
std::optional<std::string> chain_count_warning(int n_chains, int n_rings);

// CSV serialization (fixed headers; counts as integers).
void write_occupancy_csv(const std::string& path, const EnergyLadder& ladder,
                         const std::vector<std::vector<long long>>& table);
std::vector<std::vector<long long>> read_occupancy_csv(const std::string& path);

std::string ring_label(const EnergyLadder& ladder, int ring); // e.g. "[197.3,216.3)"

} // namespace pteem
