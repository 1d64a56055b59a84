#pragma once

// Counter-based random streams.  Every chain (and the exchange step, and the
// data generator) owns its own stream, so the draw sequence seen by one chain
// does not depend on how the chain loop is scheduled across threads.  A stream
// is a SplitMix64 counter: jumping to a new stream id just relocates the start
// counter, which keeps construction O(1).

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace pteem {

class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) {
        state_ = mix(mix(seed) ^ mix(stream * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform on the open interval (0, 1); never returns an exact 0 or 1 so
    // log(u) stays finite in acceptance tests.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Unbiased integer in [0, n).
    int uniform_int(int n) {
        if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
        return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                                 static_cast<unsigned __int128>(n)) >> 64);
    }

    // Standard normal, Box-Muller with the second value cached on the stream.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Gamma(shape, rate), Marsaglia-Tsang for shape >= 1 and the boost
    // gamma(a) = gamma(a+1) * U^{1/a} below 1.
    double gamma(double shape, double rate) {
        if (!(shape > 0.0) || !(rate > 0.0))
            throw std::invalid_argument("gamma: shape and rate must be positive");
        if (shape < 1.0) {
            double u = uniform01();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform01();
            if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v / rate;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

    std::vector<double> dirichlet(std::span<const double> alpha) {
        std::vector<double> out(alpha.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            out[i] = gamma(alpha[i], 1.0);
            sum += out[i];
        }
        for (double& v : out) v /= sum;
        return out;
    }

    // Draw an index proportional to exp(logw[i]); tolerates -inf entries.
    int categorical_logw(std::span<const double> logw) {
        if (logw.empty()) throw std::invalid_argument("categorical_logw: empty weights");
        double mx = -HUGE_VAL;
        for (double lw : logw)
            if (lw > mx) mx = lw;
        if (!(mx > -HUGE_VAL)) throw std::runtime_error("categorical_logw: all weights are zero");
        double total = 0.0;
        for (double lw : logw) total += std::exp(lw - mx);
        double u = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < logw.size(); ++i) {
            acc += std::exp(logw[i] - mx);
            if (u <= acc) return static_cast<int>(i);
        }
        return static_cast<int>(logw.size()) - 1;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stream-id layout shared by engines and experiment drivers.  Chains get ids
// 1..N, the exchange/swap decisions use id 0, initial-state draws use
// kInitStream, and dataset generation uses kDataStream.  Independent runs are
// separated in the seed itself (see derive_run_seed).
inline constexpr std::uint64_t kExchangeStream = 0;
inline constexpr std::uint64_t kInitStream = 1u << 16;
inline constexpr std::uint64_t kDataStream = (1u << 16) + 1;

inline std::uint64_t chain_stream(int chain_index) {
    return static_cast<std::uint64_t>(chain_index) + 1;
}

inline std::uint64_t derive_run_seed(std::uint64_t base_seed, int run_index) {
    // SplitMix-style remix keeps runs decorrelated even for adjacent indices.
    std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(run_index) + 1);
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

} // namespace pteem
