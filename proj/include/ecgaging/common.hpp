#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecgaging {

// Bad input data: unreadable files, malformed headers, inconsistent manifests.
// The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure: degenerate series, insufficient data, no convergence.
// The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// splitmix64 mix; used to derive independent child seeds from a parent seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// Deterministic random source. The engine is std::mt19937_64 (bit-exact per
// the standard); the distributions are implemented here so that streams are
// reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal();  // N(0, 1), Box-Muller with cached spare
    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    // uniform in [0, n); n must be > 0
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Derived stream; does not advance this generator's state.
    Rng stream(std::uint64_t salt) const { return Rng(mix_seed(seed_, salt)); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ecgaging
