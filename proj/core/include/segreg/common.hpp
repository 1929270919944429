#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace segreg {

// Precondition / input validation failure. The CLI maps these to exit code 2.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

// Runtime failure inside a computation (CG breakdown, step underflow, ...).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidInput(msg);
}

// splitmix64; used for seeded jitter so that results depend only on (seed, node index).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// uniform in [-1, 1], deterministic in (seed, index)
inline double hash_unit(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t r = splitmix64(seed ^ splitmix64(index + 0x51ed2701));
    return 2.0 * (static_cast<double>(r >> 11) * 0x1.0p-53) - 1.0;
}

} // namespace segreg
