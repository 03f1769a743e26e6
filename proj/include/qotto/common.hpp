// common.hpp — scalar aliases, error types, small memoization cache

#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include <Eigen/Core>

namespace qotto {

using Real = double;
using Complex = std::complex<double>;
using ComplexL = std::complex<long double>;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Thrown on bad configuration or out-of-domain arguments. CLI exit code 1.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a numerical procedure cannot meet its tolerance
// (integrator failure, branch ambiguity, truncation leakage). CLI exit code 2.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hash/equality on exact double bit patterns. Sweep grids revisit the exact
// same parameter values, so bitwise keys deduplicate without tolerance logic.
inline std::uint64_t bits_of(double x) noexcept { return std::bit_cast<std::uint64_t>(x); }

inline std::size_t hash_mix(std::size_t seed, std::uint64_t v) noexcept {
    seed ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
}

// Bounded thread-safe memo table. When full it drops everything; entries are
// cheap to recompute and the cap only exists to bound memory during long sweeps.
template <class Key, class Value, class Hash>
class MemoCache {
public:
    explicit MemoCache(std::size_t max_entries = 4096) : max_entries_(max_entries) {}

    template <class Compute>
    Value get_or_compute(const Key& key, Compute&& compute) {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = map_.find(key);
            if (it != map_.end()) return it->second;
        }
        Value value = compute();
        {
            std::lock_guard<std::mutex> lock(mutex_);
            if (map_.size() >= max_entries_) map_.clear();
            map_.emplace(key, value);
        }
        return value;
    }

    void clear() {
        std::lock_guard<std::mutex> lock(mutex_);
        map_.clear();
    }

private:
    std::size_t max_entries_;
    std::mutex mutex_;
    std::unordered_map<Key, Value, Hash> map_;
};

} // namespace qotto
