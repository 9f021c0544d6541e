// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qradar {

enum class ErrorKind {
    InvalidArgument,
    ParameterRange,
    DegenerateInput,
    DimensionMismatch,
    Io,
    Calibration,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so the CLI can emit it as
/// a machine-readable error.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &message) : std::runtime_error(message), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

using Rng = std::mt19937_64;

/// Mixes a base seed with task coordinates (class, sample, pair index...) so
/// each parallel task owns an independent stream.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> coords);

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> coords = {})
{
    return Rng(derive_seed(seed, coords));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng &rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Runs body(i) for i in [0, count) on up to `threads` workers. Results must be
/// written to per-index slots for the outcome to be schedule independent.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)> &body);

/// Default worker count used when callers pass threads = 0.
unsigned default_threads();

} // namespace qradar
