// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "qradar/radar_sim.hpp"

namespace qradar::radar {

// Binary layout: uint64 sample count, then interleaved float64 I/Q pairs, all
// little-endian. The sample rate is not stored; the manifest/config carries it.
void write_signal(const std::filesystem::path &path, const ComplexSignal &signal);
ComplexSignal read_signal(const std::filesystem::path &path, double sample_rate);

} // namespace qradar::radar
