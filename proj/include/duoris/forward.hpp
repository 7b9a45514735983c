// SPDX-License-Identifier: Apache-2.0
//
// duoris: dual-RIS radio-frequency imaging toolkit
// Copyright (C) 2026 The duoris authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "duoris/illumination.hpp"
#include "duoris/voxel.hpp"

#include <cstdint>
#include <memory>

namespace duoris {

struct ForwardOptions {
    bool direct_path = true;
    ReflectionModel reflection;
    MediumParams medium;
};

/// Received spectra, one row per schedule entry, one column per frequency bin.
struct Measurement {
    Eigen::MatrixXcd y1;
    Eigen::MatrixXcd y2;
};

/// y2 split into its two-hop (Tx -> forward -> backward -> Rx2, gated by mu)
/// and scatter-relay (Tx -> forward -> target -> backward -> Rx2) parts.
struct Y2Terms {
    Eigen::MatrixXcd two_hop;
    Eigen::MatrixXcd scatter;

    Eigen::MatrixXcd total() const { return two_hop + scatter; }
};

struct NoiseModel {
    double snr_db = 30.0;
    std::uint64_t seed = 0;
    bool enabled = false;
};

/// Non-negative power cube (receiver, pattern, bin), receiver 0 = Rx1.
struct PsdTensor {
    int receivers = 2;
    int patterns = 0;
    int bins = 0;
    Eigen::VectorXd values; // index (rx * patterns + p) * bins + f

    double& operator()(int rx, int p, int f) { return values[(rx * patterns + p) * bins + f]; }
    double operator()(int rx, int p, int f) const { return values[(rx * patterns + p) * bins + f]; }
};

PsdTensor to_psd(const Measurement& m);

/// Batched evaluation of both receive chains for every schedule entry.
/// The scene only enters through its occupied cells and the occlusion mask,
/// so the cost is O(F (K_f K_b P + Q_occ K P)). Fills `terms` when given.
Measurement simulate_schedule(const SystemLayout& layout, const SceneGrid& scene,
                              const IlluminationSchedule& schedule, const FrequencyGrid& grid,
                              const SourceWaveform& waveform, const ForwardOptions& opts = {},
                              Y2Terms* terms = nullptr);

/// Reflection chain for one forward pattern (noise-free), one value per bin.
Eigen::VectorXcd simulate_y1(const SystemLayout& layout, const SceneGrid& scene,
                             const RisPattern& forward, const FrequencyGrid& grid,
                             const SourceWaveform& waveform, const ForwardOptions& opts = {});

/// Transmission chain for one pattern pair; rows of the returned terms have length 1.
Y2Terms simulate_y2_terms(const SystemLayout& layout, const SceneGrid& scene,
                          const RisPattern& forward, const RisPattern& backward,
                          const FrequencyGrid& grid, const SourceWaveform& waveform,
                          const ForwardOptions& opts = {});

Eigen::VectorXcd simulate_y2(const SystemLayout& layout, const SceneGrid& scene,
                             const RisPattern& forward, const RisPattern& backward,
                             const FrequencyGrid& grid, const SourceWaveform& waveform,
                             const ForwardOptions& opts = {});

/// Content hash of everything an empty-scene capture depends on.
std::uint64_t baseline_key(const SystemLayout& layout, const IlluminationSchedule& schedule,
                           const FrequencyGrid& grid, const SourceWaveform& waveform,
                           const ForwardOptions& opts);

/// Empty-scene capture (chi = 0, noise off), memoized by content hash.
std::shared_ptr<const Measurement> empty_baseline(const SystemLayout& layout,
                                                  const IlluminationSchedule& schedule,
                                                  const FrequencyGrid& grid,
                                                  const SourceWaveform& waveform,
                                                  const ForwardOptions& opts = {});

/// Circularly-symmetric complex Gaussian sample with E|z|^2 = 1, a pure
/// function of (seed, receiver, pattern, bin).
cd noise_sample(std::uint64_t seed, int rx, int pattern, int bin);

struct Capture {
    Measurement measurement;
    PsdTensor psd;
};

/// Simulates every schedule entry, adds receiver noise at `snr_db` below the
/// empty-scene mean power of each receiver, and forms the PSD.
Capture capture_psd(const SystemLayout& layout, const SceneGrid& scene,
                    const IlluminationSchedule& schedule, const FrequencyGrid& grid,
                    const SourceWaveform& waveform, const NoiseModel& noise,
                    const ForwardOptions& opts = {});

} // namespace duoris
