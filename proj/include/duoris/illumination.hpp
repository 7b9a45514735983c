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

#include "duoris/scene.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace duoris {

/// How a coding bit maps to a reflection coefficient.
/// phase:     Upsilon = area * gamma * exp(i pi bit)
/// amplitude: Upsilon = area * gamma * bit (off element reflects nothing)
enum class CodingMode { phase, amplitude };

struct ReflectionModel {
    double gamma = 0.8;
    CodingMode mode = CodingMode::phase;

    /// Real coefficient per bit; both modes are real-valued.
    double coefficient(std::uint8_t bit, double element_area) const
    {
        const double mag = element_area * gamma;
        if (mode == CodingMode::phase)
            return bit ? -mag : mag;
        return bit ? mag : 0.0;
    }
};

/// One coding pattern. Bit order follows the panel's flat element index,
/// i.e. row-major over (ny, nx).
struct RisPattern {
    std::vector<std::uint8_t> bits;

    int size() const { return static_cast<int>(bits.size()); }
    Eigen::VectorXd coefficients(const RisPanel& panel, const ReflectionModel& model) const;
    RisPattern complemented() const;
    int hamming(const RisPattern& o) const;
    bool operator==(const RisPattern&) const = default;
};

RisPattern all_zero_pattern(const RisPanel& panel);

enum class Strategy { I = 1, II = 2, III = 3 };

struct ScheduleEntry {
    RisPattern forward;
    RisPattern backward;
    Strategy strategy = Strategy::I;
    std::optional<int> focus_index;
};

struct IlluminationSchedule {
    std::vector<ScheduleEntry> entries;
    std::uint64_t seed = 0;

    int size() const { return static_cast<int>(entries.size()); }
};

/// Per-element path term k0^2 * g(target, r_i) * g(r_i, source) without the
/// reflection coefficient; field_at is the dot product with the coefficients.
Eigen::VectorXcd element_path_terms(const Eigen::Matrix3Xd& elements, const Vec3& source,
                                    const Vec3& target, double omega,
                                    const MediumParams& medium = {});

/// sum_i k0^2 Upsilon_i g(target, r_i) g(r_i, source).
cd field_at(const RisPanel& panel, const RisPattern& pattern, const ReflectionModel& model,
            const Vec3& source, const Vec3& target, double omega, const MediumParams& medium = {});

struct GreedyTrace {
    RisPattern pattern;
    std::vector<double> accepted_intensity; // |field|^2 after each accepted flip
    int sweeps = 0;
};

/// Coordinate ascent over bits from the all-zero pattern: sweep elements in
/// index order, flip a bit iff |field(focus)| strictly increases, stop after a
/// sweep without flips or after `max_sweeps`.
GreedyTrace greedy_focus_traced(const RisPanel& panel, const ReflectionModel& model,
                                const Vec3& source, const Vec3& focus, double omega,
                                const MediumParams& medium = {}, int max_sweeps = 10);

RisPattern greedy_focus(const RisPanel& panel, const ReflectionModel& model, const Vec3& source,
                        const Vec3& focus, double omega, const MediumParams& medium = {});

/// Picks per-element bits so that sum_j c(bit_j) a_j is co-phased: each bit
/// maximizes Re(c(bit) a_j conj(ref)) with ref the current sum, two passes,
/// ties keep bit 0.
RisPattern cophase_bits(const Eigen::VectorXcd& amplitudes, const ReflectionModel& model);

/// Empty-scene amplitude arriving at Rx2 through each backward element j:
/// field_at(forward -> r_j) * g(r_R2, r_j) * k0^2 * area * gamma.
Eigen::VectorXcd backward_incident(const SystemLayout& layout, const RisPattern& forward,
                                   const ReflectionModel& model, double omega,
                                   const MediumParams& medium = {});

RisPattern backward_aggregate(const SystemLayout& layout, const RisPattern& forward,
                              const ReflectionModel& model, double omega,
                              const MediumParams& medium = {});

/// 7 (across) x 5 (down) focus centers on the SoI front-view tiling at mid
/// depth, row-major from the top-left cell as seen from the forward RIS.
std::vector<Vec3> soi_focus_centers(const SceneGrid& soi, int across = 7, int down = 5);

/// 5 x 5 partition centers of the backward panel, row-major from the top.
std::vector<Vec3> backward_focus_centers(const RisPanel& backward, int n = 5);

std::vector<ScheduleEntry> strategy_one(const SystemLayout& layout,
                                        const std::vector<Vec3>& focus_centers,
                                        const ReflectionModel& model, double omega_center,
                                        const MediumParams& medium = {});

std::vector<ScheduleEntry> strategy_two(const SystemLayout& layout, const ReflectionModel& model,
                                        double omega_center, const MediumParams& medium = {});

/// Pattern t = 1..10 draws bits i.i.d. with on-probability t / 11; the backward
/// panel co-phases a plane wave arriving from the forward panel center toward Rx2.
std::vector<ScheduleEntry> strategy_three(const SystemLayout& layout, std::uint64_t seed,
                                          const ReflectionModel& model, double omega_center,
                                          const MediumParams& medium = {});

/// Strategies I, II, III concatenated (35 + 25 + 10 entries).
IlluminationSchedule build_schedule(const SystemLayout& layout, const FrequencyGrid& grid,
                                    std::uint64_t seed, const ReflectionModel& model = {},
                                    const MediumParams& medium = {});

// --- serialization ----------------------------------------------------------

/// Bits packed MSB-first into bytes, then base64 (RFC 4648, padded).
std::string encode_bits(const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> decode_bits(const std::string& text, int n_bits);

nlohmann::json schedule_to_json(const IlluminationSchedule& schedule, const SystemLayout& layout);
IlluminationSchedule schedule_from_json(const nlohmann::json& doc);

const char* to_string(Strategy s);

} // namespace duoris
