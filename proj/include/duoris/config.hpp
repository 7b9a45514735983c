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

#include "duoris/forward.hpp"

#include "json.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace duoris {

/// Invalid configuration content (bad key, type or value).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Everything a capture depends on. The scale profile fills the defaults;
/// individual keys override them.
struct RunConfig {
    ScaleProfile scale = ScaleProfile::desk;
    double center_hz = 5.8e9;
    double bandwidth_hz = 1.6e8;
    int bins = 128;
    int panel_elements = 16;
    double panel_side = 1.4;
    Eigen::Vector3i soi_counts{10, 20, 20}; // depth (x), width (y), height (z)
    std::uint64_t schedule_seed = 0;
    NoiseModel noise{30.0, 0, true};
    double gamma = 0.8;
    bool direct_path = true;
    int image_width = 80;
    int image_height = 96;

    SystemLayout layout() const;
    FrequencyGrid grid() const;
    SourceWaveform waveform() const;
    ForwardOptions forward_options() const;
    IlluminationSchedule schedule() const;
};

RunConfig default_config(ScaleProfile scale);

/// Keys: scale_profile, frequency {center_hz, bandwidth_hz, bins},
/// panels {elements, side_m}, soi {counts: [x, y, z]}, schedule_seed,
/// noise {snr_db, enabled}, gamma, direct_path. Unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& cfg);

/// Throws IoError when unreadable, ConfigError when invalid.
RunConfig load_config(const std::filesystem::path& path);

/// Validates ranges, throws ConfigError.
void validate_config(const RunConfig& cfg);

const char* to_string(ScaleProfile s);

} // namespace duoris
