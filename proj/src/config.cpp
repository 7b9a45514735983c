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


#include "duoris/config.hpp"
#include "duoris/tensor_io.hpp"

#include <fstream>
#include <set>

namespace duoris {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    if (!obj.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out, const std::string& where)
{
    if (!obj.contains(key))
        return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

} // namespace

const char* to_string(ScaleProfile s)
{
    return s == ScaleProfile::full ? "full" : "desk";
}

RunConfig default_config(ScaleProfile scale)
{
    RunConfig c;
    c.scale = scale;
    if (scale == ScaleProfile::full) {
        c.bins = 8192;
        c.panel_elements = 64;
        c.soi_counts = {20, 40, 40};
        c.image_width = 980;
        c.image_height = 1080;
    }
    return c;
}

SystemLayout RunConfig::layout() const
{
    SystemLayout l = default_layout(scale);
    l.forward = make_panel(l.forward.center, l.forward.normal, l.forward.up, panel_elements, panel_side);
    l.backward = make_panel(l.backward.center, l.backward.normal, l.backward.up, panel_elements, panel_side);
    l.soi = SceneGrid(l.soi.origin(), l.soi.extents(), soi_counts);
    return l;
}

FrequencyGrid RunConfig::grid() const
{
    return FrequencyGrid(center_hz, bandwidth_hz, bins);
}

SourceWaveform RunConfig::waveform() const
{
    return lfm_spectrum(grid(), 1.0);
}

ForwardOptions RunConfig::forward_options() const
{
    ForwardOptions o;
    o.direct_path = direct_path;
    o.reflection.gamma = gamma;
    return o;
}

IlluminationSchedule RunConfig::schedule() const
{
    return build_schedule(layout(), grid(), schedule_seed, forward_options().reflection);
}

void validate_config(const RunConfig& c)
{
    if (!(c.center_hz > 0.0) || !(c.bandwidth_hz >= 0.0) || c.bandwidth_hz >= 2.0 * c.center_hz)
        throw ConfigError("frequency: need center_hz > 0 and 0 <= bandwidth_hz < 2 center_hz");
    if (c.bins < 1)
        throw ConfigError("frequency.bins must be >= 1");
    if (c.panel_elements < 1 || !(c.panel_side > 0.0))
        throw ConfigError("panels: need elements >= 1 and side_m > 0");
    if ((c.soi_counts.array() < 1).any())
        throw ConfigError("soi.counts must be positive");
    if (!std::isfinite(c.noise.snr_db))
        throw ConfigError("noise.snr_db must be finite");
    if (!(c.gamma > 0.0 && c.gamma <= 1.0))
        throw ConfigError("gamma must lie in (0, 1]");
    if (c.image_width < 1 || c.image_height < 1)
        throw ConfigError("image dimensions must be positive");
}

RunConfig config_from_json(const json& doc)
{
    check_keys(doc, {"scale_profile", "frequency", "panels", "soi", "schedule_seed", "noise", "gamma",
                     "direct_path"},
               "config");
    ScaleProfile scale = ScaleProfile::desk;
    if (doc.contains("scale_profile")) {
        const auto& s = doc.at("scale_profile");
        if (s == "desk")
            scale = ScaleProfile::desk;
        else if (s == "full")
            scale = ScaleProfile::full;
        else
            throw ConfigError("scale_profile must be \"desk\" or \"full\"");
    }
    RunConfig c = default_config(scale);

    if (doc.contains("frequency")) {
        const auto& f = doc.at("frequency");
        check_keys(f, {"center_hz", "bandwidth_hz", "bins"}, "frequency");
        read_opt(f, "center_hz", c.center_hz, "frequency");
        read_opt(f, "bandwidth_hz", c.bandwidth_hz, "frequency");
        read_opt(f, "bins", c.bins, "frequency");
    }
    if (doc.contains("panels")) {
        const auto& p = doc.at("panels");
        check_keys(p, {"elements", "side_m"}, "panels");
        read_opt(p, "elements", c.panel_elements, "panels");
        read_opt(p, "side_m", c.panel_side, "panels");
    }
    if (doc.contains("soi")) {
        const auto& s = doc.at("soi");
        check_keys(s, {"counts"}, "soi");
        std::vector<int> counts;
        read_opt(s, "counts", counts, "soi");
        if (!counts.empty()) {
            if (counts.size() != 3)
                throw ConfigError("soi.counts must have three entries");
            c.soi_counts = {counts[0], counts[1], counts[2]};
        }
    }
    read_opt(doc, "schedule_seed", c.schedule_seed, "config");
    if (doc.contains("noise")) {
        const auto& n = doc.at("noise");
        check_keys(n, {"snr_db", "enabled"}, "noise");
        read_opt(n, "snr_db", c.noise.snr_db, "noise");
        read_opt(n, "enabled", c.noise.enabled, "noise");
    }
    read_opt(doc, "gamma", c.gamma, "config");
    read_opt(doc, "direct_path", c.direct_path, "config");
    validate_config(c);
    return c;
}

json config_to_json(const RunConfig& c)
{
    return json{
        {"scale_profile", to_string(c.scale)},
        {"frequency", {{"center_hz", c.center_hz}, {"bandwidth_hz", c.bandwidth_hz}, {"bins", c.bins}}},
        {"panels", {{"elements", c.panel_elements}, {"side_m", c.panel_side}}},
        {"soi", {{"counts", {c.soi_counts.x(), c.soi_counts.y(), c.soi_counts.z()}}}},
        {"schedule_seed", c.schedule_seed},
        {"noise", {{"snr_db", c.noise.snr_db}, {"enabled", c.noise.enabled}}},
        {"gamma", c.gamma},
        {"direct_path", c.direct_path},
    };
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return config_from_json(doc);
}

} // namespace duoris
