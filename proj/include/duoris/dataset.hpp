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

#include "duoris/config.hpp"
#include "duoris/metrics.hpp"

#include "json.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace duoris {

enum class Split { train, test };

const char* to_string(Split s);

/// Paths are relative to the manifest's directory.
struct SampleRecord {
    std::string id;
    std::string psd_path;
    std::string gt_path;
    std::string meas_path; // raw complex spectra, (2, P, F, 2)
    std::uint64_t phantom_seed = 0;
    PoseFamily pose = PoseFamily::stand;
    double snr_db = 0;
    std::string layout_hash;
    std::uint64_t schedule_seed = 0;
    Split split = Split::train;
};

struct DatasetManifest {
    nlohmann::json config;
    std::uint64_t base_seed = 0;
    std::vector<SampleRecord> samples;
    std::filesystem::path dir; // not serialized

    RunConfig run_config() const { return config_from_json(config); }
    std::vector<const SampleRecord*> select(std::optional<Split> split) const;
};

inline constexpr const char* kManifestName = "manifest.json";

/// Seed of sample k, a pure function of (base_seed, k).
std::uint64_t sample_phantom_seed(std::uint64_t base_seed, int k);

/// Receiver-noise seed used for the sample drawn with `phantom_seed`.
std::uint64_t sample_noise_seed(std::uint64_t phantom_seed);

/// Hashes every seed, ranks by hash, and tags the lowest round(test_fraction * n)
/// as test. Counts are exact; membership depends only on the seed set.
std::vector<Split> assign_splits(const std::vector<std::uint64_t>& phantom_seeds,
                                 double test_fraction = 0.2);

/// Hex digest of everything a capture depends on apart from the scene and noise.
std::string layout_hash(const RunConfig& cfg);

struct GenOptions {
    bool write_pgm = false;
    double test_fraction = 0.2;
    /// Called after every finished sample with (done, total, reused).
    std::function<void(int, int, bool)> progress;
};

/// Generates (or completes) n samples under `out_dir` and writes the manifest
/// last. Samples whose sidecar matches the current content key are reused.
DatasetManifest gen_dataset(const RunConfig& cfg, int n, const std::filesystem::path& out_dir,
                            std::uint64_t base_seed, const GenOptions& opts = {});

nlohmann::json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& doc, const std::filesystem::path& dir);
void write_manifest(const DatasetManifest& m, const std::filesystem::path& file);

/// Throws IoError when unreadable or when a referenced file is missing,
/// FormatError on malformed content.
DatasetManifest load_manifest(const std::filesystem::path& file);

/// FNV-1a over the canonical JSON dump.
std::string manifest_hash(const DatasetManifest& m);

// --- evaluation -------------------------------------------------------------

struct SampleScore {
    std::string id;
    MetricSet metrics;
};

struct EvalReport {
    std::vector<SampleScore> samples;
    std::vector<std::string> missing;
    MetricSet mean;

    nlohmann::json to_json() const;
};

/// Scores `<pred_dir>/<id>.drmr` against every test-split sample. Missing
/// predictions are listed and left out of the means. Throws
/// std::invalid_argument for an empty test split.
EvalReport evaluate_run(const DatasetManifest& manifest, const std::filesystem::path& pred_dir,
                        const MetricConfig& cfg = {}, std::optional<Split> split = Split::test);

MetricSet mean_metrics(const std::vector<MetricSet>& sets);

} // namespace duoris
