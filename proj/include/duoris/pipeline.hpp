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
#include "duoris/dataset.hpp"
#include "duoris/inversion.hpp"

#include <memory>
#include <optional>
#include <string>

namespace duoris {

enum class Method { mf, cgls, art, fused };

const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct InversionSettings {
    Method method = Method::fused;
    /// Tikhonov weight relative to the mean diagonal of Re(H^H H).
    double lambda_rel = 1e-3;
    int cgls_iters = 200;
    int art_iters = 20;
    double art_relax = 0.5;
    int rays_per_entry = 64;
    FusionWeights weights;
    double matrix_cap = kDefaultMatrixCap;
};

/// Per-mode images of one sample, each height x width in [0, 1].
struct ModeImages {
    Eigen::ArrayXXd reflection; // CGLS
    Eigen::ArrayXXd matched;    // matched filter
    Eigen::ArrayXXd shadow;     // ART
    Eigen::ArrayXXd fused;
};

/// Precomputes everything that is shared between samples of one
/// configuration (sensing matrix, Gram matrix, ray paths, empty-scene
/// capture). When the dense matrix would exceed the cap, the reflection
/// solvers fall back to the matrix-free operator.
class Reconstructor {
public:
    Reconstructor(const RunConfig& cfg, const InversionSettings& settings);
    ~Reconstructor();

    /// Image for settings.method.
    Eigen::ArrayXXd reconstruct(const Measurement& meas) const;
    /// Every mode at once (shares the reflection solve between cgls and fused).
    ModeImages reconstruct_all(const Measurement& meas) const;

    Eigen::VectorXd reflection_volume(const Measurement& meas, bool matched) const;
    Eigen::VectorXd shadow_volume(const Measurement& meas) const;
    double lambda() const { return lambda_; }
    bool dense() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    RunConfig cfg_;
    InversionSettings settings_;
    double lambda_ = 0;
};

struct InvertSummary {
    int written = 0;
    double seconds = 0;
};

/// Reconstructs every selected sample of the manifest into
/// `<out_dir>/<id>.drmr`.
InvertSummary invert_run(const DatasetManifest& manifest, const InversionSettings& settings,
                         const std::filesystem::path& out_dir,
                         std::optional<Split> split = Split::test);

} // namespace duoris
