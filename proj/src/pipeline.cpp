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


#include "duoris/pipeline.hpp"
#include "duoris/tensor_io.hpp"

#include <chrono>
#include <mutex>

namespace duoris {

namespace fs = std::filesystem;

const char* to_string(Method m)
{
    switch (m) {
    case Method::mf: return "mf";
    case Method::cgls: return "cgls";
    case Method::art: return "art";
    case Method::fused: return "fused";
    }
    return "?";
}

Method method_from_string(const std::string& s)
{
    for (Method m : {Method::mf, Method::cgls, Method::art, Method::fused})
        if (s == to_string(m))
            return m;
    throw std::invalid_argument("unknown inversion method '" + s + "'");
}

struct Reconstructor::Impl {
    SystemLayout layout;
    IlluminationSchedule schedule;
    FrequencyGrid grid;
    SourceWaveform wave;
    ForwardOptions fwd;
    std::shared_ptr<const Measurement> baseline;
    Eigen::VectorXd base_energy_rx2;

    bool use_dense = false;
    SensingMatrix h;
    NormalSystem normal;
    std::unique_ptr<ReflectionOperator> op;
    double mean_diag = 0;

    std::once_flag shadow_once; // ray paths are built on first use
    ShadowSystem shadow;
};

Reconstructor::Reconstructor(const RunConfig& cfg, const InversionSettings& settings)
    : impl_(std::make_unique<Impl>()), cfg_(cfg), settings_(settings)
{
    validate_config(cfg);
    if (!(settings.lambda_rel >= 0.0) || settings.cgls_iters < 1 || settings.art_iters < 0)
        throw std::invalid_argument("inversion settings: need lambda >= 0, cgls_iters >= 1, art_iters >= 0");
    if (!(settings.art_relax > 0.0 && settings.art_relax <= 1.0))
        throw std::invalid_argument("inversion settings: art_relax must lie in (0, 1]");
    Impl& s = *impl_;
    s.layout = cfg.layout();
    s.schedule = cfg.schedule();
    s.grid = cfg.grid();
    s.wave = cfg.waveform();
    s.fwd = cfg.forward_options();
    s.baseline = empty_baseline(s.layout, s.schedule, s.grid, s.wave, s.fwd);
    s.base_energy_rx2 = entry_energy(to_psd(*s.baseline), 1);

    const double entries = static_cast<double>(s.schedule.size()) * s.grid.n_bins() * s.layout.soi.size();
    s.use_dense = entries <= settings.matrix_cap;
    if (settings.method != Method::art) {
        if (s.use_dense) {
            s.h = build_reflection_matrix(s.layout, s.schedule, s.grid, s.wave, s.fwd, settings.matrix_cap);
            s.normal = NormalSystem::from(s.h.h);
            s.mean_diag = s.normal.gram.diagonal().mean();
        } else {
            s.op = std::make_unique<ReflectionOperator>(s.layout, s.schedule, s.grid, s.wave, s.fwd);
            s.mean_diag = s.op->column_norms().squaredNorm() / static_cast<double>(s.op->cols());
        }
        lambda_ = settings.lambda_rel * s.mean_diag;
    }
}

Reconstructor::~Reconstructor() = default;

bool Reconstructor::dense() const
{
    return impl_->use_dense;
}

Eigen::VectorXd Reconstructor::reflection_volume(const Measurement& meas, bool matched) const
{
    Impl& s = *impl_;
    if (!s.use_dense && !s.op)
        throw std::logic_error("reflection operator was not prepared (method art)");
    if (s.use_dense && s.h.rows() == 0)
        throw std::logic_error("reflection matrix was not prepared (method art)");
    if (meas.y1.rows() != s.baseline->y1.rows() || meas.y1.cols() != s.baseline->y1.cols())
        throw std::invalid_argument("measurement shape does not match the configuration");
    const Eigen::VectorXcd dy = flatten_rows(meas.y1 - s.baseline->y1);
    if (s.use_dense) {
        if (matched)
            return matched_filter(DenseOperator(s.h.h), dy);
        const Eigen::VectorXd rhs = (s.h.h.adjoint() * dy).real();
        return cgls_solve_normal(s.normal, rhs, dy.squaredNorm(), lambda_, settings_.cgls_iters).volume;
    }
    if (matched)
        return matched_filter(*s.op, dy);
    return cgls_solve(*s.op, dy, lambda_, settings_.cgls_iters).volume;
}

Eigen::VectorXd Reconstructor::shadow_volume(const Measurement& meas) const
{
    Impl& s = *impl_;
    std::call_once(s.shadow_once, [&] {
        s.shadow = shadow_system(s.layout, s.schedule, s.grid, s.fwd, settings_.rays_per_entry);
    });
    const Eigen::VectorXd att = transmission_attenuation(entry_energy(to_psd(meas), 1), s.base_energy_rx2);
    return art_solve(s.shadow.paths, att, settings_.art_iters, settings_.art_relax);
}

namespace {

Eigen::ArrayXXd single_mode(const Eigen::VectorXd& v, bool reflection, const SystemLayout& layout,
                            int w, int h)
{
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(v.size());
    return reflection ? fuse_and_project(v, zero, {1.0, 0.0}, layout, w, h).image
                      : fuse_and_project(zero, v, {0.0, 1.0}, layout, w, h).image;
}

} // namespace

Eigen::ArrayXXd Reconstructor::reconstruct(const Measurement& meas) const
{
    const SystemLayout& l = impl_->layout;
    const int w = cfg_.image_width, h = cfg_.image_height;
    switch (settings_.method) {
    case Method::mf: return single_mode(reflection_volume(meas, true), true, l, w, h);
    case Method::cgls: return single_mode(reflection_volume(meas, false), true, l, w, h);
    case Method::art: return single_mode(shadow_volume(meas), false, l, w, h);
    case Method::fused: break;
    }
    return fuse_and_project(reflection_volume(meas, false), shadow_volume(meas), settings_.weights, l, w, h)
        .image;
}

ModeImages Reconstructor::reconstruct_all(const Measurement& meas) const
{
    const SystemLayout& l = impl_->layout;
    const int w = cfg_.image_width, h = cfg_.image_height;
    const Eigen::VectorXd refl = reflection_volume(meas, false);
    const Eigen::VectorXd shad = shadow_volume(meas);
    ModeImages out;
    out.reflection = single_mode(refl, true, l, w, h);
    out.matched = single_mode(reflection_volume(meas, true), true, l, w, h);
    out.shadow = single_mode(shad, false, l, w, h);
    out.fused = fuse_and_project(refl, shad, settings_.weights, l, w, h).image;
    return out;
}

InvertSummary invert_run(const DatasetManifest& manifest, const InversionSettings& settings,
                         const fs::path& out_dir, std::optional<Split> split)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto chosen = manifest.select(split);
    if (chosen.empty())
        throw std::invalid_argument("invert: no samples in the selected split");
    for (const SampleRecord* s : chosen)
        if (s->meas_path.empty())
            throw FormatError("invert: sample " + s->id + " has no raw measurement tensor");

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    const Reconstructor rec(manifest.run_config(), settings);
    InvertSummary sum;
    for (const SampleRecord* s : chosen) {
        const Measurement meas = measurement_from_tensor(read_tensor(manifest.dir / s->meas_path));
        write_tensor(out_dir / (s->id + ".drmr"), image_tensor(rec.reconstruct(meas)));
        ++sum.written;
    }
    sum.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sum;
}

} // namespace duoris
