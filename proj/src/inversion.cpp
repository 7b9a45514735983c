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

#include "duoris/inversion.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace duoris {

namespace {

Eigen::MatrixXd forward_coefficients(const IlluminationSchedule& schedule, const RisPanel& panel,
                                     const ReflectionModel& model, bool forward)
{
    Eigen::MatrixXd w(panel.size(), schedule.size());
    for (int p = 0; p < schedule.size(); ++p) {
        const auto& e = schedule.entries[p];
        w.col(p) = (forward ? e.forward : e.backward).coefficients(panel, model);
    }
    return w;
}

Eigen::VectorXcd greens_to(const Eigen::Matrix3Xd& pts, const Vec3& r, double k0)
{
    Eigen::VectorXcd g(pts.cols());
    for (Eigen::Index i = 0; i < pts.cols(); ++i)
        g[i] = greens_at_distance((pts.col(i) - r).norm(), k0);
    return g;
}

} // namespace

ReflectionOperator::ReflectionOperator(const SystemLayout& layout,
                                       const IlluminationSchedule& schedule,
                                       const FrequencyGrid& grid, const SourceWaveform& waveform,
                                       const ForwardOptions& opts)
    : cells_(layout.soi.cell_centers()),
      elements_(element_positions(layout.forward)),
      coeff_(forward_coefficients(schedule, layout.forward, opts.reflection, true)),
      tx_(layout.tx),
      rx1_(layout.rx1),
      cell_area_(layout.soi.cell_area()),
      omegas_(grid.omegas()),
      spectrum_(waveform.spectrum),
      medium_(opts.medium),
      patterns_(schedule.size()),
      bins_(grid.n_bins())
{
    if (spectrum_.size() != bins_)
        throw std::invalid_argument("reflection operator: waveform length does not match the frequency grid");
}

Eigen::MatrixXcd ReflectionOperator::block(int f) const
{
    const double k0 = wavenumber(omegas_[f], medium_);
    const double k2 = k0 * k0;
    const Eigen::VectorXcd g_tx = greens_to(elements_, tx_, k0);
    const Eigen::Index q = cells_.cols(), k = elements_.cols();

    Eigen::MatrixXcd e(q, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::VectorXd d = (cells_.colwise() - elements_.col(i)).colwise().norm().transpose();
        for (Eigen::Index n = 0; n < q; ++n)
            e(n, i) = greens_at_distance(d[n], k0) * g_tx[i];
    }
    Eigen::MatrixXcd illum(q, patterns_);
    illum.real() = e.real() * coeff_;
    illum.imag() = e.imag() * coeff_;

    const Eigen::VectorXcd a = (spectrum_[f] * k2 * k2 * cell_area_) * greens_to(cells_, rx1_, k0);
    return a.asDiagonal() * illum;
}

Eigen::VectorXcd ReflectionOperator::apply(const Eigen::VectorXcd& u) const
{
    if (u.size() != cols())
        throw std::invalid_argument("reflection operator: input length does not match SoI size");
    Eigen::VectorXcd out(rows());
#pragma omp parallel for schedule(dynamic)
    for (int f = 0; f < bins_; ++f) {
        const Eigen::VectorXcd yf = block(f).transpose() * u;
        for (int p = 0; p < patterns_; ++p)
            out[static_cast<Eigen::Index>(p) * bins_ + f] = yf[p];
    }
    return out;
}

Eigen::VectorXcd ReflectionOperator::adjoint(const Eigen::VectorXcd& v) const
{
    if (v.size() != rows())
        throw std::invalid_argument("reflection operator: input length does not match measurement size");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(cols());
#pragma omp parallel
    {
        Eigen::VectorXcd local = Eigen::VectorXcd::Zero(cols());
#pragma omp for schedule(dynamic)
        for (int f = 0; f < bins_; ++f) {
            Eigen::VectorXcd vf(patterns_);
            for (int p = 0; p < patterns_; ++p)
                vf[p] = v[static_cast<Eigen::Index>(p) * bins_ + f];
            local += block(f).conjugate() * vf;
        }
#pragma omp critical
        out += local;
    }
    return out;
}

Eigen::VectorXd ReflectionOperator::column_norms() const
{
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(cols());
#pragma omp parallel
    {
        Eigen::VectorXd local = Eigen::VectorXd::Zero(cols());
#pragma omp for schedule(dynamic)
        for (int f = 0; f < bins_; ++f)
            local += block(f).cwiseAbs2().rowwise().sum();
#pragma omp critical
        acc += local;
    }
    return acc.cwiseSqrt();
}

SensingMatrix build_reflection_matrix(const SystemLayout& layout,
                                      const IlluminationSchedule& schedule,
                                      const FrequencyGrid& grid, const SourceWaveform& waveform,
                                      const ForwardOptions& opts, double max_entries)
{
    const double entries =
        static_cast<double>(schedule.size()) * grid.n_bins() * static_cast<double>(layout.soi.size());
    if (entries > max_entries)
        throw std::length_error("build_reflection_matrix: " + std::to_string(entries) +
                                " entries exceed the cap of " + std::to_string(max_entries) +
                                "; use the matrix-free ReflectionOperator");

    const ReflectionOperator op(layout, schedule, grid, waveform, opts);
    SensingMatrix h;
    h.patterns = schedule.size();
    h.bins = grid.n_bins();
    h.provenance = Provenance::reflection;
    h.h.resize(op.rows(), op.cols());
#pragma omp parallel for schedule(dynamic)
    for (int f = 0; f < h.bins; ++f) {
        const Eigen::MatrixXcd b = op.block(f);
        for (int p = 0; p < h.patterns; ++p)
            h.h.row(static_cast<Eigen::Index>(p) * h.bins + f) = b.col(p).transpose();
    }
    return h;
}

Eigen::VectorXcd flatten_rows(const Eigen::MatrixXcd& per_pattern)
{
    Eigen::VectorXcd v(per_pattern.size());
    for (Eigen::Index p = 0; p < per_pattern.rows(); ++p)
        v.segment(p * per_pattern.cols(), per_pattern.cols()) = per_pattern.row(p).transpose();
    return v;
}

NormalSystem NormalSystem::from(const Eigen::MatrixXcd& h)
{
    NormalSystem s;
    const Eigen::Index q = h.cols();
    s.gram = Eigen::MatrixXd::Zero(q, q);
    constexpr Eigen::Index chunk = 512;
    Eigen::MatrixXd part;
    for (Eigen::Index r0 = 0; r0 < h.rows(); r0 += chunk) {
        const Eigen::Index n = std::min(chunk, h.rows() - r0);
        part = h.middleRows(r0, n).real();
        s.gram.selfadjointView<Eigen::Lower>().rankUpdate(part.transpose());
        part = h.middleRows(r0, n).imag();
        s.gram.selfadjointView<Eigen::Lower>().rankUpdate(part.transpose());
    }
    s.gram.triangularView<Eigen::StrictlyUpper>() = s.gram.transpose();
    return s;
}

SolveReport cgls_solve_normal(const NormalSystem& sys, const Eigen::VectorXd& rhs, double y_norm2,
                              double lambda, int max_iters, double tol)
{
    if (lambda < 0.0 || max_iters < 1)
        throw std::invalid_argument("cgls_solve: need lambda >= 0 and max_iters >= 1");
    if (rhs.size() != sys.gram.rows())
        throw std::invalid_argument("cgls_solve: right-hand side does not match the normal system");

    SolveReport rep;
    const Eigen::Index q = rhs.size();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd nx = Eigen::VectorXd::Zero(q); // gram * x
    Eigen::VectorXd s = rhs;
    Eigen::VectorXd p = s;
    double gamma = s.squaredNorm();
    const double gamma0 = gamma;
    rep.residuals.push_back(std::sqrt(std::max(y_norm2, 0.0)));
    if (gamma0 == 0.0) {
        rep.converged = true;
        rep.raw = x;
        rep.volume = x;
        return rep;
    }

    for (int it = 0; it < max_iters; ++it) {
        const Eigen::VectorXd w = sys.gram.selfadjointView<Eigen::Lower>() * p;
        const double delta = p.dot(w) + lambda * p.squaredNorm();
        if (!(delta > 0.0))
            break;
        const double alpha = gamma / delta;
        x += alpha * p;
        nx += alpha * w;
        s -= alpha * (w + lambda * p);
        const double gamma_new = s.squaredNorm();
        const double r2 = y_norm2 - 2.0 * x.dot(rhs) + x.dot(nx);
        rep.residuals.push_back(std::sqrt(std::max(r2, 0.0) + lambda * x.squaredNorm()));
        rep.iterations = it + 1;
        if (gamma_new <= tol * tol * gamma0) {
            rep.converged = true;
            break;
        }
        p = s + (gamma_new / gamma) * p;
        gamma = gamma_new;
    }
    rep.raw = x;
    rep.volume = x.cwiseMax(0.0);
    return rep;
}

// --- shadow -----------------------------------------------------------------

ShadowSystem shadow_system(const SystemLayout& layout, const IlluminationSchedule& schedule,
                           const FrequencyGrid& grid, const ForwardOptions& opts,
                           int rays_per_entry)
{
    if (rays_per_entry < 1)
        throw std::invalid_argument("shadow_system: rays_per_entry must be positive");
    const Eigen::Matrix3Xd fa = element_positions(layout.forward);
    const Eigen::Matrix3Xd fb = element_positions(layout.backward);
    const Eigen::MatrixXd wa = forward_coefficients(schedule, layout.forward, opts.reflection, true);
    const Eigen::MatrixXd wb = forward_coefficients(schedule, layout.backward, opts.reflection, false);
    const double k0 = wavenumber(grid.center_omega(), opts.medium);
    const double k4 = k0 * k0 * k0 * k0;

    const Eigen::VectorXcd g_tx = greens_to(fa, layout.tx, k0);
    const Eigen::VectorXcd g_rx2 = greens_to(fb, layout.rx2, k0);
    Eigen::MatrixXcd link(fa.cols(), fb.cols());
    for (Eigen::Index j = 0; j < fb.cols(); ++j)
        for (Eigen::Index i = 0; i < fa.cols(); ++i)
            link(i, j) = greens_at_distance((fa.col(i) - fb.col(j)).norm(), k0) * g_tx[i] * g_rx2[j];

    const int P = schedule.size();
    ShadowSystem sys;
    sys.paths = Eigen::MatrixXd::Zero(P, layout.soi.size());
    std::vector<std::vector<ShadowRay>> per_entry(P);

#pragma omp parallel for schedule(dynamic)
    for (int p = 0; p < P; ++p) {
        const Eigen::MatrixXcd c = k4 * (wa.col(p).asDiagonal() * link * wb.col(p).asDiagonal());
        const cd total = c.sum();
        const double mag = std::abs(total);
        if (mag == 0.0)
            continue;
        const Eigen::ArrayXXd w = (c.array() * std::conj(total)).real() / mag;
        std::vector<Eigen::Index> idx(w.size());
        std::iota(idx.begin(), idx.end(), 0);
        const std::size_t keep = std::min<std::size_t>(rays_per_entry, idx.size());
        std::partial_sort(idx.begin(), idx.begin() + keep, idx.end(),
                          [&](Eigen::Index a, Eigen::Index b) { return w(a) > w(b) || (w(a) == w(b) && a < b); });
        double wsum = 0.0;
        Eigen::VectorXd row = Eigen::VectorXd::Zero(layout.soi.size());
        for (std::size_t r = 0; r < keep; ++r) {
            const Eigen::Index m = idx[r];
            if (!(w(m) > 0.0))
                break;
            const int i = static_cast<int>(m % fa.cols());
            const int j = static_cast<int>(m / fa.cols());
            per_entry[p].push_back({p, i, j, w(m)});
            wsum += w(m);
            for (const Chord& ch : chord_lengths(layout.soi, fa.col(i), fb.col(j)))
                row[ch.cell] += w(m) * ch.length;
        }
        if (wsum > 0.0)
            sys.paths.row(p) = row.transpose() / wsum;
    }
    for (auto& v : per_entry)
        sys.rays.insert(sys.rays.end(), v.begin(), v.end());
    return sys;
}

Eigen::VectorXd entry_energy(const PsdTensor& psd, int rx)
{
    if (rx < 0 || rx >= psd.receivers)
        throw std::invalid_argument("entry_energy: receiver index out of range");
    Eigen::VectorXd e(psd.patterns);
    for (int p = 0; p < psd.patterns; ++p)
        e[p] = psd.values.segment((static_cast<Eigen::Index>(rx) * psd.patterns + p) * psd.bins, psd.bins).sum();
    return e;
}

Eigen::VectorXd transmission_attenuation(const Eigen::VectorXd& energy_meas,
                                         const Eigen::VectorXd& energy_base)
{
    if (energy_meas.size() != energy_base.size())
        throw std::invalid_argument("transmission_attenuation: size mismatch");
    Eigen::VectorXd a(energy_meas.size());
    for (Eigen::Index m = 0; m < a.size(); ++m) {
        const double em = energy_meas[m], eb = energy_base[m];
        a[m] = (em > 0.0 && eb > 0.0) ? std::max(0.0, std::log(eb / em)) : 0.0;
    }
    return a;
}

Eigen::VectorXd art_solve(const Eigen::MatrixXd& paths, const Eigen::VectorXd& attenuation,
                          int iterations, double relax, ArtTrace* trace)
{
    if (attenuation.size() != paths.rows())
        throw std::invalid_argument("art_solve: attenuation length does not match path rows");
    if (!(relax > 0.0 && relax <= 1.0))
        throw std::invalid_argument("art_solve: relax must lie in (0, 1]");
    if (iterations < 0)
        throw std::invalid_argument("art_solve: iterations must be non-negative");

    Eigen::VectorXd x = Eigen::VectorXd::Zero(paths.cols());
    const Eigen::VectorXd row_norm2 = paths.rowwise().squaredNorm();
    if (trace)
        trace->row_residual_max.clear();
    for (int it = 0; it < iterations; ++it) {
        for (Eigen::Index m = 0; m < paths.rows(); ++m) {
            if (row_norm2[m] <= 0.0)
                continue;
            const double r = attenuation[m] - paths.row(m).dot(x);
            x += (relax * r / row_norm2[m]) * paths.row(m).transpose();
            x = x.cwiseMax(0.0);
        }
        if (trace && paths.rows() > 0)
            trace->row_residual_max.push_back((attenuation - paths * x).cwiseAbs().maxCoeff());
    }
    if (trace)
        trace->unscaled = x;
    const double peak = x.size() ? x.maxCoeff() : 0.0;
    if (peak > 0.0)
        x /= peak;
    return x;
}

// --- projection -------------------------------------------------------------

Eigen::ArrayXXd project_volume(const SceneGrid& grid, const Eigen::VectorXd& volume, int width,
                               int height)
{
    if (volume.size() != grid.size())
        throw std::invalid_argument("project_volume: volume does not match the grid");
    if (width < 1 || height < 1)
        throw std::invalid_argument("project_volume: empty image");
    const Eigen::Vector3i q = grid.counts();

    // mip(iz, iy) = max over depth
    Eigen::ArrayXXd mip = Eigen::ArrayXXd::Constant(q.z(), q.y(), -std::numeric_limits<double>::infinity());
    for (int n = 0; n < grid.size(); ++n) {
        const Eigen::Vector3i c = grid.coords(n);
        mip(c.z(), c.y()) = std::max(mip(c.z(), c.y()), volume[n]);
    }

    const ImagePlane plane{grid.bounds(), width, height};
    const Vec3 cell = grid.cell_size();
    Eigen::ArrayXXd img(height, width);
    auto sample = [&](double u, double v) {
        u = std::clamp(u, 0.0, q.y() - 1.0);
        v = std::clamp(v, 0.0, q.z() - 1.0);
        const int iy = std::min(static_cast<int>(u), q.y() - 2 < 0 ? 0 : q.y() - 2);
        const int iz = std::min(static_cast<int>(v), q.z() - 2 < 0 ? 0 : q.z() - 2);
        const int iy1 = std::min(iy + 1, q.y() - 1), iz1 = std::min(iz + 1, q.z() - 1);
        const double fu = u - iy, fv = v - iz;
        return (1 - fu) * (1 - fv) * mip(iz, iy) + fu * (1 - fv) * mip(iz, iy1) +
               (1 - fu) * fv * mip(iz1, iy) + fu * fv * mip(iz1, iy1);
    };
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            const Eigen::Vector2d yz = plane.to_yz(c + 0.5, r + 0.5);
            const double u = (yz.x() - grid.origin().y()) / cell.y() - 0.5;
            const double v = (yz.y() - grid.origin().z()) / cell.z() - 0.5;
            img(r, c) = sample(u, v);
        }
    return img.cwiseMax(0.0).cwiseMin(1.0);
}

namespace {

Eigen::VectorXd unit_peak(const Eigen::VectorXd& v)
{
    const double peak = v.size() ? v.maxCoeff() : 0.0;
    return peak > 0.0 ? Eigen::VectorXd(v.cwiseMax(0.0) / peak) : Eigen::VectorXd::Zero(v.size());
}

} // namespace

ReconstructedImage fuse_and_project(const Eigen::VectorXd& reflection_volume,
                                    const Eigen::VectorXd& shadow_volume,
                                    const FusionWeights& weights, const SystemLayout& layout,
                                    int width, int height)
{
    if (weights.reflection < 0.0 || weights.shadow < 0.0 ||
        weights.reflection + weights.shadow <= 0.0)
        throw std::invalid_argument("fuse_and_project: weights must be non-negative and not both zero");
    if (reflection_volume.size() != shadow_volume.size())
        throw std::invalid_argument("fuse_and_project: volume sizes differ");

    ReconstructedImage out;
    out.volume = unit_peak(weights.reflection * unit_peak(reflection_volume) +
                           weights.shadow * unit_peak(shadow_volume));
    out.image = project_volume(layout.soi, out.volume, width, height);
    return out;
}

} // namespace duoris
