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

#include "duoris/forward.hpp"
#include "duoris/util.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace duoris {

namespace {

Eigen::MatrixXd pairwise_distances(const Eigen::Matrix3Xd& a, const Eigen::Matrix3Xd& b)
{
    Eigen::MatrixXd d(a.cols(), b.cols());
    for (Eigen::Index j = 0; j < b.cols(); ++j)
        d.col(j) = (a.colwise() - b.col(j)).colwise().norm().transpose();
    if (d.size() > 0 && !(d.minCoeff() > 0.0))
        throw std::domain_error("forward model: coincident points in the geometry");
    return d;
}

Eigen::VectorXd distances_to(const Eigen::Matrix3Xd& a, const Vec3& p)
{
    Eigen::VectorXd d = (a.colwise() - p).colwise().norm().transpose();
    if (d.size() > 0 && !(d.minCoeff() > 0.0))
        throw std::domain_error("forward model: coincident points in the geometry");
    return d;
}

template <typename Derived>
Eigen::Matrix<cd, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime>
greens_of(const Eigen::MatrixBase<Derived>& dist, double k0)
{
    return dist.unaryExpr([k0](double r) { return greens_at_distance(r, k0); });
}

/// Complex times real product, evaluated as two real GEMMs.
Eigen::MatrixXcd cmul(const Eigen::MatrixXcd& a, const Eigen::MatrixXd& b)
{
    Eigen::MatrixXcd out(a.rows(), b.cols());
    out.real() = a.real() * b;
    out.imag() = a.imag() * b;
    return out;
}

Eigen::MatrixXd pattern_matrix(const IlluminationSchedule& schedule, const RisPanel& panel,
                               const ReflectionModel& model, bool forward)
{
    Eigen::MatrixXd w(panel.size(), schedule.size());
    for (int p = 0; p < schedule.size(); ++p) {
        const auto& e = schedule.entries[p];
        w.col(p) = (forward ? e.forward : e.backward).coefficients(panel, model);
    }
    return w;
}

} // namespace

PsdTensor to_psd(const Measurement& m)
{
    PsdTensor t;
    t.patterns = static_cast<int>(m.y1.rows());
    t.bins = static_cast<int>(m.y1.cols());
    t.values.resize(2 * t.patterns * t.bins);
    for (int p = 0; p < t.patterns; ++p)
        for (int f = 0; f < t.bins; ++f) {
            t(0, p, f) = std::norm(m.y1(p, f));
            t(1, p, f) = std::norm(m.y2(p, f));
        }
    return t;
}

Measurement simulate_schedule(const SystemLayout& layout, const SceneGrid& scene,
                              const IlluminationSchedule& schedule, const FrequencyGrid& grid,
                              const SourceWaveform& waveform, const ForwardOptions& opts,
                              Y2Terms* terms)
{
    if (waveform.spectrum.size() != grid.n_bins())
        throw std::invalid_argument("simulate: waveform length does not match the frequency grid");
    if (scene.size() != layout.soi.size())
        throw std::invalid_argument("simulate: scene is not defined on the layout SoI");

    const int P = schedule.size();
    const int F = grid.n_bins();
    const Eigen::Matrix3Xd fwd = element_positions(layout.forward);
    const Eigen::Matrix3Xd bwd = element_positions(layout.backward);
    const Eigen::MatrixXd wa = pattern_matrix(schedule, layout.forward, opts.reflection, true);
    const Eigen::MatrixXd wb = pattern_matrix(schedule, layout.backward, opts.reflection, false);

    const std::vector<int> occ = scene.occupied();
    const int n_occ = static_cast<int>(occ.size());
    Eigen::Matrix3Xd cells(3, n_occ);
    Eigen::VectorXd weight(n_occ); // A_n chi_n
    for (int k = 0; k < n_occ; ++k) {
        cells.col(k) = scene.cell_center(occ[k]);
        weight[k] = scene.cell_area() * scene.contrast()[occ[k]];
    }

    const Eigen::VectorXd d_tx = distances_to(fwd, layout.tx);
    const Eigen::VectorXd d_rx2 = distances_to(bwd, layout.rx2);
    const Eigen::MatrixXd d_fb = pairwise_distances(fwd, bwd);
    const Eigen::MatrixXd d_cf = pairwise_distances(cells, fwd);
    const Eigen::MatrixXd d_cb = pairwise_distances(cells, bwd);
    const Eigen::VectorXd d_rx1 = distances_to(cells, layout.rx1);
    const double d_direct = (layout.tx - layout.rx1).norm();
    const Eigen::MatrixXd mu = occlusion_mask(scene, fwd, bwd).cast<double>();

    Measurement m;
    m.y1.setZero(P, F);
    Y2Terms y2;
    y2.two_hop.setZero(P, F);
    y2.scatter.setZero(P, F);

#pragma omp parallel for schedule(dynamic)
    for (int f = 0; f < F; ++f) {
        const double k0 = wavenumber(grid.omega(f), opts.medium);
        const double k2 = k0 * k0;
        const cd s = waveform.spectrum[f];
        const Eigen::VectorXcd g_tx = greens_of(d_tx, k0);
        const Eigen::VectorXcd g_rx2 = greens_of(d_rx2, k0);

        if (n_occ > 0) {
            const Eigen::MatrixXcd e_cf = greens_of(d_cf, k0) * g_tx.asDiagonal();
            const Eigen::MatrixXcd e_cb = greens_of(d_cb, k0) * g_rx2.asDiagonal();
            // Illumination of each occupied cell through the forward panel and
            // its coupling to Rx2 through the backward panel, per pattern.
            const Eigen::MatrixXcd illum = cmul(e_cf, wa) * k2;
            const Eigen::MatrixXcd relay = cmul(e_cb, wb) * k2;
            const Eigen::VectorXcd rx1_weight =
                (k2 * weight).cast<cd>().cwiseProduct(greens_of(d_rx1, k0));
            m.y1.col(f) = s * (illum.transpose() * rx1_weight);
            const Eigen::VectorXcd scatter =
                (illum.cwiseProduct(relay).transpose() * (k2 * weight).cast<cd>());
            y2.scatter.col(f) = s * scatter;
        }
        if (opts.direct_path)
            m.y1.col(f).array() += s * greens_at_distance(d_direct, k0);

        const Eigen::MatrixXcd link =
            greens_of(d_fb, k0).cwiseProduct(mu.cast<cd>()) * g_rx2.asDiagonal();
        const Eigen::MatrixXcd x = cmul(link, wb);
        y2.two_hop.col(f) =
            s * k2 * k2 * (x.array().colwise() * g_tx.array()).cwiseProduct(wa.cast<cd>().array())
                              .colwise()
                              .sum()
                              .transpose();
    }

    m.y2 = y2.total();
    if (terms)
        *terms = std::move(y2);
    return m;
}

namespace {

IlluminationSchedule single_entry(const RisPattern& forward, const RisPattern& backward)
{
    IlluminationSchedule s;
    s.entries.push_back({forward, backward, Strategy::III, std::nullopt});
    return s;
}

} // namespace

Eigen::VectorXcd simulate_y1(const SystemLayout& layout, const SceneGrid& scene,
                             const RisPattern& forward, const FrequencyGrid& grid,
                             const SourceWaveform& waveform, const ForwardOptions& opts)
{
    const auto m = simulate_schedule(layout, scene, single_entry(forward, all_zero_pattern(layout.backward)),
                                     grid, waveform, opts);
    return m.y1.row(0).transpose();
}

Y2Terms simulate_y2_terms(const SystemLayout& layout, const SceneGrid& scene,
                          const RisPattern& forward, const RisPattern& backward,
                          const FrequencyGrid& grid, const SourceWaveform& waveform,
                          const ForwardOptions& opts)
{
    Y2Terms t;
    simulate_schedule(layout, scene, single_entry(forward, backward), grid, waveform, opts, &t);
    return t;
}

Eigen::VectorXcd simulate_y2(const SystemLayout& layout, const SceneGrid& scene,
                             const RisPattern& forward, const RisPattern& backward,
                             const FrequencyGrid& grid, const SourceWaveform& waveform,
                             const ForwardOptions& opts)
{
    return simulate_y2_terms(layout, scene, forward, backward, grid, waveform, opts).total().row(0).transpose();
}

std::uint64_t baseline_key(const SystemLayout& layout, const IlluminationSchedule& schedule,
                           const FrequencyGrid& grid, const SourceWaveform& waveform,
                           const ForwardOptions& opts)
{
    Fnv1a h;
    h.array(layout.tx).array(layout.rx1).array(layout.rx2);
    for (const RisPanel* p : {&layout.forward, &layout.backward}) {
        h.array(p->center).array(p->normal).array(p->up);
        h.u64(p->nx).u64(p->ny).f64(p->pitch).f64(p->element_area);
    }
    h.array(layout.soi.origin()).array(layout.soi.extents()).array(layout.soi.counts());
    h.u64(schedule.entries.size());
    for (const auto& e : schedule.entries) {
        h.bytes(e.forward.bits.data(), e.forward.bits.size());
        h.bytes(e.backward.bits.data(), e.backward.bits.size());
    }
    h.array(grid.frequencies()).array(waveform.spectrum);
    h.u64(opts.direct_path).f64(opts.reflection.gamma).u64(static_cast<int>(opts.reflection.mode));
    h.f64(opts.medium.eps0).f64(opts.medium.mu0);
    return h.value();
}

std::shared_ptr<const Measurement> empty_baseline(const SystemLayout& layout,
                                                  const IlluminationSchedule& schedule,
                                                  const FrequencyGrid& grid,
                                                  const SourceWaveform& waveform,
                                                  const ForwardOptions& opts)
{
    static std::mutex mutex;
    static std::map<std::uint64_t, std::shared_ptr<const Measurement>> cache;
    constexpr std::size_t kMaxEntries = 8;

    const std::uint64_t key = baseline_key(layout, schedule, grid, waveform, opts);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }
    auto m = std::make_shared<const Measurement>(
        simulate_schedule(layout, layout.soi.empty_copy(), schedule, grid, waveform, opts));
    std::lock_guard lock(mutex);
    if (cache.size() >= kMaxEntries)
        cache.clear();
    cache.emplace(key, m);
    return m;
}

cd noise_sample(std::uint64_t seed, int rx, int pattern, int bin)
{
    std::uint64_t h = mix64(seed ^ 0x6e6f697365ULL);
    h = mix64(h ^ static_cast<std::uint64_t>(rx));
    h = mix64(h ^ (static_cast<std::uint64_t>(pattern) << 20));
    h = mix64(h ^ (static_cast<std::uint64_t>(bin) << 40));
    const double u1 = to_unit(mix64(h));
    const double u2 = to_unit(mix64(h ^ 0x5bd1e995ULL));
    return std::polar(std::sqrt(-std::log1p(-u1)), 2.0 * std::numbers::pi * u2);
}

Capture capture_psd(const SystemLayout& layout, const SceneGrid& scene,
                    const IlluminationSchedule& schedule, const FrequencyGrid& grid,
                    const SourceWaveform& waveform, const NoiseModel& noise,
                    const ForwardOptions& opts)
{
    Capture c;
    c.measurement = simulate_schedule(layout, scene, schedule, grid, waveform, opts);

    if (noise.enabled) {
        if (!std::isfinite(noise.snr_db))
            throw std::invalid_argument("capture_psd: snr_db must be finite");
        const auto base = empty_baseline(layout, schedule, grid, waveform, opts);
        const double scale = std::pow(10.0, -noise.snr_db / 10.0);
        Eigen::MatrixXcd* ys[2] = {&c.measurement.y1, &c.measurement.y2};
        const Eigen::MatrixXcd* bs[2] = {&base->y1, &base->y2};
        for (int rx = 0; rx < 2; ++rx) {
            const double sigma = std::sqrt(bs[rx]->cwiseAbs2().mean() * scale);
            for (int p = 0; p < ys[rx]->rows(); ++p)
                for (int f = 0; f < ys[rx]->cols(); ++f)
                    (*ys[rx])(p, f) += sigma * noise_sample(noise.seed, rx, p, f);
        }
    }
    c.psd = to_psd(c.measurement);
    return c;
}

} // namespace duoris
