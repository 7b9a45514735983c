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

// Slow, loop-by-loop reference implementations used to cross-check the
// vectorized library code.

#pragma once

#include "duoris/forward.hpp"
#include "duoris/util.hpp"

namespace oracle {

using duoris::cd;
using duoris::Vec3;

inline double random_pattern_mean_intensity(const duoris::RisPanel& panel,
                                            const duoris::ReflectionModel& model, const Vec3& src,
                                            const Vec3& focus, double omega, int n, std::uint64_t seed)
{
    duoris::Rng rng(seed);
    duoris::RisPattern p{std::vector<std::uint8_t>(panel.size())};
    double acc = 0;
    for (int t = 0; t < n; ++t) {
        for (auto& b : p.bits)
            b = rng.bernoulli(0.5);
        acc += std::norm(duoris::field_at(panel, p, model, src, focus, omega));
    }
    return acc / n;
}

inline cd g(const Vec3& a, const Vec3& b, double k0)
{
    const double r = (a - b).norm();
    return std::exp(cd(0.0, k0 * r)) / (4.0 * std::numbers::pi * r);
}

struct Reference {
    Eigen::MatrixXcd y1, two_hop, scatter;
};

/// Direct triple-loop evaluation of the Born model for every schedule entry.
inline Reference naive_model(const duoris::SystemLayout& layout, const duoris::SceneGrid& scene,
                             const duoris::IlluminationSchedule& schedule,
                             const duoris::FrequencyGrid& grid, const duoris::SourceWaveform& wave,
                             const duoris::ForwardOptions& opts = {})
{
    const Eigen::Matrix3Xd fa = duoris::element_positions(layout.forward);
    const Eigen::Matrix3Xd fb = duoris::element_positions(layout.backward);
    const int ka = static_cast<int>(fa.cols()), kb = static_cast<int>(fb.cols());
    const int P = schedule.size(), F = grid.n_bins();
    const double c = 1.0 / std::sqrt(opts.medium.eps0 * opts.medium.mu0);

    Eigen::MatrixXi mu(ka, kb);
    for (int i = 0; i < ka; ++i)
        for (int j = 0; j < kb; ++j)
            mu(i, j) = duoris::mu_flag(scene, fa.col(i), fb.col(j));

    Reference r;
    r.y1.setZero(P, F);
    r.two_hop.setZero(P, F);
    r.scatter.setZero(P, F);
    for (int p = 0; p < P; ++p) {
        const Eigen::VectorXd ua = schedule.entries[p].forward.coefficients(layout.forward, opts.reflection);
        const Eigen::VectorXd ub = schedule.entries[p].backward.coefficients(layout.backward, opts.reflection);
        for (int f = 0; f < F; ++f) {
            const double k0 = grid.omega(f) / c;
            const double k2 = k0 * k0;
            const cd s = wave.spectrum[f];
            cd y1 = 0, hop = 0, sc = 0;
            for (int n = 0; n < scene.size(); ++n) {
                const double chi = scene.contrast()[n];
                if (chi == 0.0)
                    continue;
                const Vec3 rn = scene.cell_center(n);
                cd inc = 0;
                for (int i = 0; i < ka; ++i)
                    inc += k2 * ua[i] * g(fa.col(i), rn, k0) * g(layout.tx, fa.col(i), k0);
                const cd src = k2 * scene.cell_area() * chi * inc;
                y1 += src * g(layout.rx1, rn, k0);
                for (int j = 0; j < kb; ++j)
                    sc += k2 * ub[j] * g(layout.rx2, fb.col(j), k0) * g(fb.col(j), rn, k0) * src;
            }
            for (int i = 0; i < ka; ++i)
                for (int j = 0; j < kb; ++j)
                    if (mu(i, j))
                        hop += k2 * k2 * ub[j] * g(layout.rx2, fb.col(j), k0) * ua[i] *
                               g(fa.col(i), fb.col(j), k0) * g(layout.tx, fa.col(i), k0);
            if (opts.direct_path)
                y1 += g(layout.tx, layout.rx1, k0);
            r.y1(p, f) = s * y1;
            r.two_hop(p, f) = s * hop;
            r.scatter(p, f) = s * sc;
        }
    }
    return r;
}

} // namespace oracle
