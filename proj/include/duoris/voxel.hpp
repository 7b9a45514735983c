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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace duoris {

/// Parameter interval [t0, t1] of a + t (b - a), t in [0, 1], inside `box`.
/// Returns false when the segment misses the box.
inline bool clip_segment(const Aabb& box, const Vec3& a, const Vec3& b, double& t0, double& t1)
{
    const Vec3 d = b - a;
    t0 = 0.0;
    t1 = 1.0;
    for (int k = 0; k < 3; ++k) {
        if (d[k] == 0.0) {
            if (a[k] < box.min[k] || a[k] > box.max[k])
                return false;
            continue;
        }
        double lo = (box.min[k] - a[k]) / d[k];
        double hi = (box.max[k] - a[k]) / d[k];
        if (lo > hi)
            std::swap(lo, hi);
        t0 = std::max(t0, lo);
        t1 = std::min(t1, hi);
        if (t0 > t1)
            return false;
    }
    return true;
}

/// Incremental grid marching (Amanatides & Woo) of the segment a -> b through
/// the voxel lattice of `grid`. Calls visit(cell, t_enter, t_exit) for every
/// cell the segment passes through, in order; t is the segment parameter in
/// [0, 1]. `visit` returns false to stop early.
template <typename Visit>
void traverse_segment(const SceneGrid& grid, const Vec3& a, const Vec3& b, Visit&& visit)
{
    double t0 = 0.0, t1 = 1.0;
    if (!clip_segment(grid.bounds(), a, b, t0, t1) || t1 <= t0)
        return;

    const Vec3 d = b - a;
    const Vec3 cell = grid.cell_size();
    const Eigen::Vector3i q = grid.counts();

    int idx[3];
    int step[3];
    double t_max[3];
    double t_delta[3];
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        // Locate the entry cell from a point nudged along the segment so that
        // an entry exactly on a cell face resolves to the cell being entered.
        const double probe = a[k] + (t0 + 1e-9 * (t1 - t0)) * d[k];
        idx[k] = std::clamp(static_cast<int>(std::floor((probe - grid.origin()[k]) / cell[k])), 0,
                            q[k] - 1);
        if (d[k] > 0.0) {
            step[k] = 1;
            t_max[k] = (grid.origin()[k] + (idx[k] + 1) * cell[k] - a[k]) / d[k];
            t_delta[k] = cell[k] / d[k];
        } else if (d[k] < 0.0) {
            step[k] = -1;
            t_max[k] = (grid.origin()[k] + idx[k] * cell[k] - a[k]) / d[k];
            t_delta[k] = -cell[k] / d[k];
        } else {
            step[k] = 0;
            t_max[k] = inf;
            t_delta[k] = inf;
        }
    }

    double t = t0;
    while (true) {
        const int axis = (t_max[0] < t_max[1]) ? (t_max[0] < t_max[2] ? 0 : 2)
                                               : (t_max[1] < t_max[2] ? 1 : 2);
        const double t_exit = std::min(t_max[axis], t1);
        if (!visit(grid.index(idx[0], idx[1], idx[2]), t, t_exit))
            return;
        if (t_exit >= t1)
            return;
        idx[axis] += step[axis];
        if (idx[axis] < 0 || idx[axis] >= q[axis])
            return;
        t = t_exit;
        t_max[axis] += t_delta[axis];
    }
}

struct Chord {
    int cell;
    double length; // metres
};

/// Per-cell chord lengths of the segment a -> b; empty when it misses the SoI.
std::vector<Chord> chord_lengths(const SceneGrid& grid, const Vec3& a, const Vec3& b);

/// Transmission flag: 0 iff the segment a -> b crosses a cell with chi > 0
/// over a nonzero length, else 1.
int mu_flag(const SceneGrid& grid, const Vec3& a, const Vec3& b);

/// mu_flag for every (forward element i, backward element j) pair, K_f x K_b.
Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>
occlusion_mask(const SceneGrid& grid, const Eigen::Matrix3Xd& forward, const Eigen::Matrix3Xd& backward);

} // namespace duoris
