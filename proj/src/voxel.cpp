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

#include "duoris/voxel.hpp"

namespace duoris {

namespace {
constexpr double kMinChord = 1e-12; // relative to segment length
}

std::vector<Chord> chord_lengths(const SceneGrid& grid, const Vec3& a, const Vec3& b)
{
    std::vector<Chord> out;
    const double len = (b - a).norm();
    traverse_segment(grid, a, b, [&](int cell, double t_in, double t_out) {
        const double l = (t_out - t_in) * len;
        if (l > kMinChord * len)
            out.push_back({cell, l});
        return true;
    });
    return out;
}

int mu_flag(const SceneGrid& grid, const Vec3& a, const Vec3& b)
{
    const Eigen::VectorXd& chi = grid.contrast();
    int flag = 1;
    traverse_segment(grid, a, b, [&](int cell, double t_in, double t_out) {
        if (chi[cell] > 0.0 && (t_out - t_in) > kMinChord) {
            flag = 0;
            return false;
        }
        return true;
    });
    return flag;
}

Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>
occlusion_mask(const SceneGrid& grid, const Eigen::Matrix3Xd& forward, const Eigen::Matrix3Xd& backward)
{
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> mu(forward.cols(), backward.cols());
    const bool empty = (grid.contrast().array() <= 0.0).all();
    if (empty) {
        mu.setOnes();
        return mu;
    }
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < backward.cols(); ++j)
        for (Eigen::Index i = 0; i < forward.cols(); ++i)
            mu(i, j) = static_cast<std::uint8_t>(mu_flag(grid, forward.col(i), backward.col(j)));
    return mu;
}

} // namespace duoris
