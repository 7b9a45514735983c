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

#include "duoris/em.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace duoris {

struct Aabb {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    bool contains(const Vec3& p) const
    {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
    bool intersects(const Aabb& o) const
    {
        return (min.array() <= o.max.array()).all() && (o.min.array() <= max.array()).all();
    }
    Vec3 size() const { return max - min; }
    Vec3 center() const { return 0.5 * (min + max); }
};

/// Planar RIS. Element (row, col) has flat index row * nx + col; rows advance
/// along `up`, columns along `normal x up`. The lattice is centered on `center`.
struct RisPanel {
    Vec3 center = Vec3::Zero();
    Vec3 normal = Vec3::UnitX();
    Vec3 up = Vec3::UnitZ();
    int nx = 16;
    int ny = 16;
    double pitch = 1.4 / 16;
    double element_area = (1.4 / 16) * (1.4 / 16);

    int size() const { return nx * ny; }
    Vec3 lateral() const { return normal.cross(up); }
    double side_x() const { return nx * pitch; }
    double side_y() const { return ny * pitch; }
};

/// Square panel of side `side` with n x n elements; element area = pitch^2.
RisPanel make_panel(const Vec3& center, const Vec3& normal, const Vec3& up, int n, double side);

/// Element positions as columns of a 3 x K matrix.
Eigen::Matrix3Xd element_positions(const RisPanel& panel);

/// Uniform voxelization of the space of interest. Cell n = (iz * qy + iy) * qx + ix.
/// `cell_area` is the transverse face area dy * dz seen along the panel axis (x).
class SceneGrid {
public:
    SceneGrid() = default;
    SceneGrid(const Vec3& origin, const Vec3& extents, const Eigen::Vector3i& counts);

    const Vec3& origin() const { return origin_; }
    const Vec3& extents() const { return extents_; }
    const Eigen::Vector3i& counts() const { return counts_; }
    Vec3 cell_size() const { return extents_.cwiseQuotient(counts_.cast<double>()); }
    double cell_area() const
    {
        const Vec3 d = cell_size();
        return d.y() * d.z();
    }
    int size() const { return counts_.prod(); }
    Aabb bounds() const { return {origin_, origin_ + extents_}; }

    int index(int ix, int iy, int iz) const { return (iz * counts_.y() + iy) * counts_.x() + ix; }
    Eigen::Vector3i coords(int n) const;
    Vec3 cell_center(int n) const;
    Eigen::Matrix3Xd cell_centers() const;

    Eigen::VectorXd& contrast() { return contrast_; }
    const Eigen::VectorXd& contrast() const { return contrast_; }
    std::vector<int> occupied() const;

    SceneGrid empty_copy() const;

private:
    Vec3 origin_ = Vec3::Zero();
    Vec3 extents_ = Vec3::Ones();
    Eigen::Vector3i counts_ = Eigen::Vector3i::Ones();
    Eigen::VectorXd contrast_ = Eigen::VectorXd::Zero(1);
};

struct SystemLayout {
    Vec3 tx;
    Vec3 rx1;
    Vec3 rx2;
    RisPanel forward;
    RisPanel backward;
    SceneGrid soi;
};

enum class ScaleProfile { desk, full };

/// Deployment geometry. Forward RIS in the plane x = 0 facing +x, backward RIS
/// in x = 3 facing -x, SoI of 2 m width (y) x 2 m height (z) x 1 m depth (x)
/// centered at x = 1.5. Both profiles share every position; only element and
/// voxel counts differ (desk: 16x16 panels, 10x20x20 voxels; full: 64x64,
/// 20x40x40).
SystemLayout default_layout(ScaleProfile scale);

/// Validates the layout invariants, throws std::invalid_argument.
void validate_layout(const SystemLayout& layout);

// --- phantoms ---------------------------------------------------------------

/// Ellipsoid; `rotation` maps local axes to world axes.
struct Ellipsoid {
    Vec3 center = Vec3::Zero();
    Vec3 semi_axes = Vec3::Ones();
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
};

struct Box {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Ones();
};

using Solid = std::variant<Ellipsoid, Box>;

bool contains(const Solid& solid, const Vec3& p);
Aabb bounding_box(const Solid& solid);
Vec3 centroid(const Solid& solid);
/// True if the line {(t, y, z) : t real} meets the solid.
bool hit_by_depth_line(const Solid& solid, double y, double z);

enum class PoseFamily : int { stand = 0, arms_out = 1, lean = 2, sit = 3 };

const char* to_string(PoseFamily f);
PoseFamily pose_family_from_string(const std::string& s);

struct Phantom {
    std::vector<Solid> parts;
    double chi_value = 1.0;
    PoseFamily pose = PoseFamily::stand;

    bool contains(const Vec3& p) const;
};

struct RasterResult {
    SceneGrid grid;
    bool outside_soi = false; // phantom did not reach any cell
};

/// chi = phantom.chi_value at every cell whose center lies inside a part, 0
/// elsewhere. Overwrites any previous contrast.
RasterResult rasterize_phantom(const Phantom& phantom, const SceneGrid& grid);

/// Head, torso, two arms and two legs with pose-dependent joint angles and a
/// uniform random floor position that keeps the whole figure inside `soi`.
Phantom sample_random_humanoid(std::uint64_t seed, PoseFamily family, const Aabb& soi,
                               double chi_value = 1.0);
/// Same, with the pose family drawn from the seed.
Phantom sample_random_humanoid(std::uint64_t seed, const Aabb& soi, double chi_value = 1.0);

// --- ground-truth image plane -----------------------------------------------

/// Orthographic view of the SoI along the depth (x) axis, as seen from the
/// forward RIS: column index grows along -y, row 0 is the top (max z).
/// Pixel (col, row) covers [col, col + 1) x [row, row + 1) in image units.
struct ImagePlane {
    Aabb soi;
    int width = 80;
    int height = 96;

    Eigen::Vector2d to_yz(double col, double row) const;
    Eigen::Vector2d to_pixel(double y, double z) const;
};

/// Binary silhouette, height x width (rows x cols).
Eigen::ArrayXXd render_ground_truth(const Phantom& phantom, const SystemLayout& layout, int width,
                                    int height);

} // namespace duoris
