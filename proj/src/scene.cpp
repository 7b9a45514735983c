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

#include "duoris/scene.hpp"
#include "duoris/util.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <stdexcept>

namespace duoris {

RisPanel make_panel(const Vec3& center, const Vec3& normal, const Vec3& up, int n, double side)
{
    if (n < 1 || !(side > 0.0))
        throw std::invalid_argument("make_panel: need n >= 1 and side > 0");
    RisPanel p;
    p.center = center;
    p.normal = normal.normalized();
    p.up = up.normalized();
    p.nx = n;
    p.ny = n;
    p.pitch = side / n;
    p.element_area = p.pitch * p.pitch;
    return p;
}

Eigen::Matrix3Xd element_positions(const RisPanel& panel)
{
    const Vec3 lateral = panel.lateral();
    Eigen::Matrix3Xd pos(3, panel.size());
    for (int row = 0; row < panel.ny; ++row) {
        const double v = (row - 0.5 * (panel.ny - 1)) * panel.pitch;
        for (int col = 0; col < panel.nx; ++col) {
            const double u = (col - 0.5 * (panel.nx - 1)) * panel.pitch;
            pos.col(row * panel.nx + col) = panel.center + u * lateral + v * panel.up;
        }
    }
    return pos;
}

// --- SceneGrid ----------------------------------------------------------------

SceneGrid::SceneGrid(const Vec3& origin, const Vec3& extents, const Eigen::Vector3i& counts)
    : origin_(origin), extents_(extents), counts_(counts)
{
    if ((counts.array() < 1).any())
        throw std::invalid_argument("SceneGrid: counts must be >= 1");
    if ((extents.array() <= 0.0).any())
        throw std::invalid_argument("SceneGrid: extents must be positive");
    contrast_ = Eigen::VectorXd::Zero(counts.prod());
}

Eigen::Vector3i SceneGrid::coords(int n) const
{
    const int ix = n % counts_.x();
    const int iy = (n / counts_.x()) % counts_.y();
    const int iz = n / (counts_.x() * counts_.y());
    return {ix, iy, iz};
}

Vec3 SceneGrid::cell_center(int n) const
{
    return origin_ + (coords(n).cast<double>().array() + 0.5).matrix().cwiseProduct(cell_size());
}

Eigen::Matrix3Xd SceneGrid::cell_centers() const
{
    Eigen::Matrix3Xd c(3, size());
    for (int n = 0; n < size(); ++n)
        c.col(n) = cell_center(n);
    return c;
}

std::vector<int> SceneGrid::occupied() const
{
    std::vector<int> idx;
    for (int n = 0; n < contrast_.size(); ++n)
        if (contrast_[n] != 0.0)
            idx.push_back(n);
    return idx;
}

SceneGrid SceneGrid::empty_copy() const
{
    SceneGrid g = *this;
    g.contrast_.setZero();
    return g;
}

// --- layout -----------------------------------------------------------------

SystemLayout default_layout(ScaleProfile scale)
{
    const bool full = scale == ScaleProfile::full;
    const int elements = full ? 64 : 16;
    const double side = 1.4;

    SystemLayout l;
    l.forward = make_panel({0.0, 0.0, 1.0}, Vec3::UnitX(), Vec3::UnitZ(), elements, side);
    l.backward = make_panel({3.0, 0.0, 1.0}, -Vec3::UnitX(), Vec3::UnitZ(), elements, side);
    l.tx = {-1.2, -1.6, 1.0};
    l.rx1 = {-1.2, 1.6, 1.0};
    l.rx2 = {5.0, 0.0, 1.0};
    const Eigen::Vector3i counts = full ? Eigen::Vector3i(20, 40, 40) : Eigen::Vector3i(10, 20, 20);
    l.soi = SceneGrid({1.0, -1.0, 0.0}, {1.0, 2.0, 2.0}, counts);
    return l;
}

namespace {

void validate_panel(const RisPanel& p, const char* name)
{
    constexpr double tol = 1e-9;
    if (std::abs(p.normal.norm() - 1.0) > tol || std::abs(p.up.norm() - 1.0) > tol ||
        std::abs(p.normal.dot(p.up)) > tol)
        throw std::invalid_argument(std::string(name) + ": normal and up must be orthonormal");
    if (p.nx < 1 || p.ny < 1 || !(p.pitch > 0.0) || !(p.element_area > 0.0))
        throw std::invalid_argument(std::string(name) + ": bad lattice parameters");
}

} // namespace

void validate_layout(const SystemLayout& layout)
{
    validate_panel(layout.forward, "forward panel");
    validate_panel(layout.backward, "backward panel");

    const Aabb box = layout.soi.bounds();
    for (int corner = 0; corner < 8; ++corner) {
        const Vec3 p(corner & 1 ? box.max.x() : box.min.x(), corner & 2 ? box.max.y() : box.min.y(),
                     corner & 4 ? box.max.z() : box.min.z());
        if (layout.forward.normal.dot(p - layout.forward.center) <= 0.0 ||
            layout.backward.normal.dot(p - layout.backward.center) <= 0.0)
            throw std::invalid_argument("layout: SoI must lie strictly between the panel planes");
    }

    for (const RisPanel* panel : {&layout.forward, &layout.backward}) {
        const Eigen::Matrix3Xd pos = element_positions(*panel);
        for (const Vec3* t : {&layout.tx, &layout.rx1, &layout.rx2})
            if ((pos.colwise() - *t).colwise().norm().minCoeff() < 1e-9)
                throw std::invalid_argument("layout: transceiver coincides with a RIS element");
    }
}

// --- solids -----------------------------------------------------------------

bool contains(const Solid& solid, const Vec3& p)
{
    if (const auto* e = std::get_if<Ellipsoid>(&solid)) {
        const Vec3 q = (e->rotation.transpose() * (p - e->center)).cwiseQuotient(e->semi_axes);
        return q.squaredNorm() <= 1.0;
    }
    const auto& b = std::get<Box>(solid);
    return (p.array() >= b.min.array()).all() && (p.array() < b.max.array()).all();
}

Aabb bounding_box(const Solid& solid)
{
    if (const auto* e = std::get_if<Ellipsoid>(&solid)) {
        const Eigen::Matrix3d scaled = e->rotation * e->semi_axes.asDiagonal();
        const Vec3 half = scaled.rowwise().norm();
        return {e->center - half, e->center + half};
    }
    const auto& b = std::get<Box>(solid);
    return {b.min, b.max};
}

Vec3 centroid(const Solid& solid)
{
    if (const auto* e = std::get_if<Ellipsoid>(&solid))
        return e->center;
    const auto& b = std::get<Box>(solid);
    return 0.5 * (b.min + b.max);
}

bool hit_by_depth_line(const Solid& solid, double y, double z)
{
    if (const auto* e = std::get_if<Ellipsoid>(&solid)) {
        const Vec3 q0 =
            (e->rotation.transpose() * (Vec3(0.0, y, z) - e->center)).cwiseQuotient(e->semi_axes);
        const Vec3 dq = (e->rotation.transpose() * Vec3::UnitX()).cwiseQuotient(e->semi_axes);
        const double a = dq.squaredNorm();
        const double b = q0.dot(dq);
        const double c = q0.squaredNorm() - 1.0;
        return b * b - a * c >= 0.0;
    }
    const auto& b = std::get<Box>(solid);
    return y >= b.min.y() && y < b.max.y() && z >= b.min.z() && z < b.max.z();
}

bool Phantom::contains(const Vec3& p) const
{
    return std::any_of(parts.begin(), parts.end(),
                       [&](const Solid& s) { return duoris::contains(s, p); });
}

const char* to_string(PoseFamily f)
{
    switch (f) {
    case PoseFamily::stand: return "stand";
    case PoseFamily::arms_out: return "arms_out";
    case PoseFamily::lean: return "lean";
    case PoseFamily::sit: return "sit";
    }
    return "stand";
}

PoseFamily pose_family_from_string(const std::string& s)
{
    for (auto f : {PoseFamily::stand, PoseFamily::arms_out, PoseFamily::lean, PoseFamily::sit})
        if (s == to_string(f))
            return f;
    throw std::invalid_argument("unknown pose family: " + s);
}

RasterResult rasterize_phantom(const Phantom& phantom, const SceneGrid& grid)
{
    RasterResult out{grid.empty_copy(), false};
    Eigen::VectorXd& chi = out.grid.contrast();
    for (int n = 0; n < grid.size(); ++n)
        if (phantom.contains(grid.cell_center(n)))
            chi[n] = phantom.chi_value;
    out.outside_soi = !phantom.parts.empty() && (chi.array() == 0.0).all();
    return out;
}

// --- humanoid sampling --------------------------------------------------------

namespace {

constexpr double deg = std::numbers::pi / 180.0;

Ellipsoid limb(const Vec3& joint, const Vec3& dir, double length, double radius)
{
    const Vec3 d = dir.normalized();
    Ellipsoid e;
    e.center = joint + 0.5 * length * d;
    e.semi_axes = {radius, radius, 0.5 * length};
    e.rotation = Eigen::Quaterniond::FromTwoVectors(Vec3::UnitZ(), d).toRotationMatrix();
    return e;
}

Ellipsoid rotated(Ellipsoid e, const Eigen::Matrix3d& q, const Vec3& pivot)
{
    e.center = pivot + q * (e.center - pivot);
    e.rotation = q * e.rotation;
    return e;
}

} // namespace

Phantom sample_random_humanoid(std::uint64_t seed, PoseFamily family, const Aabb& soi,
                               double chi_value)
{
    Rng rng(seed ^ 0x68756d616e6f6964ULL);
    const Vec3 room = soi.size();

    double h = rng.uniform(0.85, 1.0) * 1.75;
    h = std::min(h, 0.95 * room.z());

    auto jitter = [&](double range_deg) { return rng.uniform(-range_deg, range_deg) * deg; };

    const bool sitting = family == PoseFamily::sit;
    const double hip_z = sitting ? 0.27 * h : 0.50 * h;
    const double hip_w = 0.09 * h;
    const double leg_r = 0.04 * h;
    const double arm_r = 0.03 * h;

    std::vector<Ellipsoid> upper; // torso, head, arms (subject to leaning)
    std::vector<Ellipsoid> lower;

    Ellipsoid torso;
    torso.center = {0.0, 0.0, hip_z + 0.17 * h};
    torso.semi_axes = {0.07 * h, 0.11 * h, 0.18 * h};
    upper.push_back(torso);

    Ellipsoid head;
    head.center = {0.0, 0.0, hip_z + 0.43 * h};
    head.semi_axes = {0.06 * h, 0.055 * h, 0.07 * h};
    upper.push_back(head);

    double abduction = 0.0;
    switch (family) {
    case PoseFamily::arms_out: abduction = rng.uniform(70.0, 95.0) * deg; break;
    default: abduction = rng.uniform(6.0, 20.0) * deg; break;
    }
    const double shoulder_z = hip_z + 0.31 * h;
    for (int side : {-1, 1}) {
        const double a = abduction + jitter(5.0);
        const Vec3 shoulder(0.0, side * 0.13 * h, shoulder_z);
        upper.push_back(limb(shoulder, Vec3(0.0, side * std::sin(a), -std::cos(a)), 0.42 * h, arm_r));
    }

    for (int side : {-1, 1}) {
        const Vec3 hip(0.0, side * hip_w, hip_z);
        if (sitting) {
            const double len_thigh = 0.25 * h;
            const Vec3 knee = hip + Vec3(-len_thigh, side * 0.02 * h, 0.0);
            lower.push_back(limb(hip, knee - hip, len_thigh, leg_r));
            lower.push_back(limb(knee, Vec3(jitter(8.0), 0.0, -1.0), hip_z, leg_r * 0.85));
        } else {
            const double spread = rng.uniform(2.0, 10.0) * deg;
            lower.push_back(limb(hip, Vec3(0.0, side * std::sin(spread), -std::cos(spread)),
                                 hip_z / std::cos(spread), leg_r));
        }
    }

    if (family == PoseFamily::lean) {
        const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
        const double angle = sign * rng.uniform(10.0, 22.0) * deg;
        const Eigen::Matrix3d q = Eigen::AngleAxisd(angle, Vec3::UnitX()).toRotationMatrix();
        const Vec3 pivot(0.0, 0.0, hip_z);
        for (auto& e : upper)
            e = rotated(e, q, pivot);
    }

    Phantom ph;
    ph.chi_value = chi_value;
    ph.pose = family;

    const Eigen::Matrix3d yaw = Eigen::AngleAxisd(jitter(15.0), Vec3::UnitZ()).toRotationMatrix();
    for (auto* group : {&upper, &lower})
        for (const auto& e : *group)
            ph.parts.emplace_back(rotated(e, yaw, Vec3::Zero()));

    Aabb box = bounding_box(ph.parts.front());
    for (const auto& s : ph.parts) {
        const Aabb b = bounding_box(s);
        box.min = box.min.cwiseMin(b.min);
        box.max = box.max.cwiseMax(b.max);
    }

    Vec3 offset;
    for (int axis = 0; axis < 2; ++axis) {
        const double lo = soi.min[axis] - box.min[axis];
        const double hi = soi.max[axis] - box.max[axis];
        offset[axis] = lo <= hi ? rng.uniform(lo, hi) : 0.5 * (lo + hi);
    }
    offset.z() = soi.min.z() + 0.01 - box.min.z();

    for (auto& s : ph.parts)
        std::get<Ellipsoid>(s).center += offset;
    return ph;
}

Phantom sample_random_humanoid(std::uint64_t seed, const Aabb& soi, double chi_value)
{
    Rng rng(seed ^ 0x706f736566616d31ULL);
    const auto family = static_cast<PoseFamily>(rng.below(4));
    return sample_random_humanoid(seed, family, soi, chi_value);
}

// --- image plane --------------------------------------------------------------

Eigen::Vector2d ImagePlane::to_yz(double col, double row) const
{
    const Vec3 s = soi.size();
    return {soi.max.y() - col * s.y() / width, soi.max.z() - row * s.z() / height};
}

Eigen::Vector2d ImagePlane::to_pixel(double y, double z) const
{
    const Vec3 s = soi.size();
    return {(soi.max.y() - y) * width / s.y(), (soi.max.z() - z) * height / s.z()};
}

Eigen::ArrayXXd render_ground_truth(const Phantom& phantom, const SystemLayout& layout, int width,
                                    int height)
{
    if (width < 8 || height < 8)
        throw std::invalid_argument("render_ground_truth: image must be at least 8x8");
    const ImagePlane plane{layout.soi.bounds(), width, height};
    Eigen::ArrayXXd img = Eigen::ArrayXXd::Zero(height, width);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const Eigen::Vector2d yz = plane.to_yz(c + 0.5, r + 0.5);
            for (const auto& s : phantom.parts) {
                if (hit_by_depth_line(s, yz.x(), yz.y())) {
                    img(r, c) = 1.0;
                    break;
                }
            }
        }
    }
    return img;
}

} // namespace duoris
