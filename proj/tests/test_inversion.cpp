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

#include "doctest.h"

#include "duoris/inversion.hpp"
#include "duoris/util.hpp"

#include <algorithm>
#include <numeric>
#include <set>

using namespace duoris;
using doctest::Approx;

namespace {

SystemLayout tiny_layout(int n_elem = 3)
{
    SystemLayout l = default_layout(ScaleProfile::desk);
    l.forward = make_panel(l.forward.center, l.forward.normal, l.forward.up, n_elem, 1.4);
    l.backward = make_panel(l.backward.center, l.backward.normal, l.backward.up, n_elem, 1.4);
    l.soi = SceneGrid(l.soi.origin(), l.soi.extents(), {3, 4, 4});
    return l;
}

IlluminationSchedule random_schedule(const SystemLayout& l, int n, std::uint64_t seed)
{
    Rng rng(seed);
    IlluminationSchedule s;
    for (int p = 0; p < n; ++p) {
        ScheduleEntry e;
        e.forward.bits.resize(l.forward.size());
        e.backward.bits.resize(l.backward.size());
        for (auto& b : e.forward.bits)
            b = rng.bernoulli(0.5);
        for (auto& b : e.backward.bits)
            b = rng.bernoulli(0.5);
        s.entries.push_back(e);
    }
    return s;
}

Eigen::VectorXcd random_complex(Eigen::Index n, Rng& rng)
{
    Eigen::VectorXcd v(n);
    for (auto& z : v)
        z = cd(rng.uniform(-1, 1), rng.uniform(-1, 1));
    return v;
}

// Desk geometry with a reduced band, shared by the localization tests.
struct DeskFixture {
    SystemLayout layout = default_layout(ScaleProfile::desk);
    FrequencyGrid grid{5.8e9, 1.6e8, 32};
    SourceWaveform wave = lfm_spectrum(grid, 1.0);
    IlluminationSchedule schedule = build_schedule(layout, grid, 7);
    SensingMatrix h = build_reflection_matrix(layout, schedule, grid, wave);

    static const DeskFixture& get()
    {
        static const DeskFixture f;
        return f;
    }

    Eigen::VectorXcd delta(const SceneGrid& scene, double snr_db, std::uint64_t seed) const
    {
        NoiseModel nm;
        nm.enabled = true;
        nm.snr_db = snr_db;
        nm.seed = seed;
        const Capture c = capture_psd(layout, scene, schedule, grid, wave, nm);
        const auto base = empty_baseline(layout, schedule, grid, wave);
        return flatten_rows(c.measurement.y1 - base->y1);
    }
};

std::vector<int> top_k(const Eigen::VectorXd& v, int k)
{
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                      [&](int a, int b) { return v[a] > v[b]; });
    idx.resize(k);
    return idx;
}

} // namespace

TEST_CASE("reflection matrix: single cell, single element")
{
    SystemLayout l = tiny_layout(1);
    l.soi = SceneGrid(l.soi.origin(), l.soi.extents(), {1, 1, 1});
    const FrequencyGrid grid(5.8e9, 1.6e8, 1);
    const SourceWaveform w = lfm_spectrum(grid, 1.5, WaveformKind::flat);
    IlluminationSchedule s;
    s.entries.push_back({RisPattern{{0}}, RisPattern{{0}}, Strategy::III, std::nullopt});

    const double k0 = wavenumber(grid.omega(0));
    auto g = [&](const Vec3& a, const Vec3& b) {
        const double r = (a - b).norm();
        return std::polar(1.0 / (4.0 * std::numbers::pi * r), k0 * r);
    };
    const Vec3 rn(1.5, 0, 1), rf = l.forward.center;
    const cd expected = 1.5 * k0 * k0 * 4.0 * g(l.rx1, rn) * k0 * k0 * (1.4 * 1.4 * 0.8) * g(rf, rn) * g(l.tx, rf);

    const SensingMatrix h = build_reflection_matrix(l, s, grid, w);
    REQUIRE(h.rows() == 1);
    REQUIRE(h.cols() == 1);
    CHECK(std::abs(h.h(0, 0) - expected) < 1e-10 * std::abs(expected));
    CHECK(h.provenance == Provenance::reflection);
}

TEST_CASE("reflection matrix: gamma scaling, cap, forward consistency")
{
    const SystemLayout l = tiny_layout();
    const FrequencyGrid grid(5.8e9, 1.6e8, 5);
    const SourceWaveform w = lfm_spectrum(grid, 1.0);
    const IlluminationSchedule s = random_schedule(l, 4, 3);

    ForwardOptions o1, o2;
    o2.reflection.gamma = 2.0 * o1.reflection.gamma;
    const SensingMatrix h1 = build_reflection_matrix(l, s, grid, w, o1);
    const SensingMatrix h2 = build_reflection_matrix(l, s, grid, w, o2);
    CHECK((h2.h - 2.0 * h1.h).norm() <= 1e-14 * h1.h.norm());
    CHECK(h1.rows() == 4 * 5);
    CHECK(h1.cols() == l.soi.size());

    CHECK_THROWS_AS(build_reflection_matrix(l, s, grid, w, o1, 100.0), std::length_error);

    const auto base = empty_baseline(l, s, grid, w);
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        SceneGrid scene = l.soi.empty_copy();
        for (auto& v : scene.contrast())
            v = rng.bernoulli(0.2) ? rng.uniform(0.1, 2.0) : 0.0;
        const Measurement m = simulate_schedule(l, scene, s, grid, w);
        const Eigen::VectorXcd hx = h1.h * scene.contrast().cast<cd>();
        const Eigen::VectorXcd d = flatten_rows(m.y1 - base->y1);
        if (hx.norm() > 0)
            CHECK((d - hx).norm() / hx.norm() < 1e-10);
    }
}

TEST_CASE("matrix-free operator agrees with the dense matrix and is adjoint-consistent")
{
    const SystemLayout l = tiny_layout(4);
    const FrequencyGrid grid(5.8e9, 1.6e8, 6);
    const SourceWaveform w = lfm_spectrum(grid, 1.0);
    const IlluminationSchedule s = random_schedule(l, 5, 8);
    const SensingMatrix h = build_reflection_matrix(l, s, grid, w);
    const DenseOperator dense(h.h);
    const ReflectionOperator mfree(l, s, grid, w);
    REQUIRE(mfree.rows() == h.rows());
    REQUIRE(mfree.cols() == h.cols());

    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::VectorXcd u = random_complex(h.cols(), rng);
        const Eigen::VectorXcd v = random_complex(h.rows(), rng);
        const Eigen::VectorXcd hu = mfree.apply(u);
        CHECK((hu - dense.apply(u)).norm() <= 1e-12 * hu.norm());
        CHECK((mfree.adjoint(v) - dense.adjoint(v)).norm() <= 1e-12 * dense.adjoint(v).norm());
        const cd lhs = v.dot(hu);               // v^H (H u)
        const cd rhs = mfree.adjoint(v).dot(u); // (H^H v)^H u
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
    }
    CHECK((mfree.column_norms() - dense.column_norms()).norm() <= 1e-12 * dense.column_norms().norm());
}

TEST_CASE("matched filter")
{
    const SystemLayout l = tiny_layout();
    const FrequencyGrid grid(5.8e9, 1.6e8, 4);
    const SourceWaveform w = lfm_spectrum(grid, 1.0);
    const SensingMatrix h = build_reflection_matrix(l, random_schedule(l, 6, 2), grid, w);
    const DenseOperator op(h.h);

    CHECK((matched_filter(op, Eigen::VectorXcd::Zero(h.rows())).array() == 0.0).all());
    CHECK_THROWS_AS(matched_filter(op, Eigen::VectorXcd::Zero(3)), std::invalid_argument);

    // Row permutation applied to H and y together.
    Rng rng(1);
    const Eigen::VectorXcd y = random_complex(h.rows(), rng);
    std::vector<int> perm(h.rows());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(3));
    Eigen::MatrixXcd hp(h.rows(), h.cols());
    Eigen::VectorXcd yp(h.rows());
    for (int m = 0; m < h.rows(); ++m) {
        hp.row(m) = h.h.row(perm[m]);
        yp[m] = y[perm[m]];
    }
    const Eigen::VectorXd a = matched_filter(op, y);
    const Eigen::VectorXd b = matched_filter(DenseOperator(hp), yp);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(a.maxCoeff() == Approx(1.0));

    // Noiseless lone scatterer: the normalized adjoint peaks at its own column.
    for (int n = 0; n < h.cols(); ++n) {
        const Eigen::VectorXcd yn = h.h.col(n) * 0.7;
        Eigen::Index arg;
        matched_filter(op, yn).maxCoeff(&arg);
        CHECK(arg == n);
    }
}

TEST_CASE("matched filter localizes a single desk scatterer at 40 dB")
{
    const DeskFixture& fx = DeskFixture::get();
    const DenseOperator op(fx.h.h);
    Rng rng(101);
    int hits = 0;
    const int trials = 10;
    for (int t = 0; t < trials; ++t) {
        SceneGrid scene = fx.layout.soi.empty_copy();
        const int cell = static_cast<int>(rng.below(scene.size()));
        scene.contrast()[cell] = 1.0;
        Eigen::Index arg;
        matched_filter(op, fx.delta(scene, 40.0, t)).maxCoeff(&arg);
        hits += arg == cell;
    }
    CHECK(hits == trials);
}

TEST_CASE("cgls: trivial systems and monotonicity")
{
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(6, 6);
    Eigen::VectorXcd e3 = Eigen::VectorXcd::Zero(6);
    e3[3] = 1.0;
    const SolveReport r = cgls_solve(DenseOperator(eye), e3, 0.0, 10);
    CHECK(r.converged);
    CHECK((r.volume - e3.real()).norm() < 1e-12);

    CHECK_THROWS_AS(cgls_solve(DenseOperator(eye), e3, -1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(cgls_solve(DenseOperator(eye), e3, 0.0, 0), std::invalid_argument);

    const SystemLayout l = tiny_layout();
    const FrequencyGrid grid(5.8e9, 1.6e8, 4);
    const SourceWaveform w = lfm_spectrum(grid, 1.0);
    const SensingMatrix h = build_reflection_matrix(l, random_schedule(l, 6, 5), grid, w);
    Rng rng(5);
    const Eigen::VectorXcd y = random_complex(h.rows(), rng) * h.h.cwiseAbs().maxCoeff();
    const DenseOperator op(h.h);
    const double scale = h.h.colwise().squaredNorm().mean();

    const SolveReport a = cgls_solve(op, y, 1e-3 * scale, 60, 1e-14);
    for (std::size_t k = 1; k < a.residuals.size(); ++k)
        CHECK(a.residuals[k] <= a.residuals[k - 1] * (1 + 1e-12));

    double prev = std::numeric_limits<double>::infinity();
    for (double lam : {0.0, 1e-4, 1e-2, 1.0, 1e2, 1e4}) {
        const SolveReport s = cgls_solve(op, y, lam * scale, 200, 1e-13);
        CHECK(s.raw.norm() <= prev * (1 + 1e-6));
        prev = s.raw.norm();
    }
    CHECK(prev < 1e-3 * cgls_solve(op, y, 0.0, 200, 1e-13).raw.norm());

    const SolveReport capped = cgls_solve(op, y, 0.0, 1, 1e-14);
    CHECK_FALSE(capped.converged);
    CHECK(capped.iterations == 1);
    CHECK((capped.volume.array() >= 0.0).all());

    // The Gram-matrix variant reproduces the same iterates, up to the
    // roundoff CG accumulates over 60 steps.
    const NormalSystem ns = NormalSystem::from(h.h);
    CHECK((ns.gram - (h.h.adjoint() * h.h).real()).norm() < 1e-10 * ns.gram.norm());
    const Eigen::VectorXd rhs = (h.h.adjoint() * y).real();
    const SolveReport b = cgls_solve_normal(ns, rhs, y.squaredNorm(), 1e-3 * scale, 60, 1e-14);
    CHECK((a.raw - b.raw).norm() < 1e-4 * a.raw.norm());
    REQUIRE(b.residuals.size() == a.residuals.size());
    CHECK(b.residuals.back() == Approx(a.residuals.back()).epsilon(1e-6));
}

TEST_CASE("cgls recovers three desk scatterers among the top five cells")
{
    const DeskFixture& fx = DeskFixture::get();
    const DenseOperator op(fx.h.h);
    const double lambda = 1e-3 * fx.h.h.colwise().squaredNorm().mean();
    Rng rng(202);
    for (int t = 0; t < 3; ++t) {
        SceneGrid scene = fx.layout.soi.empty_copy();
        std::set<int> cells;
        while (cells.size() < 3)
            cells.insert(static_cast<int>(rng.below(scene.size())));
        for (int c : cells)
            scene.contrast()[c] = 1.0;
        const SolveReport r = cgls_solve(op, fx.delta(scene, 40.0, 50 + t), lambda, 200);
        const auto top = top_k(r.volume, 5);
        for (int c : cells)
            CHECK(std::find(top.begin(), top.end(), c) != top.end());
    }
}

TEST_CASE("shadow system")
{
    const SystemLayout desk = default_layout(ScaleProfile::desk);
    const FrequencyGrid grid(5.8e9, 1.6e8, 8);
    IlluminationSchedule s;
    for (const auto& e : strategy_one(desk, soi_focus_centers(desk.soi), {}, grid.center_omega()))
        s.entries.push_back(e);
    s.entries.resize(6);

    const ShadowSystem sys = shadow_system(desk, s, grid, {}, 16);
    CHECK(sys.paths.rows() == 6);
    CHECK(sys.paths.cols() == desk.soi.size());
    CHECK(sys.rays.size() <= 6u * 16u);
    CHECK((sys.paths.array() >= 0.0).all());

    const Eigen::Matrix3Xd fa = element_positions(desk.forward);
    const Eigen::Matrix3Xd fb = element_positions(desk.backward);
    for (int p = 0; p < 6; ++p) {
        double wsum = 0, len = 0;
        for (const auto& r : sys.rays) {
            if (r.entry != p)
                continue;
            CHECK(r.weight > 0.0);
            double t0, t1;
            const Vec3 a = fa.col(r.forward), b = fb.col(r.backward);
            REQUIRE(clip_segment(desk.soi.bounds(), a, b, t0, t1));
            wsum += r.weight;
            len += r.weight * (t1 - t0) * (b - a).norm();
        }
        REQUIRE(wsum > 0.0);
        CHECK(sys.paths.row(p).sum() == Approx(len / wsum).epsilon(1e-9));
    }

    // Panels moved off the SoI: every ray misses, every row is zero.
    SystemLayout off = desk;
    off.soi = SceneGrid(Vec3(1, -1, 5), Vec3(1, 2, 2), {4, 4, 4});
    const ShadowSystem none = shadow_system(off, s, grid, {}, 8);
    CHECK((none.paths.array() == 0.0).all());
}

TEST_CASE("attenuation")
{
    Eigen::VectorXd base(3), meas(3);
    base << 4.0, 1.0, 2.0;
    meas << 1.0, 2.0, 0.0;
    const Eigen::VectorXd a = transmission_attenuation(meas, base);
    CHECK(a[0] == Approx(std::log(4.0)));
    CHECK(a[1] == 0.0);
    CHECK(a[2] == 0.0);
    CHECK_THROWS_AS(transmission_attenuation(meas, Eigen::VectorXd(2)), std::invalid_argument);
}

TEST_CASE("art")
{
    Rng rng(31);
    Eigen::MatrixXd paths(30, 50);
    for (auto& v : paths.reshaped())
        v = rng.bernoulli(0.3) ? rng.uniform(0.05, 0.3) : 0.0;

    CHECK((art_solve(paths, Eigen::VectorXd::Zero(30), 10, 0.5).array() == 0.0).all());
    CHECK((art_solve(Eigen::MatrixXd::Zero(30, 50), Eigen::VectorXd::Ones(30), 10, 0.5).array() == 0.0).all());
    CHECK_THROWS_AS(art_solve(paths, Eigen::VectorXd::Zero(30), 1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(art_solve(paths, Eigen::VectorXd::Zero(29), 1, 0.5), std::invalid_argument);

    // One blocking cell crossed by many rays.
    const int blocker = 17;
    Eigen::MatrixXd rays = paths;
    for (int m = 0; m < 20; ++m)
        rays(m, blocker) = 0.25;
    Eigen::VectorXd x_true = Eigen::VectorXd::Zero(50);
    x_true[blocker] = 2.0;
    Eigen::Index arg;
    art_solve(rays, rays * x_true, 50, 1.0).maxCoeff(&arg);
    CHECK(arg == blocker);

    // Single row, single sweep: the update is proportional to relax.
    Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, 4);
    row << 0.1, 0.2, 0.0, 0.3;
    Eigen::VectorXd att(1);
    att << 0.7;
    ArtTrace t1, t2;
    art_solve(row, att, 1, 0.25, &t1);
    art_solve(row, att, 1, 0.5, &t2);
    CHECK((t2.unscaled - 2.0 * t1.unscaled).norm() < 1e-15);

    // Consistent non-negative system, relax = 1.
    Eigen::VectorXd x0(50);
    for (auto& v : x0)
        v = rng.uniform(0, 1);
    ArtTrace tr;
    art_solve(paths, paths * x0, 200, 1.0, &tr);
    REQUIRE(tr.row_residual_max.size() == 200);
    int increases = 0;
    for (std::size_t k = 1; k < tr.row_residual_max.size(); ++k)
        increases += tr.row_residual_max[k] > tr.row_residual_max[k - 1] * (1 + 1e-9);
    CHECK(increases == 0);
    CHECK(tr.row_residual_max.back() < 1e-2 * tr.row_residual_max.front());
}

TEST_CASE("projection and fusion")
{
    const SystemLayout desk = default_layout(ScaleProfile::desk);
    const int q = desk.soi.size();
    Rng rng(41);
    Eigen::VectorXd a(q), b(q);
    for (int n = 0; n < q; ++n) {
        a[n] = rng.uniform(0, 3);
        b[n] = rng.uniform(0, 1);
    }

    const ReconstructedImage pure = fuse_and_project(a, b, {1.0, 0.0}, desk, 80, 96);
    CHECK(pure.image.rows() == 96);
    CHECK(pure.image.cols() == 80);
    CHECK((pure.image - project_volume(desk.soi, a / a.maxCoeff(), 80, 96)).abs().maxCoeff() < 1e-15);
    CHECK((pure.image >= 0.0).all());
    CHECK((pure.image <= 1.0).all());

    const ReconstructedImage same = fuse_and_project(a, a * 5.0, {0.2, 0.7}, desk, 80, 96);
    CHECK((same.image - pure.image).abs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(fuse_and_project(a, b, {0.0, 0.0}, desk, 80, 96), std::invalid_argument);
    CHECK_THROWS_AS(fuse_and_project(a, b, {-1.0, 2.0}, desk, 80, 96), std::invalid_argument);

    // Single occupied cell: the peak pixel lands within one projected cell.
    const ImagePlane plane{desk.soi.bounds(), 80, 96};
    const double cell_px_w = 80.0 / desk.soi.counts().y();
    const double cell_px_h = 96.0 / desk.soi.counts().z();
    for (int t = 0; t < 20; ++t) {
        const int cell = static_cast<int>(rng.below(q));
        Eigen::VectorXd v = Eigen::VectorXd::Zero(q);
        v[cell] = 1.0;
        const Eigen::ArrayXXd img = fuse_and_project(v, v, {}, desk, 80, 96).image;
        Eigen::Index r, c;
        img.maxCoeff(&r, &c);
        const Vec3 center = desk.soi.cell_center(cell);
        const Eigen::Vector2d px = plane.to_pixel(center.y(), center.z());
        CHECK(std::abs(c + 0.5 - px.x()) <= cell_px_w);
        CHECK(std::abs(r + 0.5 - px.y()) <= cell_px_h);
    }
}

TEST_CASE("fusion localizes a reconstructed desk scatterer")
{
    const DeskFixture& fx = DeskFixture::get();
    const DenseOperator op(fx.h.h);
    const ImagePlane plane{fx.layout.soi.bounds(), 80, 96};
    Rng rng(77);
    SceneGrid scene = fx.layout.soi.empty_copy();
    const int cell = static_cast<int>(rng.below(scene.size()));
    scene.contrast()[cell] = 1.0;
    const Eigen::VectorXd mf = matched_filter(op, fx.delta(scene, 40.0, 1));
    const Eigen::ArrayXXd img =
        fuse_and_project(mf, Eigen::VectorXd::Zero(mf.size()), {}, fx.layout, 80, 96).image;
    Eigen::Index r, c;
    img.maxCoeff(&r, &c);
    const Vec3 center = scene.cell_center(cell);
    const Eigen::Vector2d px = plane.to_pixel(center.y(), center.z());
    CHECK(std::abs(c + 0.5 - px.x()) <= 80.0 / scene.counts().y());
    CHECK(std::abs(r + 0.5 - px.y()) <= 96.0 / scene.counts().z());
}
