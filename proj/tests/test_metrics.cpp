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

#include "duoris/metrics.hpp"
#include "duoris/util.hpp"

#include <set>

using namespace duoris;
using doctest::Approx;

namespace {

Eigen::ArrayXXd random_mask(int h, int w, double p, Rng& rng)
{
    Eigen::ArrayXXd m(h, w);
    for (auto& v : m.reshaped())
        v = rng.bernoulli(p) ? 1.0 : 0.0;
    return m;
}

} // namespace

TEST_CASE("ssim unit values")
{
    const MetricConfig cfg;
    const Eigen::ArrayXXd zero = Eigen::ArrayXXd::Zero(96, 80);
    const Eigen::ArrayXXd one = Eigen::ArrayXXd::Ones(96, 80);
    const double c1 = 1e-4;
    CHECK(std::abs(ssim(zero, one, cfg) - c1 / (1 + c1)) < 1e-9);
    CHECK(ssim(zero, one, cfg) == Approx(9.999e-5).epsilon(1e-4));
    CHECK(cfg.c2() == Approx(9e-4));

    Rng rng(1);
    const Eigen::ArrayXXd g = random_mask(30, 20, 0.3, rng);
    CHECK(ssim(g, g) == Approx(1.0));
    const Eigen::ArrayXXd p = Eigen::ArrayXXd::Random(30, 20).abs();
    const Eigen::ArrayXXd g2 = random_mask(30, 20, 0.5, rng);
    CHECK(ssim(g2, g) == Approx(ssim(g, g2)).epsilon(1e-14));

    CHECK_THROWS_AS(ssim(Eigen::ArrayXXd(0, 0), Eigen::ArrayXXd(0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(ssim(p, Eigen::ArrayXXd::Zero(20, 30)), std::invalid_argument);
    CHECK_THROWS_AS(ssim(g, p), std::invalid_argument);
}

TEST_CASE("windowed ssim")
{
    Rng rng(2);
    const Eigen::ArrayXXd g = random_mask(21, 15, 0.4, rng);
    Eigen::ArrayXXd p(21, 15);
    for (auto& v : p.reshaped())
        v = rng.uniform();
    MetricConfig win;
    win.ssim_window = 15; // one row of windows
    MetricConfig full;
    CHECK(ssim(p, g, win) != Approx(ssim(p, g, full)));
    win.ssim_window = 7;
    CHECK(ssim(g, g, win) == Approx(1.0));
    const double s = ssim(p, g, win);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);

    // A window covering the whole (square) image reduces to the global form.
    const Eigen::ArrayXXd gs = g.topLeftCorner(15, 15), ps = p.topLeftCorner(15, 15);
    win.ssim_window = 15;
    CHECK(ssim(ps, gs, win) == Approx(ssim(ps, gs, full)).epsilon(1e-10));

    win.ssim_window = 4;
    CHECK_THROWS_AS(ssim(p, g, win), std::invalid_argument);
}

TEST_CASE("mae, f_beta, bce, loss unit values")
{
    const Eigen::ArrayXXd zero = Eigen::ArrayXXd::Zero(8, 6);
    const Eigen::ArrayXXd one = Eigen::ArrayXXd::Ones(8, 6);
    CHECK(mae(one, zero) == 1.0);
    CHECK(mae(zero + 0.25, zero) == Approx(0.25));
    CHECK(mae(one, one) == 0.0);
    CHECK(mae(one * 3.0, zero) == 1.0); // clamped

    CHECK(f_beta(one, one) == 1.0);
    CHECK(f_beta(zero, one) == 0.0);
    Eigen::ArrayXXd half = zero;
    half.topRows(4) = 1.0;
    CHECK(f_beta(half, one) == Approx(2.0 / 3.0));
    MetricConfig b2;
    b2.beta = 2.0;
    // precision 1, recall 0.5: 5 * 0.5 / (4 + 0.5)
    CHECK(f_beta(half, one, b2) == Approx(2.5 / 4.5));
    CHECK(f_beta(zero + 0.5, one) == 1.0); // threshold inclusive

    const MetricConfig cfg;
    CHECK(bce(one, one) <= 48 * -std::log(1 - cfg.eps) * (1 + 1e-9));
    CHECK(bce(one, one) > 0.0);
    CHECK(bce(zero + 0.5, one) == Approx(48 * std::log(2.0)));
    CHECK(bce(zero + 0.5, zero) == Approx(48 * std::log(2.0)));
    CHECK(bce(Eigen::ArrayXXd::Constant(4, 6, 0.3), Eigen::ArrayXXd::Ones(4, 6)) * 2 ==
          Approx(bce(Eigen::ArrayXXd::Constant(8, 6, 0.3), one)));
    CHECK(bce(zero, one) == Approx(-48 * std::log(cfg.eps)));

    CHECK(training_loss(one, one) == Approx(0.0).epsilon(1e-12));
    CHECK(training_loss(zero, one) == Approx(1.0 - 1e-4 / 1.0001 + 1.0));
}

TEST_CASE("iou unit values and set-arithmetic oracle")
{
    Eigen::ArrayXXd a = Eigen::ArrayXXd::Zero(3, 3), b = a;
    a(0, 0) = a(0, 1) = 1.0;
    b(0, 1) = b(0, 2) = 1.0;
    CHECK(iou(a, b) == Approx(1.0 / 3.0));
    CHECK(iou(a, a) == 1.0);
    Eigen::ArrayXXd c = Eigen::ArrayXXd::Zero(3, 3);
    c(2, 2) = 1.0;
    CHECK(iou(a, c) == 0.0);
    CHECK(iou(Eigen::ArrayXXd::Zero(3, 3), Eigen::ArrayXXd::Zero(3, 3)) == 1.0);

    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        const Eigen::ArrayXXd p = random_mask(17, 13, rng.uniform(0.05, 0.6), rng);
        const Eigen::ArrayXXd g = random_mask(17, 13, rng.uniform(0.05, 0.6), rng);
        std::set<int> sp, sg, inter, uni;
        for (int i = 0; i < p.size(); ++i) {
            if (p(i) == 1.0)
                sp.insert(i);
            if (g(i) == 1.0)
                sg.insert(i);
        }
        std::set_intersection(sp.begin(), sp.end(), sg.begin(), sg.end(),
                              std::inserter(inter, inter.end()));
        std::set_union(sp.begin(), sp.end(), sg.begin(), sg.end(), std::inserter(uni, uni.end()));
        const double expected = uni.empty() ? 1.0 : double(inter.size()) / double(uni.size());
        CHECK(iou(p, g) == Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("metric ranges and flip invariance over random pairs")
{
    Rng rng(4);
    const MetricConfig cfg;
    for (int t = 0; t < 1000; ++t) {
        const int h = 2 + rng.below(20), w = 2 + rng.below(20);
        Eigen::ArrayXXd p(h, w);
        for (auto& v : p.reshaped())
            v = rng.bernoulli(0.1) ? rng.uniform(-0.5, 1.5) : rng.uniform();
        const Eigen::ArrayXXd g = random_mask(h, w, rng.uniform(), rng);
        const MetricSet m = evaluate_pair(p, g, cfg);
        CHECK(m.ssim >= -1.0);
        CHECK(m.ssim <= 1.0 + 1e-12);
        CHECK(m.mae >= 0.0);
        CHECK(m.mae <= 1.0);
        CHECK(m.f_beta >= 0.0);
        CHECK(m.f_beta <= 1.0);
        CHECK(m.iou >= 0.0);
        CHECK(m.iou <= 1.0);
        CHECK(m.bce >= 0.0);
        CHECK(m.loss == Approx(1.0 - m.ssim + m.mae));

        const MetricSet f = evaluate_pair(p.rowwise().reverse(), g.rowwise().reverse(), cfg);
        CHECK(f.ssim == Approx(m.ssim).epsilon(1e-12));
        CHECK(f.mae == Approx(m.mae).epsilon(1e-12));
        CHECK(f.f_beta == m.f_beta);
        CHECK(f.bce == Approx(m.bce).epsilon(1e-12));
        CHECK(f.iou == Approx(m.iou).epsilon(1e-12));
    }
}
