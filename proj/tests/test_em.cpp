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

#include "duoris/em.hpp"
#include "duoris/util.hpp"

#include <stdexcept>

using namespace duoris;
using doctest::Approx;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

TEST_CASE("medium: speed of light derived from eps0 and mu0")
{
    const MediumParams m;
    CHECK(std::abs(m.c() - 1.0 / std::sqrt(m.mu0 * m.eps0)) <= 1e-12 * m.c());
    CHECK(m.c() == Approx(299792458.0).epsilon(1e-9));
    CHECK(m.eps0 > 0.0);
    CHECK(m.mu0 > 0.0);
}

TEST_CASE("frequency grid: inclusive uniform band")
{
    const FrequencyGrid g;
    CHECK(g.n_bins() == 128);
    CHECK(g.frequencies()[0] == Approx(5.72e9));
    CHECK(g.frequencies()[127] == Approx(5.88e9));
    const Eigen::VectorXd w = g.omegas();
    for (int b = 1; b < g.n_bins(); ++b) {
        CHECK(w[b] > w[b - 1]);
        CHECK(g.frequencies()[b] - g.frequencies()[b - 1] == Approx(g.spacing_hz()));
    }

    const FrequencyGrid single(5.8e9, 1.6e8, 1);
    CHECK(single.frequencies()[0] == 5.8e9);
    CHECK_THROWS_AS(FrequencyGrid(5.8e9, 1.6e8, 0), std::invalid_argument);
}

TEST_CASE("wavenumber")
{
    // k0 = omega / c with c = 299 792 458 m/s
    CHECK(wavenumber(two_pi * 5.8e9) == Approx(121.559011).epsilon(1e-6));
    CHECK(wavenumber(two_pi * 5.88e9) == Approx(123.235687).epsilon(1e-6));

    const double w1 = two_pi * 2.4e9;
    CHECK(wavenumber(2.0 * w1) == Approx(2.0 * wavenumber(w1)).epsilon(1e-15));

    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const double w = rng.uniform(1e6, 1e11);
        const double alpha = rng.uniform(0.01, 100.0);
        CHECK(std::abs(wavenumber(alpha * w) - alpha * wavenumber(w)) <= 1e-12 * alpha * wavenumber(w));
    }

    CHECK_THROWS_AS(wavenumber(0.0), std::domain_error);
    CHECK_THROWS_AS(wavenumber(-1.0), std::domain_error);
}

TEST_CASE("greens: magnitude and phase")
{
    const double w = two_pi * 5.8e9;
    const cd half = greens(Vec3(0, 0, 0), Vec3(0.5, 0, 0), w);
    CHECK(std::abs(half) == Approx(0.159154943).epsilon(1e-9));

    const cd one = greens(Vec3(1, 2, 3), Vec3(1, 2, 4), w);
    CHECK(std::abs(one) == Approx(0.0795774715).epsilon(1e-9));
    // 121.559011 mod 2 pi
    double phase = std::arg(one);
    if (phase < 0)
        phase += two_pi;
    CHECK(phase == Approx(2.178490).epsilon(1e-5));

    CHECK_THROWS_AS(greens(Vec3(1, 1, 1), Vec3(1, 1, 1), w), std::domain_error);
}

TEST_CASE("greens: reciprocity and 1/r decay")
{
    Rng rng(11);
    const double w = two_pi * 5.8e9;
    for (int i = 0; i < 1000; ++i) {
        const Vec3 a(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
        const Vec3 b(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
        const cd gab = greens(a, b, w);
        CHECK(std::abs(gab - greens(b, a, w)) < 1e-12 * std::abs(gab));

        const Vec3 dir = (b - a).normalized();
        const double r = rng.uniform(0.1, 5.0);
        const double ratio = std::abs(greens(a, a + r * dir, w)) / std::abs(greens(a, a + 2 * r * dir, w));
        CHECK(std::abs(ratio - 2.0) < 2e-12);
    }
}

TEST_CASE("lfm spectrum")
{
    const FrequencyGrid g(5.8e9, 1.6e8, 8);
    const SourceWaveform lfm = lfm_spectrum(g, 1.0);
    REQUIRE(lfm.spectrum.size() == 8);
    for (int b = 0; b < 8; ++b)
        CHECK(std::abs(lfm.spectrum[b]) == Approx(1.0).epsilon(1e-14));
    CHECK(lfm.energy() > 0.0);

    const SourceWaveform flat = lfm_spectrum(g, 2.5, WaveformKind::flat);
    for (int b = 0; b < 8; ++b)
        CHECK(flat.spectrum[b] == cd(2.5, 0.0));

    // Unwrapped second difference of a quadratic phase is constant.
    const FrequencyGrid wide(5.8e9, 1.6e8, 64);
    const SourceWaveform chirp = lfm_spectrum(wide, 1.0, WaveformKind::lfm, 1e-7);
    auto second_diff = [&](int b) {
        const cd r = chirp.spectrum[b] * chirp.spectrum[b - 2] /
                     (chirp.spectrum[b - 1] * chirp.spectrum[b - 1]);
        return std::arg(r);
    };
    const double d2 = second_diff(2);
    CHECK(std::abs(d2) > 1e-6);
    for (int b = 3; b < wide.n_bins(); ++b)
        CHECK(second_diff(b) == Approx(d2).epsilon(1e-9));

    CHECK_THROWS_AS(lfm_spectrum(g, 0.0), std::invalid_argument);
}
