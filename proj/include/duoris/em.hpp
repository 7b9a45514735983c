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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

namespace duoris {

using cd = std::complex<double>;
using Vec3 = Eigen::Vector3d;

/// Homogeneous, lossless background medium. The speed of light is always
/// derived from (eps0, mu0) and never stored.
struct MediumParams {
    double eps0 = 8.8541878128e-12; // F/m
    double mu0 = 1.25663706212e-6;  // H/m

    double c() const { return 1.0 / std::sqrt(mu0 * eps0); }
};

/// Uniform frequency grid spanning [center - B/2, center + B/2] inclusive.
/// A single bin sits at the center frequency.
class FrequencyGrid {
public:
    FrequencyGrid(double center_hz = 5.8e9, double bandwidth_hz = 1.6e8, int n_bins = 128);

    double center_hz() const { return center_hz_; }
    double bandwidth_hz() const { return bandwidth_hz_; }
    int n_bins() const { return static_cast<int>(freqs_.size()); }
    double spacing_hz() const;

    const Eigen::VectorXd& frequencies() const { return freqs_; }
    Eigen::VectorXd omegas() const { return 2.0 * std::numbers::pi * freqs_; }
    double omega(int bin) const { return 2.0 * std::numbers::pi * freqs_[bin]; }
    double center_omega() const { return 2.0 * std::numbers::pi * center_hz_; }

private:
    double center_hz_;
    double bandwidth_hz_;
    Eigen::VectorXd freqs_;
};

enum class WaveformKind { flat, lfm };

struct SourceWaveform {
    Eigen::VectorXcd spectrum; // s(omega), one per bin
    WaveformKind kind = WaveformKind::lfm;

    double energy() const { return spectrum.squaredNorm(); }
};

/// k0(omega) = omega * sqrt(mu0 * eps0). Throws std::domain_error for omega <= 0.
double wavenumber(double omega, const MediumParams& medium = {});

/// Free-space scalar Green's function exp(i k0 R) / (4 pi R) evaluated from a
/// precomputed distance. No argument checks; callers guarantee R > 0.
inline cd greens_at_distance(double distance, double k0)
{
    return std::polar(1.0 / (4.0 * std::numbers::pi * distance), k0 * distance);
}

/// Scalar Green's function between two points. Throws std::domain_error when
/// the points coincide (there is no self-interaction term in the model).
cd greens(const Vec3& r, const Vec3& rp, double omega, const MediumParams& medium = {});

/// Ideal chirp spectrum: constant magnitude `amplitude` in every bin with a
/// quadratic phase -pi (f - fc)^2 T / B, T = duration_s (defaults to the
/// reciprocal bin spacing). WaveformKind::flat yields amplitude + 0i.
SourceWaveform lfm_spectrum(const FrequencyGrid& grid, double amplitude,
                            WaveformKind kind = WaveformKind::lfm, double duration_s = 0.0);

} // namespace duoris
