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

#include "duoris/em.hpp"

#include <stdexcept>

namespace duoris {

FrequencyGrid::FrequencyGrid(double center_hz, double bandwidth_hz, int n_bins)
    : center_hz_(center_hz), bandwidth_hz_(bandwidth_hz)
{
    if (n_bins < 1)
        throw std::invalid_argument("FrequencyGrid: n_bins must be >= 1");
    if (!(center_hz > 0.0))
        throw std::invalid_argument("FrequencyGrid: center frequency must be positive");
    if (n_bins > 1 && !(bandwidth_hz > 0.0))
        throw std::invalid_argument("FrequencyGrid: bandwidth must be positive for n_bins > 1");
    if (center_hz - 0.5 * bandwidth_hz <= 0.0)
        throw std::invalid_argument("FrequencyGrid: band extends below 0 Hz");

    if (n_bins == 1) {
        freqs_ = Eigen::VectorXd::Constant(1, center_hz);
    } else {
        freqs_ = Eigen::VectorXd::LinSpaced(n_bins, center_hz - 0.5 * bandwidth_hz,
                                            center_hz + 0.5 * bandwidth_hz);
    }
}

double FrequencyGrid::spacing_hz() const
{
    return n_bins() > 1 ? bandwidth_hz_ / (n_bins() - 1) : 0.0;
}

double wavenumber(double omega, const MediumParams& medium)
{
    if (!(omega > 0.0))
        throw std::domain_error("wavenumber: angular frequency must be positive");
    return omega * std::sqrt(medium.mu0 * medium.eps0);
}

cd greens(const Vec3& r, const Vec3& rp, double omega, const MediumParams& medium)
{
    const double distance = (r - rp).norm();
    if (!(distance > 0.0))
        throw std::domain_error("greens: coincident source and observation points");
    return greens_at_distance(distance, wavenumber(omega, medium));
}

SourceWaveform lfm_spectrum(const FrequencyGrid& grid, double amplitude, WaveformKind kind,
                            double duration_s)
{
    if (!(amplitude > 0.0))
        throw std::invalid_argument("lfm_spectrum: amplitude must be positive");

    SourceWaveform w;
    w.kind = kind;
    w.spectrum.resize(grid.n_bins());
    if (kind == WaveformKind::flat || grid.n_bins() == 1) {
        w.spectrum.setConstant(cd(amplitude, 0.0));
        return w;
    }

    const double duration = duration_s > 0.0 ? duration_s : 1.0 / grid.spacing_hz();
    const double rate = grid.bandwidth_hz() / duration; // Hz per second
    for (int b = 0; b < grid.n_bins(); ++b) {
        const double df = grid.frequencies()[b] - grid.center_hz();
        w.spectrum[b] = std::polar(amplitude, -std::numbers::pi * df * df / rate);
    }
    return w;
}

} // namespace duoris
