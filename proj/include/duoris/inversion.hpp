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

#include "duoris/forward.hpp"

#include <stdexcept>
#include <vector>

namespace duoris {

enum class Provenance { reflection, shadow };

/// Linear map from SoI contrast to measurements. Row m = p * bins + f,
/// column n = SoI cell index.
struct SensingMatrix {
    Eigen::MatrixXcd h;
    int patterns = 0;
    int bins = 0;
    Provenance provenance = Provenance::reflection;

    Eigen::Index rows() const { return h.rows(); }
    Eigen::Index cols() const { return h.cols(); }
};

inline constexpr double kDefaultMatrixCap = 5e7;

/// Coefficient of chi_n in the Rx1 spectrum for every (pattern, bin):
/// s(w) k0^2 A_n g(r_R1, r_n) sum_i k0^2 Upsilon_i g(r_i, r_n) g(r_T, r_i).
/// Throws std::length_error when rows * cols exceeds `max_entries`; use
/// ReflectionOperator instead.
SensingMatrix build_reflection_matrix(const SystemLayout& layout,
                                      const IlluminationSchedule& schedule,
                                      const FrequencyGrid& grid, const SourceWaveform& waveform,
                                      const ForwardOptions& opts = {},
                                      double max_entries = kDefaultMatrixCap);

/// Measurement vector laid out like the rows of a SensingMatrix.
Eigen::VectorXcd flatten_rows(const Eigen::MatrixXcd& per_pattern);

/// Operator view of an explicit matrix.
class DenseOperator {
public:
    explicit DenseOperator(const Eigen::MatrixXcd& h) : h_(h) {}

    Eigen::Index rows() const { return h_.rows(); }
    Eigen::Index cols() const { return h_.cols(); }
    Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const { return h_ * u; }
    Eigen::VectorXcd adjoint(const Eigen::VectorXcd& v) const { return h_.adjoint() * v; }
    Eigen::VectorXd column_norms() const { return h_.colwise().norm().transpose(); }

private:
    const Eigen::MatrixXcd& h_;
};

/// Matrix-free reflection operator: rebuilds one bin's block at a time, so
/// memory stays O(Q K) regardless of the number of bins.
class ReflectionOperator {
public:
    ReflectionOperator(const SystemLayout& layout, const IlluminationSchedule& schedule,
                       const FrequencyGrid& grid, const SourceWaveform& waveform,
                       const ForwardOptions& opts = {});

    Eigen::Index rows() const { return static_cast<Eigen::Index>(patterns_) * bins_; }
    Eigen::Index cols() const { return cells_.cols(); }
    Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const;
    Eigen::VectorXcd adjoint(const Eigen::VectorXcd& v) const;
    Eigen::VectorXd column_norms() const;

    /// Q x P block with entry (n, p) = H(p * bins + f, n).
    Eigen::MatrixXcd block(int f) const;

private:
    Eigen::Matrix3Xd cells_;
    Eigen::Matrix3Xd elements_;
    Eigen::MatrixXd coeff_; // K x P forward coefficients
    Vec3 tx_, rx1_;
    double cell_area_ = 0;
    Eigen::VectorXd omegas_;
    Eigen::VectorXcd spectrum_;
    MediumParams medium_;
    int patterns_ = 0;
    int bins_ = 0;
};

struct MatchedFilterOptions {
    /// Divide each adjoint sample by its column norm so that a lone scatterer
    /// maps to its own cell.
    bool normalize_columns = true;
};

/// |Re(H^H y)|, optionally column-normalized, scaled to max 1.
template <typename Op>
Eigen::VectorXd matched_filter(const Op& op, const Eigen::VectorXcd& y_delta,
                               const MatchedFilterOptions& opts = {})
{
    if (y_delta.size() != op.rows())
        throw std::invalid_argument("matched_filter: measurement length does not match operator rows");
    Eigen::VectorXd v = op.adjoint(y_delta).real().cwiseAbs();
    if (opts.normalize_columns) {
        const Eigen::VectorXd norms = op.column_norms();
        for (Eigen::Index n = 0; n < v.size(); ++n)
            v[n] = norms[n] > 0.0 ? v[n] / norms[n] : 0.0;
    }
    const double peak = v.size() ? v.maxCoeff() : 0.0;
    if (peak > 0.0)
        v /= peak;
    return v;
}

struct SolveReport {
    Eigen::VectorXd volume;         // clamped at 0
    Eigen::VectorXd raw;            // unconstrained iterate
    std::vector<double> residuals;  // sqrt(|H x - y|^2 + lambda |x|^2) per iterate, starting at x = 0
    int iterations = 0;
    bool converged = false;
};

/// CGLS for min |H x - y|^2 + lambda |x|^2 over real x, with H complex
/// (the real and imaginary parts act as stacked rows). Stops when the
/// normal-equation residual falls below tol times its initial value.
template <typename Op>
SolveReport cgls_solve(const Op& op, const Eigen::VectorXcd& y, double lambda, int max_iters,
                       double tol = 1e-6)
{
    if (lambda < 0.0 || max_iters < 1)
        throw std::invalid_argument("cgls_solve: need lambda >= 0 and max_iters >= 1");
    if (y.size() != op.rows())
        throw std::invalid_argument("cgls_solve: measurement length does not match operator rows");

    const Eigen::Index q = op.cols();
    SolveReport rep;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(q);
    Eigen::VectorXcd r = y;
    Eigen::VectorXd s = op.adjoint(r).real();
    Eigen::VectorXd p = s;
    double gamma = s.squaredNorm();
    const double gamma0 = gamma;
    rep.residuals.push_back(r.norm());
    if (gamma0 == 0.0) {
        rep.converged = true;
        rep.raw = x;
        rep.volume = x;
        return rep;
    }

    for (int it = 0; it < max_iters; ++it) {
        const Eigen::VectorXcd qv = op.apply(p.cast<cd>());
        const double delta = qv.squaredNorm() + lambda * p.squaredNorm();
        if (!(delta > 0.0))
            break;
        const double alpha = gamma / delta;
        x += alpha * p;
        r -= alpha * qv;
        s = op.adjoint(r).real() - lambda * x;
        const double gamma_new = s.squaredNorm();
        rep.residuals.push_back(std::sqrt(r.squaredNorm() + lambda * x.squaredNorm()));
        rep.iterations = it + 1;
        if (gamma_new <= tol * tol * gamma0) {
            rep.converged = true;
            break;
        }
        p = s + (gamma_new / gamma) * p;
        gamma = gamma_new;
    }
    rep.raw = x;
    rep.volume = x.cwiseMax(0.0);
    return rep;
}

/// Real normal-equation form of a complex sensing matrix, for solving many
/// measurement vectors against the same H: gram = Re(H^H H).
struct NormalSystem {
    Eigen::MatrixXd gram;

    static NormalSystem from(const Eigen::MatrixXcd& h);
    Eigen::VectorXd column_norms() const { return gram.diagonal().cwiseMax(0.0).cwiseSqrt(); }
};

/// Same iterates as cgls_solve, run on the Gram matrix; `rhs` = Re(H^H y) and
/// `y_norm2` = |y|^2 give the residual history without touching H.
SolveReport cgls_solve_normal(const NormalSystem& sys, const Eigen::VectorXd& rhs, double y_norm2,
                              double lambda, int max_iters, double tol = 1e-6);

// --- transmission (shadow) mode ---------------------------------------------

struct ShadowRay {
    int entry = 0;
    int forward = 0;   // forward element index
    int backward = 0;  // backward element index
    double weight = 0; // share of the entry's empty-scene two-hop amplitude
};

/// Ray model of the two-hop path. Row p of `paths` is the weighted mean of
/// the per-cell chord lengths of entry p's strongest rays.
struct ShadowSystem {
    std::vector<ShadowRay> rays;
    Eigen::MatrixXd paths; // P x Q, metres
};

/// Rays are forward -> backward element segments weighted by
/// Re(c_ij conj(A)) / |A|, with c_ij the pair's two-hop contribution and A
/// their sum, at band center; the `rays_per_entry` largest positive weights
/// are kept.
ShadowSystem shadow_system(const SystemLayout& layout, const IlluminationSchedule& schedule,
                           const FrequencyGrid& grid, const ForwardOptions& opts = {},
                           int rays_per_entry = 64);

/// Energy of receiver `rx` per schedule entry, summed over bins.
Eigen::VectorXd entry_energy(const PsdTensor& psd, int rx);

/// log(E_base / E_meas) per entry, clamped at 0.
Eigen::VectorXd transmission_attenuation(const Eigen::VectorXd& energy_meas,
                                         const Eigen::VectorXd& energy_base);

struct ArtTrace {
    std::vector<double> row_residual_max; // max_m |a_m - L_m x| after each sweep
    Eigen::VectorXd unscaled;             // final iterate before peak scaling
};

/// Kaczmarz sweeps with projection onto x >= 0, result scaled to max 1.
Eigen::VectorXd art_solve(const Eigen::MatrixXd& paths, const Eigen::VectorXd& attenuation,
                          int iterations, double relax, ArtTrace* trace = nullptr);

// --- fusion and projection --------------------------------------------------

struct ReconstructedImage {
    Eigen::VectorXd volume;
    Eigen::ArrayXXd image; // height x width, [0, 1]
};

/// Max-intensity projection along x onto the ground-truth plane, bilinear
/// resampling from cell centers, clamped to [0, 1].
Eigen::ArrayXXd project_volume(const SceneGrid& grid, const Eigen::VectorXd& volume, int width,
                               int height);

struct FusionWeights {
    double reflection = 0.5;
    double shadow = 0.5;
};

/// volume = peak-normalized (w_r r / max r + w_s s / max s).
ReconstructedImage fuse_and_project(const Eigen::VectorXd& reflection_volume,
                                    const Eigen::VectorXd& shadow_volume,
                                    const FusionWeights& weights, const SystemLayout& layout,
                                    int width, int height);

} // namespace duoris
