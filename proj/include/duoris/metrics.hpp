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

#include <Eigen/Core>

namespace duoris {

struct MetricConfig {
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
    double beta = 1.0;
    double binarize_threshold = 0.5;
    double eps = 1e-7;
    /// 0 = one window over the whole image. A positive odd size switches ssim
    /// to the mean over every fully-contained square window of that size
    /// (comparison only).
    int ssim_window = 0;

    double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

// Every metric takes a prediction P in [0, 1] (values outside are clamped)
// and a binary ground truth G of the same shape. Mismatched or empty shapes
// and non-binary G throw std::invalid_argument.

/// Population statistics (divisor W * H).
double ssim(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt, const MetricConfig& cfg = {});
double mae(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt);
/// P binarized at cfg.binarize_threshold (>=). 0 when there is no true positive.
double f_beta(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt, const MetricConfig& cfg = {});
/// Summed over pixels, P clamped to [eps, 1 - eps].
double bce(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt, const MetricConfig& cfg = {});
/// Soft IoU on raw P. Empty P and empty G give 1.
double iou(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt);
/// 1 - ssim + mae.
double training_loss(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt,
                     const MetricConfig& cfg = {});

struct MetricSet {
    double ssim = 0;
    double mae = 0;
    double f_beta = 0;
    double bce = 0;
    double iou = 0;
    double loss = 0;
};

MetricSet evaluate_pair(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt,
                        const MetricConfig& cfg = {});

} // namespace duoris
