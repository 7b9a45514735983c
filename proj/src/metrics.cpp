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


#include "duoris/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace duoris {

namespace {

Eigen::ArrayXXd checked(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt)
{
    if (pred.size() == 0 || gt.size() == 0)
        throw std::invalid_argument("metrics: empty image");
    if (pred.rows() != gt.rows() || pred.cols() != gt.cols())
        throw std::invalid_argument("metrics: prediction and ground truth differ in shape");
    if (!((gt == 0.0) || (gt == 1.0)).all())
        throw std::invalid_argument("metrics: ground truth must be binary");
    return pred.max(0.0).min(1.0);
}

double ssim_stats(double mx, double my, double vx, double vy, double cxy, const MetricConfig& cfg)
{
    const double c1 = cfg.c1(), c2 = cfg.c2();
    return (2 * mx * my + c1) * (2 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

double ssim_global(const Eigen::ArrayXXd& p, const Eigen::ArrayXXd& g, const MetricConfig& cfg)
{
    const double mx = p.mean(), my = g.mean();
    const double vx = (p - mx).square().mean();
    const double vy = (g - my).square().mean();
    const double cxy = ((p - mx) * (g - my)).mean();
    return ssim_stats(mx, my, vx, vy, cxy, cfg);
}

// Summed-area table with a zero first row and column.
Eigen::ArrayXXd integral(const Eigen::ArrayXXd& a)
{
    Eigen::ArrayXXd s = Eigen::ArrayXXd::Zero(a.rows() + 1, a.cols() + 1);
    for (Eigen::Index c = 0; c < a.cols(); ++c)
        for (Eigen::Index r = 0; r < a.rows(); ++r)
            s(r + 1, c + 1) = a(r, c) + s(r, c + 1) + s(r + 1, c) - s(r, c);
    return s;
}

double ssim_windowed(const Eigen::ArrayXXd& p, const Eigen::ArrayXXd& g, const MetricConfig& cfg)
{
    const int w = cfg.ssim_window;
    if (w % 2 == 0 || w > p.rows() || w > p.cols())
        throw std::invalid_argument("ssim: window must be odd and fit inside the image");
    const auto sp = integral(p), sg = integral(g);
    const auto spp = integral(p * p), sgg = integral(g * g), spg = integral(p * g);
    auto box = [w](const Eigen::ArrayXXd& s, Eigen::Index r, Eigen::Index c) {
        return s(r + w, c + w) - s(r, c + w) - s(r + w, c) + s(r, c);
    };
    const double n = static_cast<double>(w) * w;
    double total = 0;
    Eigen::Index count = 0;
    for (Eigen::Index c = 0; c + w <= p.cols(); ++c)
        for (Eigen::Index r = 0; r + w <= p.rows(); ++r) {
            const double mx = box(sp, r, c) / n, my = box(sg, r, c) / n;
            const double vx = std::max(0.0, box(spp, r, c) / n - mx * mx);
            const double vy = std::max(0.0, box(sgg, r, c) / n - my * my);
            const double cxy = box(spg, r, c) / n - mx * my;
            total += ssim_stats(mx, my, vx, vy, cxy, cfg);
            ++count;
        }
    return total / static_cast<double>(count);
}

} // namespace

double ssim(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt, const MetricConfig& cfg)
{
    const Eigen::ArrayXXd p = checked(pred, gt);
    return cfg.ssim_window > 0 ? ssim_windowed(p, gt, cfg) : ssim_global(p, gt, cfg);
}

double mae(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt)
{
    return (checked(pred, gt) - gt).abs().mean();
}

double f_beta(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt, const MetricConfig& cfg)
{
    const Eigen::ArrayXXd p = checked(pred, gt);
    double tp = 0, fp = 0, fn = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const bool on = p(i) >= cfg.binarize_threshold;
        const bool truth = gt(i) == 1.0;
        tp += on && truth;
        fp += on && !truth;
        fn += !on && truth;
    }
    if (tp == 0)
        return 0.0;
    const double precision = tp / (tp + fp), recall = tp / (tp + fn);
    const double b2 = cfg.beta * cfg.beta;
    return (1 + b2) * precision * recall / (b2 * precision + recall);
}

double bce(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt, const MetricConfig& cfg)
{
    const Eigen::ArrayXXd p = checked(pred, gt).max(cfg.eps).min(1.0 - cfg.eps);
    return -(gt * p.log() + (1.0 - gt) * (1.0 - p).log()).sum();
}

double iou(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt)
{
    const Eigen::ArrayXXd p = checked(pred, gt);
    const double inter = (p * gt).sum();
    const double uni = (p + gt - p * gt).sum();
    return uni > 0.0 ? inter / uni : 1.0;
}

double training_loss(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt, const MetricConfig& cfg)
{
    return 1.0 - ssim(pred, gt, cfg) + mae(pred, gt);
}

MetricSet evaluate_pair(const Eigen::ArrayXXd& pred, const Eigen::ArrayXXd& gt, const MetricConfig& cfg)
{
    MetricSet m;
    m.ssim = ssim(pred, gt, cfg);
    m.mae = mae(pred, gt);
    m.f_beta = f_beta(pred, gt, cfg);
    m.bce = bce(pred, gt, cfg);
    m.iou = iou(pred, gt);
    m.loss = 1.0 - m.ssim + m.mae;
    return m;
}

} // namespace duoris
