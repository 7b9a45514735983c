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

#include "duoris/illumination.hpp"
#include "duoris/util.hpp"

#include <stdexcept>

namespace duoris {

Eigen::VectorXd RisPattern::coefficients(const RisPanel& panel, const ReflectionModel& model) const
{
    if (size() != panel.size())
        throw std::invalid_argument("RisPattern: bit count does not match panel size");
    Eigen::VectorXd c(size());
    for (int i = 0; i < size(); ++i)
        c[i] = model.coefficient(bits[i], panel.element_area);
    return c;
}

RisPattern RisPattern::complemented() const
{
    RisPattern p = *this;
    for (auto& b : p.bits)
        b ^= 1;
    return p;
}

int RisPattern::hamming(const RisPattern& o) const
{
    if (o.size() != size())
        throw std::invalid_argument("RisPattern::hamming: size mismatch");
    int d = 0;
    for (int i = 0; i < size(); ++i)
        d += bits[i] != o.bits[i];
    return d;
}

RisPattern all_zero_pattern(const RisPanel& panel)
{
    return {std::vector<std::uint8_t>(panel.size(), 0)};
}

Eigen::VectorXcd element_path_terms(const Eigen::Matrix3Xd& elements, const Vec3& source,
                                    const Vec3& target, double omega, const MediumParams& medium)
{
    const double k0 = wavenumber(omega, medium);
    Eigen::VectorXcd t(elements.cols());
    for (Eigen::Index i = 0; i < elements.cols(); ++i) {
        const double d_src = (elements.col(i) - source).norm();
        const double d_tgt = (target - elements.col(i)).norm();
        if (!(d_src > 0.0) || !(d_tgt > 0.0))
            throw std::domain_error("field_at: point coincides with a RIS element");
        t[i] = k0 * k0 * greens_at_distance(d_tgt, k0) * greens_at_distance(d_src, k0);
    }
    return t;
}

cd field_at(const RisPanel& panel, const RisPattern& pattern, const ReflectionModel& model,
            const Vec3& source, const Vec3& target, double omega, const MediumParams& medium)
{
    const Eigen::VectorXcd t =
        element_path_terms(element_positions(panel), source, target, omega, medium);
    return (t.array() * pattern.coefficients(panel, model).array().cast<cd>()).sum();
}

GreedyTrace greedy_focus_traced(const RisPanel& panel, const ReflectionModel& model,
                                const Vec3& source, const Vec3& focus, double omega,
                                const MediumParams& medium, int max_sweeps)
{
    const Eigen::VectorXcd t =
        element_path_terms(element_positions(panel), source, focus, omega, medium);
    const double c0 = model.coefficient(0, panel.element_area);
    const double c1 = model.coefficient(1, panel.element_area);

    GreedyTrace trace;
    trace.pattern = all_zero_pattern(panel);
    auto& bits = trace.pattern.bits;
    cd field = c0 * t.sum();
    double intensity = std::norm(field);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        ++trace.sweeps;
        bool flipped = false;
        for (int i = 0; i < panel.size(); ++i) {
            const double delta = bits[i] ? (c0 - c1) : (c1 - c0);
            const cd candidate = field + delta * t[i];
            const double cand_intensity = std::norm(candidate);
            if (cand_intensity > intensity) {
                bits[i] ^= 1;
                field = candidate;
                intensity = cand_intensity;
                trace.accepted_intensity.push_back(intensity);
                flipped = true;
            }
        }
        if (!flipped)
            break;
    }
    return trace;
}

RisPattern greedy_focus(const RisPanel& panel, const ReflectionModel& model, const Vec3& source,
                        const Vec3& focus, double omega, const MediumParams& medium)
{
    return greedy_focus_traced(panel, model, source, focus, omega, medium).pattern;
}

RisPattern cophase_bits(const Eigen::VectorXcd& amplitudes, const ReflectionModel& model)
{
    const double c0 = model.coefficient(0, 1.0);
    const double c1 = model.coefficient(1, 1.0);
    RisPattern p{std::vector<std::uint8_t>(amplitudes.size(), 0)};

    for (int pass = 0; pass < 2; ++pass) {
        cd ref = 0.0;
        for (Eigen::Index j = 0; j < amplitudes.size(); ++j)
            ref += (p.bits[j] ? c1 : c0) * amplitudes[j];
        if (ref == cd(0.0))
            ref = amplitudes.sum();
        if (ref == cd(0.0))
            ref = 1.0;
        for (Eigen::Index j = 0; j < amplitudes.size(); ++j) {
            const double proj = (amplitudes[j] * std::conj(ref)).real();
            p.bits[j] = (c1 * proj > c0 * proj) ? 1 : 0;
        }
    }
    return p;
}

Eigen::VectorXcd backward_incident(const SystemLayout& layout, const RisPattern& forward,
                                   const ReflectionModel& model, double omega,
                                   const MediumParams& medium)
{
    const double k0 = wavenumber(omega, medium);
    const Eigen::Matrix3Xd fwd = element_positions(layout.forward);
    const Eigen::Matrix3Xd bwd = element_positions(layout.backward);
    const Eigen::VectorXcd coeff = forward.coefficients(layout.forward, model).cast<cd>();
    const double scale = k0 * k0 * layout.backward.element_area * model.gamma;

    Eigen::VectorXcd a(bwd.cols());
    for (Eigen::Index j = 0; j < bwd.cols(); ++j) {
        const Vec3 rj = bwd.col(j);
        const cd incident = element_path_terms(fwd, layout.tx, rj, omega, medium).cwiseProduct(coeff).sum();
        a[j] = incident * greens_at_distance((layout.rx2 - rj).norm(), k0) * scale;
    }
    return a;
}

RisPattern backward_aggregate(const SystemLayout& layout, const RisPattern& forward,
                              const ReflectionModel& model, double omega,
                              const MediumParams& medium)
{
    return cophase_bits(backward_incident(layout, forward, model, omega, medium), model);
}

std::vector<Vec3> soi_focus_centers(const SceneGrid& soi, int across, int down)
{
    const ImagePlane plane{soi.bounds(), across, down};
    const double depth = soi.bounds().center().x();
    std::vector<Vec3> centers;
    for (int r = 0; r < down; ++r)
        for (int c = 0; c < across; ++c) {
            const Eigen::Vector2d yz = plane.to_yz(c + 0.5, r + 0.5);
            centers.emplace_back(depth, yz.x(), yz.y());
        }
    return centers;
}

std::vector<Vec3> backward_focus_centers(const RisPanel& backward, int n)
{
    std::vector<Vec3> centers;
    for (int r = 0; r < n; ++r) {
        const double v = (0.5 - (r + 0.5) / n) * backward.side_y();
        for (int c = 0; c < n; ++c) {
            const double u = ((c + 0.5) / n - 0.5) * backward.side_x();
            centers.push_back(backward.center + u * backward.lateral() + v * backward.up);
        }
    }
    return centers;
}

std::vector<ScheduleEntry> strategy_one(const SystemLayout& layout,
                                        const std::vector<Vec3>& focus_centers,
                                        const ReflectionModel& model, double omega_center,
                                        const MediumParams& medium)
{
    std::vector<ScheduleEntry> out;
    for (std::size_t m = 0; m < focus_centers.size(); ++m) {
        ScheduleEntry e;
        e.forward = greedy_focus(layout.forward, model, layout.tx, focus_centers[m], omega_center, medium);
        e.backward = backward_aggregate(layout, e.forward, model, omega_center, medium);
        e.strategy = Strategy::I;
        e.focus_index = static_cast<int>(m) + 1;
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<ScheduleEntry> strategy_two(const SystemLayout& layout, const ReflectionModel& model,
                                        double omega_center, const MediumParams& medium)
{
    const auto centers = backward_focus_centers(layout.backward);
    std::vector<ScheduleEntry> out;
    for (std::size_t m = 0; m < centers.size(); ++m) {
        ScheduleEntry e;
        e.forward = greedy_focus(layout.forward, model, layout.tx, centers[m], omega_center, medium);
        e.backward = backward_aggregate(layout, e.forward, model, omega_center, medium);
        e.strategy = Strategy::II;
        e.focus_index = 36 + static_cast<int>(m);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<ScheduleEntry> strategy_three(const SystemLayout& layout, std::uint64_t seed,
                                          const ReflectionModel& model, double omega_center,
                                          const MediumParams& medium)
{
    const double k0 = wavenumber(omega_center, medium);
    const Eigen::Matrix3Xd bwd = element_positions(layout.backward);
    const Vec3 incidence = (layout.backward.center - layout.forward.center).normalized();

    Eigen::VectorXcd plane_wave(bwd.cols());
    for (Eigen::Index j = 0; j < bwd.cols(); ++j) {
        const Vec3 rj = bwd.col(j);
        plane_wave[j] = std::polar(1.0, k0 * incidence.dot(rj - layout.backward.center)) *
                        greens_at_distance((layout.rx2 - rj).norm(), k0);
    }
    const RisPattern backward = cophase_bits(plane_wave, model);

    Rng rng(seed);
    std::vector<ScheduleEntry> out;
    for (int t = 1; t <= 10; ++t) {
        const double p_on = t / 11.0;
        ScheduleEntry e;
        e.forward.bits.resize(layout.forward.size());
        for (auto& b : e.forward.bits)
            b = rng.bernoulli(p_on) ? 1 : 0;
        e.backward = backward;
        e.strategy = Strategy::III;
        out.push_back(std::move(e));
    }
    return out;
}

IlluminationSchedule build_schedule(const SystemLayout& layout, const FrequencyGrid& grid,
                                    std::uint64_t seed, const ReflectionModel& model,
                                    const MediumParams& medium)
{
    const double omega = grid.center_omega();
    IlluminationSchedule s;
    s.seed = seed;
    for (auto&& part : {strategy_one(layout, soi_focus_centers(layout.soi), model, omega, medium),
                        strategy_two(layout, model, omega, medium),
                        strategy_three(layout, seed, model, omega, medium)})
        s.entries.insert(s.entries.end(), part.begin(), part.end());
    return s;
}

// --- serialization ----------------------------------------------------------

namespace {

constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<std::uint8_t>& in)
{
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < in.size(); i += 3) {
        const std::uint32_t n = (std::uint32_t(in[i]) << 16) |
                                (i + 1 < in.size() ? std::uint32_t(in[i + 1]) << 8 : 0) |
                                (i + 2 < in.size() ? std::uint32_t(in[i + 2]) : 0);
        out += kB64[(n >> 18) & 63];
        out += kB64[(n >> 12) & 63];
        out += i + 1 < in.size() ? kB64[(n >> 6) & 63] : '=';
        out += i + 2 < in.size() ? kB64[n & 63] : '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& in)
{
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    if (in.size() % 4 != 0)
        throw std::invalid_argument("base64: length not a multiple of 4");
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < in.size(); i += 4) {
        std::uint32_t n = 0;
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = in[i + k];
            if (c == '=') {
                ++pad;
                n <<= 6;
                continue;
            }
            const int v = value(c);
            if (v < 0 || pad > 0)
                throw std::invalid_argument("base64: invalid character");
            n = (n << 6) | static_cast<std::uint32_t>(v);
        }
        out.push_back(static_cast<std::uint8_t>(n >> 16));
        if (pad < 2)
            out.push_back(static_cast<std::uint8_t>(n >> 8));
        if (pad < 1)
            out.push_back(static_cast<std::uint8_t>(n));
    }
    return out;
}

Strategy strategy_from_string(const std::string& s)
{
    if (s == "I") return Strategy::I;
    if (s == "II") return Strategy::II;
    if (s == "III") return Strategy::III;
    throw std::invalid_argument("unknown strategy tag: " + s);
}

} // namespace

const char* to_string(Strategy s)
{
    switch (s) {
    case Strategy::I: return "I";
    case Strategy::II: return "II";
    case Strategy::III: return "III";
    }
    return "I";
}

std::string encode_bits(const std::vector<std::uint8_t>& bits)
{
    std::vector<std::uint8_t> packed((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i])
            packed[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    return base64_encode(packed);
}

std::vector<std::uint8_t> decode_bits(const std::string& text, int n_bits)
{
    const auto packed = base64_decode(text);
    if (packed.size() != static_cast<std::size_t>((n_bits + 7) / 8))
        throw std::invalid_argument("decode_bits: payload size does not match bit count");
    std::vector<std::uint8_t> bits(n_bits);
    for (int i = 0; i < n_bits; ++i)
        bits[i] = (packed[i / 8] >> (7 - i % 8)) & 1u;
    return bits;
}

nlohmann::json schedule_to_json(const IlluminationSchedule& schedule, const SystemLayout& layout)
{
    using nlohmann::json;
    json doc;
    doc["format"] = "duoris.schedule";
    doc["version"] = 1;
    doc["seed"] = schedule.seed;
    doc["bit_order"] = "row-major (ny, nx), MSB-first base64";
    doc["forward_panel"] = {{"nx", layout.forward.nx}, {"ny", layout.forward.ny}};
    doc["backward_panel"] = {{"nx", layout.backward.nx}, {"ny", layout.backward.ny}};
    json entries = json::array();
    for (const auto& e : schedule.entries) {
        json j;
        j["strategy"] = to_string(e.strategy);
        j["focus_index"] = e.focus_index ? json(*e.focus_index) : json(nullptr);
        j["forward"] = encode_bits(e.forward.bits);
        j["backward"] = encode_bits(e.backward.bits);
        entries.push_back(std::move(j));
    }
    doc["entries"] = std::move(entries);
    return doc;
}

IlluminationSchedule schedule_from_json(const nlohmann::json& doc)
{
    if (doc.value("format", "") != "duoris.schedule")
        throw std::invalid_argument("schedule_from_json: not a schedule document");
    const int kf = doc.at("forward_panel").at("nx").get<int>() * doc.at("forward_panel").at("ny").get<int>();
    const int kb = doc.at("backward_panel").at("nx").get<int>() * doc.at("backward_panel").at("ny").get<int>();
    IlluminationSchedule s;
    s.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& j : doc.at("entries")) {
        ScheduleEntry e;
        e.strategy = strategy_from_string(j.at("strategy").get<std::string>());
        if (!j.at("focus_index").is_null())
            e.focus_index = j.at("focus_index").get<int>();
        e.forward.bits = decode_bits(j.at("forward").get<std::string>(), kf);
        e.backward.bits = decode_bits(j.at("backward").get<std::string>(), kb);
        s.entries.push_back(std::move(e));
    }
    return s;
}

} // namespace duoris
