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


#include "duoris/dataset.hpp"
#include "duoris/tensor_io.hpp"
#include "duoris/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace duoris {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kNoiseSalt = 0x6e6f697365ULL;

std::string sample_id(int k)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "sample_%05d", k);
    return buf;
}

json record_to_json(const SampleRecord& r)
{
    return json{{"id", r.id},
                {"psd_path", r.psd_path},
                {"gt_path", r.gt_path},
                {"meas_path", r.meas_path},
                {"phantom_seed", r.phantom_seed},
                {"pose_family", to_string(r.pose)},
                {"snr_db", r.snr_db},
                {"layout_hash", r.layout_hash},
                {"schedule_seed", r.schedule_seed},
                {"split", to_string(r.split)}};
}

SampleRecord record_from_json(const json& j)
{
    SampleRecord r;
    r.id = j.at("id").get<std::string>();
    r.psd_path = j.at("psd_path").get<std::string>();
    r.gt_path = j.at("gt_path").get<std::string>();
    r.meas_path = j.value("meas_path", std::string());
    r.phantom_seed = j.at("phantom_seed").get<std::uint64_t>();
    r.pose = pose_family_from_string(j.at("pose_family").get<std::string>());
    r.snr_db = j.at("snr_db").get<double>();
    r.layout_hash = j.at("layout_hash").get<std::string>();
    r.schedule_seed = j.at("schedule_seed").get<std::uint64_t>();
    const std::string s = j.value("split", std::string("train"));
    if (s != "train" && s != "test")
        throw FormatError("manifest: split must be train or test");
    r.split = s == "test" ? Split::test : Split::train;
    return r;
}

void write_text(const fs::path& path, const std::string& text)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::trunc);
        if (!f)
            throw IoError("cannot open " + tmp.string() + " for writing");
        f << text;
        f.flush();
        if (!f)
            throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

json read_json(const fs::path& path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open " + path.string());
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

// Content key of one sample: a sidecar with the same key means the files on
// disk were produced by exactly these inputs.
std::string sample_key(const std::string& layout, std::uint64_t phantom_seed, const RunConfig& cfg,
                       bool pgm)
{
    Fnv1a h;
    h.str(layout).u64(phantom_seed).f64(cfg.noise.snr_db).u64(cfg.noise.enabled);
    h.u64(cfg.image_width).u64(cfg.image_height).u64(pgm);
    return h.hex();
}

} // namespace

const char* to_string(Split s)
{
    return s == Split::test ? "test" : "train";
}

std::vector<const SampleRecord*> DatasetManifest::select(std::optional<Split> split) const
{
    std::vector<const SampleRecord*> out;
    for (const auto& s : samples)
        if (!split || s.split == *split)
            out.push_back(&s);
    return out;
}

std::uint64_t sample_phantom_seed(std::uint64_t base_seed, int k)
{
    return mix64(base_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(k) + 1));
}

std::uint64_t sample_noise_seed(std::uint64_t phantom_seed)
{
    return mix64(phantom_seed ^ kNoiseSalt);
}

std::vector<Split> assign_splits(const std::vector<std::uint64_t>& seeds, double test_fraction)
{
    if (!(test_fraction >= 0.0 && test_fraction <= 1.0))
        throw std::invalid_argument("assign_splits: test_fraction must lie in [0, 1]");
    const std::size_t n = seeds.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return Fnv1a().u64(seeds[a]).value() < Fnv1a().u64(seeds[b]).value();
    });
    const auto n_test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(n)));
    std::vector<Split> out(n, Split::train);
    for (std::size_t i = 0; i < n_test; ++i)
        out[order[i]] = Split::test;
    return out;
}

std::string layout_hash(const RunConfig& cfg)
{
    const std::uint64_t key = baseline_key(cfg.layout(), cfg.schedule(), cfg.grid(), cfg.waveform(),
                                           cfg.forward_options());
    return Fnv1a().u64(key).hex();
}

DatasetManifest gen_dataset(const RunConfig& cfg, int n, const fs::path& out_dir,
                            std::uint64_t base_seed, const GenOptions& opts)
{
    validate_config(cfg);
    if (n < 1)
        throw std::invalid_argument("gen_dataset: need at least one sample");
    std::error_code ec;
    fs::create_directories(out_dir / "samples", ec);
    if (ec)
        throw IoError("cannot create " + (out_dir / "samples").string() + ": " + ec.message());

    const SystemLayout layout = cfg.layout();
    const IlluminationSchedule schedule = cfg.schedule();
    const FrequencyGrid grid = cfg.grid();
    const SourceWaveform wave = cfg.waveform();
    const ForwardOptions fwd = cfg.forward_options();
    const std::string lhash = Fnv1a().u64(baseline_key(layout, schedule, grid, wave, fwd)).hex();

    DatasetManifest m;
    m.config = config_to_json(cfg);
    m.base_seed = base_seed;
    m.dir = out_dir;
    m.samples.resize(n);

    for (int k = 0; k < n; ++k) {
        const std::string id = sample_id(k);
        const std::uint64_t seed = sample_phantom_seed(base_seed, k);
        const std::string key = sample_key(lhash, seed, cfg, opts.write_pgm);
        const fs::path sidecar = out_dir / "samples" / (id + ".json");

        SampleRecord rec;
        bool reused = false;
        if (fs::exists(sidecar)) {
            try {
                const json j = read_json(sidecar);
                if (j.value("key", std::string()) == key) {
                    rec = record_from_json(j.at("record"));
                    reused = fs::exists(out_dir / rec.psd_path) && fs::exists(out_dir / rec.gt_path) &&
                             fs::exists(out_dir / rec.meas_path);
                }
            } catch (const std::exception&) {
                reused = false;
            }
        }

        if (!reused) {
            const Phantom phantom = sample_random_humanoid(seed, layout.soi.bounds());
            const RasterResult raster = rasterize_phantom(phantom, layout.soi);
            NoiseModel noise = cfg.noise;
            noise.seed = sample_noise_seed(seed);
            const Capture cap = capture_psd(layout, raster.grid, schedule, grid, wave, noise, fwd);
            const Eigen::ArrayXXd gt = render_ground_truth(phantom, layout, cfg.image_width, cfg.image_height);

            rec.id = id;
            rec.psd_path = "samples/" + id + "_psd.drmr";
            rec.gt_path = "samples/" + id + "_gt.drmr";
            rec.meas_path = "samples/" + id + "_meas.drmr";
            rec.phantom_seed = seed;
            rec.pose = phantom.pose;
            rec.snr_db = cfg.noise.snr_db;
            rec.layout_hash = lhash;
            rec.schedule_seed = cfg.schedule_seed;

            write_tensor(out_dir / rec.psd_path, psd_tensor(cap.psd));
            write_tensor(out_dir / rec.meas_path, measurement_tensor(cap.measurement));
            write_tensor(out_dir / rec.gt_path, image_tensor(gt));
            if (opts.write_pgm)
                write_pgm(out_dir / "samples" / (id + "_gt.pgm"), gt);
            write_text(sidecar, json{{"key", key}, {"record", record_to_json(rec)}}.dump(1) + "\n");
        }
        m.samples[k] = rec;
        if (opts.progress)
            opts.progress(k + 1, n, reused);
    }

    std::vector<std::uint64_t> seeds;
    for (const auto& s : m.samples)
        seeds.push_back(s.phantom_seed);
    const auto splits = assign_splits(seeds, opts.test_fraction);
    for (int k = 0; k < n; ++k)
        m.samples[k].split = splits[k];

    write_manifest(m, out_dir / kManifestName);
    return m;
}

json manifest_to_json(const DatasetManifest& m)
{
    json samples = json::array();
    for (const auto& s : m.samples)
        samples.push_back(record_to_json(s));
    return json{{"format", "duoris-manifest"},
                {"version", 1},
                {"base_seed", m.base_seed},
                {"config", m.config},
                {"samples", samples}};
}

DatasetManifest manifest_from_json(const json& doc, const fs::path& dir)
{
    DatasetManifest m;
    m.dir = dir;
    try {
        if (doc.at("format") != "duoris-manifest" || doc.at("version") != 1)
            throw FormatError("manifest: unsupported format or version");
        m.base_seed = doc.at("base_seed").get<std::uint64_t>();
        m.config = doc.at("config");
        for (const auto& s : doc.at("samples"))
            m.samples.push_back(record_from_json(s));
    } catch (const json::exception& e) {
        throw FormatError(std::string("manifest: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("manifest: ") + e.what());
    }
    return m;
}

void write_manifest(const DatasetManifest& m, const fs::path& file)
{
    write_text(file, manifest_to_json(m).dump(1) + "\n");
}

DatasetManifest load_manifest(const fs::path& file)
{
    DatasetManifest m = manifest_from_json(read_json(file), file.parent_path());
    std::vector<std::string> missing;
    for (const auto& s : m.samples)
        for (const auto* p : {&s.psd_path, &s.gt_path, &s.meas_path})
            if (!p->empty() && !fs::exists(m.dir / *p))
                missing.push_back(*p);
    if (!missing.empty()) {
        std::string msg = "manifest references missing files:";
        for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 5); ++i)
            msg += " " + missing[i];
        if (missing.size() > 5)
            msg += " (+" + std::to_string(missing.size() - 5) + " more)";
        throw IoError(msg);
    }
    return m;
}

std::string manifest_hash(const DatasetManifest& m)
{
    return Fnv1a().str(manifest_to_json(m).dump()).hex();
}

// --- evaluation -------------------------------------------------------------

MetricSet mean_metrics(const std::vector<MetricSet>& sets)
{
    MetricSet out;
    if (sets.empty())
        return out;
    for (const auto& s : sets) {
        out.ssim += s.ssim;
        out.mae += s.mae;
        out.f_beta += s.f_beta;
        out.bce += s.bce;
        out.iou += s.iou;
        out.loss += s.loss;
    }
    const double n = static_cast<double>(sets.size());
    out.ssim /= n;
    out.mae /= n;
    out.f_beta /= n;
    out.bce /= n;
    out.iou /= n;
    out.loss /= n;
    return out;
}

namespace {

json metrics_json(const MetricSet& m)
{
    return json{{"ssim", m.ssim}, {"mae", m.mae}, {"f_beta", m.f_beta},
                {"bce", m.bce},   {"iou", m.iou}, {"loss", m.loss}};
}

} // namespace

json EvalReport::to_json() const
{
    json per = json::array();
    for (const auto& s : samples) {
        json j = metrics_json(s.metrics);
        j["id"] = s.id;
        per.push_back(j);
    }
    return json{{"samples", per},
                {"evaluated", samples.size()},
                {"missing", missing},
                {"mean", metrics_json(mean)}};
}

EvalReport evaluate_run(const DatasetManifest& manifest, const fs::path& pred_dir,
                        const MetricConfig& cfg, std::optional<Split> split)
{
    const auto chosen = manifest.select(split);
    if (chosen.empty())
        throw std::invalid_argument("evaluate_run: no samples in the selected split");
    EvalReport rep;
    std::vector<MetricSet> sets;
    for (const SampleRecord* s : chosen) {
        const fs::path pred_file = pred_dir / (s->id + ".drmr");
        if (!fs::exists(pred_file)) {
            rep.missing.push_back(s->id);
            continue;
        }
        const Eigen::ArrayXXd pred = image_from_tensor(read_tensor(pred_file));
        const Eigen::ArrayXXd gt = image_from_tensor(read_tensor(manifest.dir / s->gt_path));
        rep.samples.push_back({s->id, evaluate_pair(pred, gt, cfg)});
        sets.push_back(rep.samples.back().metrics);
    }
    rep.mean = mean_metrics(sets);
    return rep;
}

} // namespace duoris
