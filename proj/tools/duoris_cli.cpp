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


#include "duoris/config.hpp"
#include "duoris/dataset.hpp"
#include "duoris/pipeline.hpp"
#include "duoris/tensor_io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace duoris;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kIo = 3;

RunConfig config_or_default(const std::string& path)
{
    return path.empty() ? default_config(ScaleProfile::desk) : load_config(path);
}

void write_json(const fs::path& path, const json& doc)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::trunc);
    if (!f)
        throw IoError("cannot open " + path.string() + " for writing");
    f << doc.dump(1) << "\n";
    if (!f)
        throw IoError("write failed: " + path.string());
}

std::optional<Split> parse_split(const std::string& s)
{
    if (s == "all")
        return std::nullopt;
    if (s == "test")
        return Split::test;
    if (s == "train")
        return Split::train;
    throw std::invalid_argument("split must be test, train or all");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"duoris: dual-RIS RF imaging toolkit"};
    app.require_subcommand(1);

    std::string config_path, out, manifest_path, pred_dir, method = "fused", split = "test";
    int n = 0, iters = 200, art_iters = 20;
    std::uint64_t seed = 0, phantom_seed = 0;
    double lambda = 1e-3, relax = 0.5;
    std::vector<double> weights{0.5, 0.5};
    bool pgm = false;
    std::string meas_out, gt_out;

    auto* gen = app.add_subcommand("gen-dataset", "Generate a synthetic dataset with its manifest");
    gen->add_option("--config", config_path, "Configuration JSON (desk defaults when omitted)");
    gen->add_option("--n", n, "Number of samples")->required()->check(CLI::PositiveNumber);
    gen->add_option("--out", out, "Output directory")->required();
    gen->add_option("--seed", seed, "Base seed");
    gen->add_flag("--pgm", pgm, "Also export ground truths as PGM");

    auto* sim = app.add_subcommand("simulate", "Simulate one phantom and write its PSD tensor");
    sim->add_option("--config", config_path, "Configuration JSON");
    sim->add_option("--phantom-seed", phantom_seed, "Phantom seed")->required();
    sim->add_option("--out", out, "PSD tensor file")->required();
    sim->add_option("--meas", meas_out, "Also write the complex spectra here");
    sim->add_option("--gt", gt_out, "Also write the ground-truth image here");

    auto* pat = app.add_subcommand("patterns", "Write the illumination schedule as JSON");
    pat->add_option("--config", config_path, "Configuration JSON");
    pat->add_option("--out", out, "Schedule JSON file")->required();

    auto* inv = app.add_subcommand("invert", "Reconstruct images for a dataset split");
    inv->add_option("--manifest", manifest_path, "Dataset manifest")->required();
    inv->add_option("--method", method, "mf, cgls, art or fused")
        ->check(CLI::IsMember({"mf", "cgls", "art", "fused"}));
    inv->add_option("--lambda", lambda, "Tikhonov weight relative to the mean Gram diagonal")
        ->check(CLI::NonNegativeNumber);
    inv->add_option("--iters", iters, "CGLS iterations")->check(CLI::PositiveNumber);
    inv->add_option("--art-iters", art_iters, "ART sweeps")->check(CLI::NonNegativeNumber);
    inv->add_option("--relax", relax, "ART relaxation in (0, 1]");
    inv->add_option("--weights", weights, "Fusion weights: reflection shadow")->expected(2);
    inv->add_option("--split", split, "test, train or all")->check(CLI::IsMember({"test", "train", "all"}));
    inv->add_option("--out", out, "Prediction directory")->required();

    auto* ev = app.add_subcommand("eval", "Score predictions against ground truth");
    ev->add_option("--manifest", manifest_path, "Dataset manifest")->required();
    ev->add_option("--pred", pred_dir, "Prediction directory")->required();
    ev->add_option("--split", split, "test, train or all")->check(CLI::IsMember({"test", "train", "all"}));
    ev->add_option("--out", out, "Report JSON")->required();

    auto* base = app.add_subcommand("baseline", "Write the empty-scene PSD tensor");
    base->add_option("--config", config_path, "Configuration JSON");
    base->add_option("--out", out, "PSD tensor file")->required();
    base->add_option("--meas", meas_out, "Also write the complex spectra here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        if (*gen) {
            GenOptions opts;
            opts.write_pgm = pgm;
            opts.progress = [](int done, int total, bool reused) {
                std::fprintf(stderr, "\r%d/%d%s", done, total, reused ? " (cached)" : "         ");
                if (done == total)
                    std::fputc('\n', stderr);
            };
            const DatasetManifest m = gen_dataset(config_or_default(config_path), n, out, seed, opts);
            std::printf("wrote %zu samples, manifest %s (hash %s)\n", m.samples.size(),
                        (fs::path(out) / kManifestName).c_str(), manifest_hash(m).c_str());
        } else if (*sim || *base) {
            const RunConfig cfg = config_or_default(config_path);
            const SystemLayout layout = cfg.layout();
            SceneGrid scene = layout.soi.empty_copy();
            Capture cap;
            if (*sim) {
                const Phantom ph = sample_random_humanoid(phantom_seed, layout.soi.bounds());
                scene = rasterize_phantom(ph, layout.soi).grid;
                NoiseModel noise = cfg.noise;
                noise.seed = sample_noise_seed(phantom_seed);
                cap = capture_psd(layout, scene, cfg.schedule(), cfg.grid(), cfg.waveform(), noise,
                                  cfg.forward_options());
                if (!gt_out.empty())
                    write_tensor(gt_out, image_tensor(render_ground_truth(ph, layout, cfg.image_width,
                                                                          cfg.image_height)));
            } else {
                cap.measurement = *empty_baseline(layout, cfg.schedule(), cfg.grid(), cfg.waveform(),
                                                  cfg.forward_options());
                cap.psd = to_psd(cap.measurement);
            }
            write_tensor(out, psd_tensor(cap.psd));
            if (!meas_out.empty())
                write_tensor(meas_out, measurement_tensor(cap.measurement));
            std::printf("wrote %s (2, %d, %d)\n", out.c_str(), cap.psd.patterns, cap.psd.bins);
        } else if (*pat) {
            const RunConfig cfg = config_or_default(config_path);
            write_json(out, schedule_to_json(cfg.schedule(), cfg.layout()));
            std::printf("wrote %s\n", out.c_str());
        } else if (*inv) {
            InversionSettings s;
            s.method = method_from_string(method);
            s.lambda_rel = lambda;
            s.cgls_iters = iters;
            s.art_iters = art_iters;
            s.art_relax = relax;
            s.weights = {weights[0], weights[1]};
            const DatasetManifest m = load_manifest(manifest_path);
            const InvertSummary sum = invert_run(m, s, out, parse_split(split));
            std::printf("%s: wrote %d predictions to %s in %.1f s\n", method.c_str(), sum.written,
                        out.c_str(), sum.seconds);
        } else if (*ev) {
            const DatasetManifest m = load_manifest(manifest_path);
            const EvalReport rep = evaluate_run(m, pred_dir, {}, parse_split(split));
            write_json(out, rep.to_json());
            std::printf("evaluated %zu samples: ssim %.4f mae %.4f f_beta %.4f bce %.1f iou %.4f\n",
                        rep.samples.size(), rep.mean.ssim, rep.mean.mae, rep.mean.f_beta, rep.mean.bce,
                        rep.mean.iou);
            if (!rep.missing.empty()) {
                std::fprintf(stderr, "missing %zu predictions (first: %s)\n", rep.missing.size(),
                             rep.missing.front().c_str());
                return kIo;
            }
        }
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIo;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid: %s\n", e.what());
        return kValidation;
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kOk;
}
