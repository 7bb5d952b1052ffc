// Copyright (c) 2026 The procam authors.
// SPDX-License-Identifier: Apache-2.0

#include <procam/autodiff.h>
#include <procam/denoise.h>
#include <procam/error.h>
#include <procam/fixtures.h>
#include <procam/geometry.h>
#include <procam/io.h>
#include <procam/metrics.h>
#include <procam/optimize.h>
#include <procam/parallel.h>
#include <procam/render.h>
#include <procam/scene.h>
#include <procam/structured_light.h>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace procam;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kNumerical = 3 };

struct RenderFlags {
    int spp = 16;
    int depth = 4;
    bool no_clip = false;
    bool no_denoise = false;

    void add(CLI::App *app) {
        app->add_option("--spp", spp, "Samples per pixel")->check(CLI::PositiveNumber);
        app->add_option("--depth", depth, "Maximum path depth")->check(CLI::Range(1, kMaxPathDepth));
        app->add_flag("--no-clip", no_clip, "Disable per-sample radiance clipping");
        app->add_flag("--no-denoise", no_denoise, "Skip the cross-bilateral filter");
    }
    RenderSettings settings(uint64_t seed) const {
        RenderSettings rs;
        rs.spp = spp;
        rs.max_depth = depth;
        rs.clipping_enabled = !no_clip;
        rs.seed = seed;
        return rs;
    }
    DenoiseSettings denoise() const {
        DenoiseSettings d;
        d.enabled = !no_denoise;
        return d;
    }
};

std::pair<int, int> parse_size(const std::string &s) {
    int w = 0, h = 0;
    char x = 0;
    if (std::sscanf(s.c_str(), "%d%c%d", &w, &x, &h) != 3 || (x != 'x' && x != 'X') || w <= 0 || h <= 0)
        throw ValidationError("resolution", "expected WIDTHxHEIGHT, got '" + s + "'");
    return {w, h};
}

// input_*.png / target_*.png pairs in name order.
void read_pairs(const fs::path &dir, std::vector<SrgbImage> &inputs, std::vector<SrgbImage> &targets) {
    std::vector<fs::path> in_files;
    for (const auto &e : fs::directory_iterator(dir)) {
        std::string name = e.path().filename().string();
        if (name.rfind("input_", 0) == 0 && e.path().extension() == ".png") in_files.push_back(e.path());
    }
    std::sort(in_files.begin(), in_files.end());
    if (in_files.empty()) throw ValidationError("pairs", "no input_*.png files in " + dir.string());
    for (const auto &f : in_files) {
        fs::path t = dir / ("target_" + f.filename().string().substr(6));
        if (!fs::exists(t)) throw ValidationError("pairs", "missing " + t.string());
        inputs.push_back(read_png(f));
        targets.push_back(read_png(t));
    }
}

std::vector<fs::path> sorted_pngs(const fs::path &dir) {
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(dir))
        if (e.path().extension() == ".png") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

void write_map(const fs::path &path, const CorrespondenceMap &map) {
    LinearImage img(map.width, map.height, 3);
    for (size_t i = 0; i < map.valid.size(); ++i) {
        img.storage()[i * 3 + 0] = map.projector_x[i];
        img.storage()[i * 3 + 1] = map.projector_y[i];
        img.storage()[i * 3 + 2] = map.valid[i];
    }
    write_pfm(path, img);
}

CorrespondenceMap read_map(const fs::path &path) {
    LinearImage img = read_pfm(path);
    if (img.channels() != 3) throw ValidationError("map", "expected a 3-channel correspondence PFM");
    CorrespondenceMap map;
    map.width = img.width();
    map.height = img.height();
    for (size_t i = 0; i < img.pixel_count(); ++i) {
        map.projector_x.push_back(img.storage()[i * 3 + 0]);
        map.projector_y.push_back(img.storage()[i * 3 + 1]);
        map.valid.push_back(img.storage()[i * 3 + 2] > 0.5 ? 1 : 0);
    }
    return map;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"procam: differentiable projector-camera simulator"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI/TOML file with option values");
    int threads = 0;
    uint64_t seed = 0;
    app.add_option("--threads", threads, "Worker threads (default: PROCAM_THREADS or all cores)");
    app.add_option("--seed", seed, "Random seed");

    // make-fixture
    auto *mk = app.add_subcommand("make-fixture", "Write a synthetic scene with rendered training/test pairs");
    std::string fixture_kind = "flat-plane", camera_size = "640x360", projector_size = "800x600";
    fs::path out_dir;
    FixtureSpec fspec;
    mk->add_option("--kind", fixture_kind, "flat-plane | two-plane-corner | textured-relief");
    mk->add_option("--out", out_dir, "Output directory")->required();
    mk->add_option("--train", fspec.train_count, "Training pairs")->check(CLI::NonNegativeNumber);
    mk->add_option("--test", fspec.test_count, "Test pairs")->check(CLI::NonNegativeNumber);
    mk->add_option("--spp", fspec.spp, "Samples per pixel for the targets")->check(CLI::PositiveNumber);
    mk->add_option("--depth", fspec.max_depth, "Maximum path depth")->check(CLI::Range(1, kMaxPathDepth));
    mk->add_option("--camera", camera_size, "Camera resolution WxH");
    mk->add_option("--projector", projector_size, "Projector resolution WxH");

    // sl-generate
    auto *slg = app.add_subcommand("sl-generate", "Write the Gray-code pattern sequence as PNGs");
    int sl_w = 800, sl_h = 600;
    slg->add_option("--width", sl_w, "Projector width")->check(CLI::PositiveNumber);
    slg->add_option("--height", sl_h, "Projector height")->check(CLI::PositiveNumber);
    slg->add_option("--out", out_dir, "Output directory")->required();

    // sl-decode
    auto *sld = app.add_subcommand("sl-decode", "Decode captured patterns into a correspondence map");
    fs::path captures_dir, map_path;
    sld->add_option("--captures", captures_dir, "Directory of captures in pattern order")->required();
    sld->add_option("--projector", projector_size, "Projector resolution WxH");
    sld->add_option("--out", map_path, "Correspondence PFM (x_p, y_p, valid)")->required();

    // reconstruct
    auto *rec = app.add_subcommand("reconstruct", "Triangulate a correspondence map into a point cloud and mesh");
    fs::path scene_path, mesh_out, cloud_out;
    int stride = 1;
    rec->add_option("--scene", scene_path, "Scene JSON with calibrated devices")->required();
    rec->add_option("--map", map_path, "Correspondence PFM from sl-decode")->required();
    rec->add_option("--mesh", mesh_out, "Output OBJ")->required();
    rec->add_option("--cloud", cloud_out, "Output PLY point cloud");
    rec->add_option("--stride", stride, "Grid downsampling stride")->check(CLI::PositiveNumber);

    // train
    auto *tr = app.add_subcommand("train", "Estimate scene parameters from image pairs");
    RenderFlags train_flags;
    train_flags.add(tr);
    fs::path pairs_dir;
    TrainConfig tcfg;
    bool freeze_materials = false, train_pose = false;
    tr->add_option("--scene", scene_path, "Initial scene JSON")->required();
    tr->add_option("--pairs", pairs_dir, "Directory with input_*.png / target_*.png")->required();
    tr->add_option("--out", out_dir, "Checkpoint directory")->required();
    tr->add_option("--iterations", tcfg.iterations, "Optimizer steps")->check(CLI::NonNegativeNumber);
    tr->add_option("--batch", tcfg.batch_size, "Pairs per step")->check(CLI::PositiveNumber);
    tr->add_option("--lambda-reg", tcfg.lambda_reg, "TV weight per material map");
    tr->add_option("--lr-textures", tcfg.learning_rates.textures, "Texture learning rate");
    tr->add_option("--lr-responses", tcfg.learning_rates.responses, "Response learning rate");
    tr->add_option("--lr-pose", tcfg.learning_rates.pose, "Pose learning rate");
    tr->add_flag("--freeze-materials", freeze_materials, "Keep the material maps fixed");
    tr->add_flag("--train-pose", train_pose, "Also refine the camera pose");

    // relight / render
    auto *rl = app.add_subcommand("relight", "Render and denoise a novel projector input");
    RenderFlags relight_flags;
    relight_flags.add(rl);
    fs::path input_path, output_path, pfm_path;
    rl->add_option("--scene", scene_path, "Scene JSON")->required();
    rl->add_option("--input", input_path, "Projector input PNG")->required();
    rl->add_option("--out", output_path, "Output PNG")->required();

    auto *rn = app.add_subcommand("render", "Render one projector input");
    RenderFlags render_flags;
    render_flags.no_denoise = true;
    render_flags.add(rn);
    rn->add_option("--scene", scene_path, "Scene JSON")->required();
    rn->add_option("--input", input_path, "Projector input PNG")->required();
    rn->add_option("--out", output_path, "Output PNG (after the camera response)")->required();
    rn->add_option("--pfm", pfm_path, "Linear irradiance PFM (before the camera response)");

    // compensate
    auto *cp = app.add_subcommand("compensate", "Find the projector input reproducing a target image");
    RenderFlags comp_flags;
    comp_flags.add(cp);
    CompensateConfig ccfg;
    fs::path rendered_path;
    cp->add_option("--scene", scene_path, "Scene JSON")->required();
    cp->add_option("--target", input_path, "Desired camera image PNG")->required();
    cp->add_option("--out", output_path, "Compensated projector input PNG")->required();
    cp->add_option("--rendered", rendered_path, "Re-render of the result");
    cp->add_option("--iterations", ccfg.iterations, "Optimizer steps")->check(CLI::NonNegativeNumber);
    cp->add_option("--lr", ccfg.learning_rate, "Learning rate");

    // fd-check
    auto *fd = app.add_subcommand("fd-check", "Compare backward() against central differences");
    RenderFlags fd_flags;
    fd_flags.no_denoise = true;
    fd_flags.add(fd);
    std::vector<std::string> targets{"projector_gamma:0", "camera_gamma:0", "white_balance:0"};
    double fd_h = 1e-3;
    fd->add_option("--scene", scene_path, "Scene JSON")->required();
    fd->add_option("--input", input_path, "Projector input PNG (default: mid gray)");
    fd->add_option("--param", targets, "name:index entries; name may be projector_input");
    fd->add_option("--step", fd_h, "Finite-difference step");

    // metrics
    auto *mt = app.add_subcommand("metrics", "PSNR / SSIM / L1 / RGB distance between images or directories");
    fs::path a_path, b_path, csv_path;
    mt->add_option("a", a_path, "Image or directory")->required();
    mt->add_option("b", b_path, "Image or directory")->required();
    mt->add_option("--csv", csv_path, "Write the report as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    if (threads > 0) set_thread_count(threads);

    try {
        if (*mk) {
            fspec.kind = fixture_from_name(fixture_kind);
            fspec.seed = seed;
            std::tie(fspec.camera_width, fspec.camera_height) = parse_size(camera_size);
            std::tie(fspec.projector_width, fspec.projector_height) = parse_size(projector_size);
            FixtureData data = make_fixture(fspec);
            write_fixture(data, out_dir);
            std::cout << "wrote " << fixture_name(fspec.kind) << " fixture to " << out_dir << "\n";
        } else if (*slg) {
            GrayCodeSet set(sl_w, sl_h);
            fs::create_directories(out_dir);
            for (int i = 0; i < set.count(); ++i) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "pattern_%03d.png", i);
                write_png(out_dir / buf, set.pattern(i));
            }
            std::cout << set.count() << " patterns\n";
        } else if (*sld) {
            auto [pw, ph] = parse_size(projector_size);
            GrayCodeSet set(pw, ph);
            std::vector<SrgbImage> caps;
            for (const auto &f : sorted_pngs(captures_dir)) caps.push_back(read_png(f));
            CorrespondenceMap map = decode(caps, set);
            write_map(map_path, map);
            std::cout << map.valid_count() << " valid pixels\n";
        } else if (*rec) {
            auto scene = load_scene(scene_path);
            CorrespondenceMap map = read_map(map_path);
            DepthGrid grid = triangulate(map, scene->camera.intrinsics, scene->projector.intrinsics,
                                         scene->projector.rotation, scene->projector.translation);
            if (!cloud_out.empty()) write_ply(cloud_out, grid.points);
            write_obj(mesh_out, mesh_from_depth(grid, scene->camera.intrinsics, stride));
            std::cout << grid.points.size() << " points\n";
        } else if (*tr) {
            auto scene = load_scene(scene_path);
            read_pairs(pairs_dir, tcfg.inputs, tcfg.targets);
            tcfg.seed = seed;
            tcfg.render = train_flags.settings(seed);
            tcfg.denoise = train_flags.denoise();
            tcfg.trainable = GradientRequest::all();
            for (ParamId id : kAllParams)
                if ((freeze_materials && is_texture_param(id)) ||
                    (!train_pose && (id == ParamId::PoseRotation || id == ParamId::PoseTranslation)))
                    tcfg.trainable.with(id, false);
            fs::create_directories(out_dir);
            tcfg.dump_path = out_dir / "gradients_at_failure.txt";
            std::ofstream log(out_dir / "loss.csv");
            log << "iteration,loss\n";
            tcfg.on_iteration = [&](int it, double loss) { log << it << "," << loss << "\n"; };
            train(*scene, tcfg);
            save_scene(*scene, out_dir);
            std::cout << "checkpoint written to " << out_dir << "\n";
        } else if (*rl) {
            auto scene = load_scene(scene_path);
            write_png(output_path,
                      relight(*scene, read_png(input_path), relight_flags.settings(seed), relight_flags.denoise()));
        } else if (*rn) {
            auto scene = load_scene(scene_path);
            RenderSettings rs = render_flags.settings(seed);
            SrgbImage in = read_png(input_path);
            RenderResult r = render(*scene, in, rs);
            SrgbImage out = r.image;
            if (!render_flags.no_denoise) out = denoise(out, render_aux(*scene), render_flags.denoise());
            write_png(output_path, out);
            if (!pfm_path.empty()) write_pfm(pfm_path, r.irradiance);
            if (r.dropped_samples) std::cerr << r.dropped_samples << " non-finite samples dropped\n";
        } else if (*cp) {
            auto scene = load_scene(scene_path);
            ccfg.render = comp_flags.settings(seed);
            ccfg.denoise = comp_flags.denoise();
            CompensationResult res = compensate(*scene, read_png(input_path), ccfg);
            write_png(output_path, res.projector_input);
            if (!rendered_path.empty()) write_png(rendered_path, res.rendered);
        } else if (*fd) {
            auto scene = load_scene(scene_path);
            SrgbImage in = input_path.empty() ? SrgbImage(scene->projector.width, scene->projector.height, 3, 0.5)
                                              : read_png(input_path);
            std::cout << "parameter,analytic,numeric,relative_error\n";
            for (const auto &t : targets) {
                auto colon = t.find(':');
                FdTarget target;
                std::string name = t.substr(0, colon);
                target.index = colon == std::string::npos ? 0 : std::stoul(t.substr(colon + 1));
                if (name == "projector_input") target.projector_input = true;
                else {
                    try {
                        target.param = param_from_name(name);
                    } catch (const std::invalid_argument &e) {
                        throw ValidationError("param", e.what());
                    }
                }
                FdReport r = fd_check(*scene, in, target, fd_h, fd_flags.settings(seed));
                std::cout << r.name << "," << r.analytic << "," << r.numeric << "," << r.relative_error << "\n";
            }
        } else if (*mt) {
            MetricsReport report;
            if (fs::is_directory(a_path)) {
                for (const auto &f : sorted_pngs(a_path))
                    report.rows.push_back(
                        compare_images(read_png(f), read_png(b_path / f.filename()), f.filename().string()));
            } else {
                report.rows.push_back(compare_images(read_png(a_path), read_png(b_path), a_path.filename().string()));
            }
            MetricsRow m = report.mean();
            std::cout << "psnr_db " << m.psnr << "\nssim " << m.ssim << "\nmean_l1 " << m.l1
                      << "\nrgb_distance_x100 " << m.rgb_distance << "\n";
            if (!csv_path.empty()) report.write_csv(csv_path);
        }
    } catch (const NumericalError &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const ValidationError &e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kValidation;
    } catch (const ParseError &e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kValidation;
    } catch (const IoError &e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::invalid_argument &e) {
        std::cerr << "usage: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    }
    return kOk;
}
