// Command-line front end: dataset generation, kinematics alignment,
// ablation sweeps and metric aggregation. All outputs except run.log are
// deterministic for a fixed config and seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kinalign/errors.hpp"
#include "kinalign/features.hpp"
#include "kinalign/image.hpp"
#include "kinalign/kinematics.hpp"
#include "kinalign/metrics.hpp"
#include "kinalign/optimizer.hpp"
#include "kinalign/parallel.hpp"
#include "kinalign/rasterizer.hpp"
#include "kinalign/scenegen.hpp"
#include "kinalign/serialize.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace kinalign;

namespace {

// --- Run configuration -------------------------------------------------------

/// Everything a run needs beyond the dataset itself. Defaults are the bundled
/// tuned configuration for the demo scene; `gen` consumes the scene fields,
/// `align`/`ablate` take the scene from the manifest and consume the rest.
struct RunConfig {
    std::string chain_file;  // empty -> bundled demo chain
    PinholeCamera camera = demo_camera();
    PointLight light = demo_light();
    SoftRenderConfig renderer;
    OptimizeSpec optimizer;  // embeds extractor + loss parameters

    RunConfig() {
        renderer.sigma = 4.0;
        renderer.gamma = 1e-4;
        renderer.background_value = 0.0;
        optimizer.step_size = 0.10;
        optimizer.max_iters = 1500;
        optimizer.convergence_eps = 1e-9;
        optimizer.dilation_radius = 999;  // covers the frame: plain feature loss
        // Calibrated against the hard rasterization: at sigma = 4 the soft
        // silhouette crosses 0.5 a couple of pixels outside the true edge,
        // and 0.8 is where the thresholded mask agrees with it best.
        optimizer.attention_threshold = 0.8;
    }

    void validate() const {
        renderer.validate();
        optimizer.validate();
        if (!chain_file.empty() && !fs::exists(chain_file)) {
            throw ConfigError("config: chain_file does not exist: " + chain_file);
        }
        const auto& ex = optimizer.extractor;
        if (ex.kind == "external" && !fs::exists(ex.external_path)) {
            throw ConfigError("config: extractor.external_path does not exist: " +
                              ex.external_path);
        }
    }
};

void check_keys(const json& j, const char* context,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError(std::string("config: unknown key '") + item.key() +
                              "' in " + context);
        }
    }
}

json run_config_to_json(const RunConfig& cfg) {
    const OptimizeSpec& opt = cfg.optimizer;
    return json{
        {"chain_file", cfg.chain_file},
        {"camera", camera_to_json(cfg.camera)},
        {"light", light_to_json(cfg.light)},
        {"renderer", render_config_to_json(cfg.renderer)},
        {"optimizer",
         {{"target", to_string(opt.target)},
          {"step_size", opt.step_size},
          {"max_iters", opt.max_iters},
          {"loss", to_string(opt.loss)},
          {"convergence_eps", opt.convergence_eps},
          {"clamp_to_limits", opt.clamp_to_limits},
          {"prismatic_step_scale", opt.prismatic_step_scale}}},
        {"extractor",
         {{"kind", opt.extractor.kind},
          {"external_path", opt.extractor.external_path}}},
        {"losses",
         {{"threshold", opt.attention_threshold},
          {"dilation_radius", opt.dilation_radius},
          {"beta", opt.smooth_l1_beta}}},
    };
}

RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    check_keys(j, "config root",
               {"chain_file", "camera", "light", "renderer", "optimizer",
                "extractor", "losses"});
    if (j.contains("chain_file")) cfg.chain_file = j.at("chain_file").get<std::string>();
    if (j.contains("camera")) {
        check_keys(j.at("camera"), "camera",
                   {"fx", "fy", "cx", "cy", "width", "height", "extrinsics"});
        cfg.camera = camera_from_json(j.at("camera"));
    }
    if (j.contains("light")) {
        check_keys(j.at("light"), "light", {"position", "intensity"});
        cfg.light = light_from_json(j.at("light"));
    }
    if (j.contains("renderer")) {
        check_keys(j.at("renderer"), "renderer", {"sigma", "gamma", "background_value"});
        cfg.renderer = render_config_from_json(j.at("renderer"));
    }
    if (j.contains("optimizer")) {
        const json& o = j.at("optimizer");
        check_keys(o, "optimizer",
                   {"target", "step_size", "max_iters", "loss", "convergence_eps",
                    "clamp_to_limits", "prismatic_step_scale"});
        OptimizeSpec& opt = cfg.optimizer;
        if (o.contains("target")) opt.target = target_from_string(o.at("target"));
        if (o.contains("step_size")) opt.step_size = o.at("step_size").get<double>();
        if (o.contains("max_iters")) opt.max_iters = o.at("max_iters").get<int>();
        if (o.contains("loss")) opt.loss = loss_from_string(o.at("loss"));
        if (o.contains("convergence_eps")) {
            opt.convergence_eps = o.at("convergence_eps").get<double>();
        }
        if (o.contains("clamp_to_limits")) {
            opt.clamp_to_limits = o.at("clamp_to_limits").get<bool>();
        }
        if (o.contains("prismatic_step_scale")) {
            opt.prismatic_step_scale = o.at("prismatic_step_scale").get<double>();
        }
    }
    if (j.contains("extractor")) {
        const json& e = j.at("extractor");
        check_keys(e, "extractor", {"kind", "external_path"});
        if (e.contains("kind")) cfg.optimizer.extractor.kind = e.at("kind").get<std::string>();
        if (e.contains("external_path")) {
            cfg.optimizer.extractor.external_path = e.at("external_path").get<std::string>();
        }
    }
    if (j.contains("losses")) {
        const json& l = j.at("losses");
        check_keys(l, "losses", {"threshold", "dilation_radius", "beta"});
        if (l.contains("threshold")) {
            cfg.optimizer.attention_threshold = l.at("threshold").get<double>();
        }
        if (l.contains("dilation_radius")) {
            cfg.optimizer.dilation_radius = l.at("dilation_radius").get<int>();
        }
        if (l.contains("beta")) cfg.optimizer.smooth_l1_beta = l.at("beta").get<double>();
    }
    cfg.validate();
    return cfg;
}

json parse_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string("cannot open ") + what + ": " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + " " + path + ": " + e.what());
    }
}

RunConfig load_run_config(const std::string& path) {
    if (path.empty()) return RunConfig{};
    return run_config_from_json(parse_json_file(path, "config"));
}

// --- Output helpers ----------------------------------------------------------

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
}

void write_run_log(const std::string& out_dir, int argc, char** argv) {
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    std::ostringstream line;
    line << stamp;
    for (int i = 0; i < argc; ++i) line << ' ' << argv[i];
    line << '\n';
    std::ofstream out(fs::path(out_dir) / "run.log", std::ios::app);
    if (out) out << line.str();
}

void emit_effective_config(const RunConfig& cfg, const std::string& out_dir) {
    write_text((fs::path(out_dir) / "effective_config.json").string(),
               run_config_to_json(cfg).dump(2) + "\n");
}

std::string frame_name(int index, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "frame_%04d_%s", index, suffix);
    return buf;
}

/// The method's output mask: thresholded soft silhouette, the same rule
/// align() applies to its best iterate.
MaskImage soft_mask(const KinematicState& state, const SoftRenderConfig& cfg,
                    double threshold) {
    const ImageGray sil =
        soft_silhouette(pose_meshes(state.chain, state.joints), state.camera, cfg)
            .silhouette;
    MaskImage mask(sil.width, sil.height);
    for (std::size_t i = 0; i < sil.data.size(); ++i) {
        mask.data[i] = sil.data[i] > threshold ? 1 : 0;
    }
    return mask;
}

/// Minimal scatter plot: white canvas, framed axes with quarter ticks,
/// 3x3 points, optional y=x guide. Axis labels live in the sidecar JSON
/// written next to each plot.
ImageRgb scatter_plot(const std::vector<double>& xs, const std::vector<double>& ys,
                      double x_min, double x_max, double y_min, double y_max,
                      bool diagonal) {
    const int w = 360, h = 270, m = 24;
    ImageRgb img(w, h, 1.0);
    auto put = [&](int x, int y, double r, double g, double b) {
        if (x < 0 || y < 0 || x >= w || y >= h) return;
        img.at(x, y, 0) = r;
        img.at(x, y, 1) = g;
        img.at(x, y, 2) = b;
    };
    for (int x = m; x <= w - m; ++x) {
        put(x, m, 0.2, 0.2, 0.2);
        put(x, h - m, 0.2, 0.2, 0.2);
    }
    for (int y = m; y <= h - m; ++y) {
        put(m, y, 0.2, 0.2, 0.2);
        put(w - m, y, 0.2, 0.2, 0.2);
    }
    for (int q = 1; q < 4; ++q) {
        const int tx = m + q * (w - 2 * m) / 4;
        const int ty = h - m - q * (h - 2 * m) / 4;
        for (int t = 1; t <= 4; ++t) {
            put(tx, h - m + t, 0.2, 0.2, 0.2);
            put(m - t, ty, 0.2, 0.2, 0.2);
        }
    }
    const double x_span = x_max > x_min ? x_max - x_min : 1.0;
    const double y_span = y_max > y_min ? y_max - y_min : 1.0;
    auto px = [&](double v) {
        return m + static_cast<int>(std::lround((v - x_min) / x_span * (w - 2 * m)));
    };
    auto py = [&](double v) {
        return h - m - static_cast<int>(std::lround((v - y_min) / y_span * (h - 2 * m)));
    };
    if (diagonal) {
        for (int i = 0; i <= 200; ++i) {
            const double v = i / 200.0;
            put(px(x_min + v * x_span), py(y_min + v * y_span), 0.8, 0.8, 0.8);
        }
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const int cx = px(xs[i]), cy = py(ys[i]);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                put(cx + dx, cy + dy, 0.10, 0.25, 0.70);
            }
        }
    }
    return img;
}

void emit_scatter(const std::string& out_dir, const std::string& stem,
                  const char* x_label, const char* y_label,
                  const std::vector<double>& xs, const std::vector<double>& ys,
                  double x_min, double x_max, double y_min, double y_max,
                  bool diagonal) {
    const fs::path base = fs::path(out_dir) / stem;
    save_png(scatter_plot(xs, ys, x_min, x_max, y_min, y_max, diagonal),
             base.string() + ".png");
    json meta{{"x_label", x_label}, {"y_label", y_label},
              {"x_range", {x_min, x_max}}, {"y_range", {y_min, y_max}},
              {"x", xs},             {"y", ys}};
    write_text(base.string() + ".json", meta.dump(2) + "\n");
}

// --- Shared alignment driver -------------------------------------------------

struct SceneSetup {
    DHChain chain;
    MeanBackground background;
};

SceneSetup load_scene(const DatasetManifest& manifest) {
    if (manifest.frames.empty()) {
        throw ConfigError("manifest lists no frames");
    }
    SceneSetup scene;
    scene.chain = load_chain(manifest.chain_file);
    scene.background.image = load_pfm_rgb(manifest.mean_background);
    return scene;
}

struct FrameOutcome {
    bool ok = false;
    std::string error;
    EvalRecord record;
    AlignmentResult result;  // only when optimized
    bool optimized = false;
    MaskImage mask;
};

/// Runs one frame end to end; never throws (failures land in `error`).
FrameOutcome run_frame(const DatasetManifest& manifest, const SceneSetup& scene,
                       const OptimizeSpec& spec, int index,
                       const JointConfig& measured, bool no_optim) {
    FrameOutcome out;
    try {
        const FrameRecord& rec = manifest.frames[index];
        const MaskImage gt_mask = load_png_mask(rec.mask);
        KinematicState state{scene.chain, measured, manifest.camera, manifest.light};

        out.record.frame_id = index;
        out.record.domain = to_string(rec.domain.kind);
        out.record.dice_initial = dice(segment(state), gt_mask);
        out.record.mae_initial_deg = joint_mae(measured, rec.gt_joints, scene.chain);

        if (no_optim) {
            out.mask = segment(state);
            out.record.dice_final = dice(out.mask, gt_mask);
            out.record.mae_final_deg = out.record.mae_initial_deg;
            out.record.iterations = 0;
        } else {
            const ImageRgb observed = load_pfm_rgb(rec.observed_pfm);
            out.result = align(state, observed, scene.background, spec);
            out.optimized = true;
            out.mask = out.result.mask;
            out.record.dice_final = dice(out.mask, gt_mask);
            out.record.mae_final_deg =
                joint_mae(out.result.best_state.joints, rec.gt_joints, scene.chain);
            out.record.iterations = out.result.iterations_run;
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

void write_align_outputs(const std::string& out_dir, const std::string& manifest_path,
                         const DatasetManifest& manifest, const SceneSetup& scene,
                         const std::vector<FrameOutcome>& outcomes, bool no_optim) {
    std::vector<EvalRecord> records;
    json frames = json::array();
    int failures = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const FrameOutcome& out = outcomes[i];
        json entry{{"frame", static_cast<int>(i)}};
        if (!out.ok) {
            ++failures;
            entry["status"] = "failed";
            entry["error"] = out.error;
            frames.push_back(entry);
            std::cerr << "frame " << i << " failed: " << out.error << "\n";
            continue;
        }
        const std::string mask_name = frame_name(static_cast<int>(i), "mask.png");
        save_png(out.mask, (fs::path(out_dir) / mask_name).string());
        entry["status"] = "ok";
        entry["mask"] = mask_name;
        if (out.optimized) {
            const std::string report_name =
                frame_name(static_cast<int>(i), "alignment.json");
            KinematicState initial{scene.chain, manifest.frames[i].measured_joints,
                                   manifest.camera, manifest.light};
            write_text((fs::path(out_dir) / report_name).string(),
                       alignment_report_json(out.result, initial, mask_name));
            entry["report"] = report_name;
        }
        entry["dice_initial"] = out.record.dice_initial;
        entry["dice_final"] = out.record.dice_final;
        entry["mae_initial_deg"] = out.record.mae_initial_deg;
        entry["mae_final_deg"] = out.record.mae_final_deg;
        entry["iterations"] = out.record.iterations;
        frames.push_back(entry);
        records.push_back(out.record);
    }

    json results{{"manifest", manifest_path},
                 {"no_optim", no_optim},
                 {"frames", frames}};
    write_text((fs::path(out_dir) / "results.json").string(), results.dump(2) + "\n");
    if (!records.empty()) {
        write_text((fs::path(out_dir) / "records.csv").string(),
                   records_to_csv(records));
        const Summary summary = aggregate(records);
        write_text((fs::path(out_dir) / "summary.json").string(), summary.to_json());
        write_text((fs::path(out_dir) / "summary.txt").string(), summary.to_table());
        std::cout << summary.to_table();
    }
    if (failures > 0) {
        std::cerr << failures << " of " << outcomes.size() << " frames failed\n";
    }
    if (failures == static_cast<int>(outcomes.size())) {
        throw Error("all frames failed");
    }
}

// --- Commands ----------------------------------------------------------------

int cmd_gen(const RunConfig& cfg, const std::string& domain_name, int frames,
            double error_deg, std::uint64_t seed, const std::string& out_dir,
            const DomainSpec& params) {
    DomainSpec domain = params;
    try {
        domain.kind = domain_from_string(domain_name);
    } catch (const UnknownDomain& e) {
        throw ConfigError(std::string("--domain: ") + e.what());
    }
    domain.seed = seed;
    domain.validate();
    if (frames <= 0) throw ConfigError("--frames must be positive");
    if (error_deg < 0) throw ConfigError("--error-deg must be non-negative");

    const DHChain chain = cfg.chain_file.empty() ? demo_chain() : load_chain(cfg.chain_file);
    fs::create_directories(out_dir);
    generate_dataset(chain, cfg.camera, cfg.light, frames, error_deg, domain, seed,
                     out_dir, &cfg.renderer);
    emit_effective_config(cfg, out_dir);
    std::cout << (fs::path(out_dir) / "manifest.json").string() << "\n";
    return 0;
}

int cmd_align(const RunConfig& cfg, const std::string& manifest_path,
              const std::string& out_dir, bool no_optim) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    const SceneSetup scene = load_scene(manifest);
    fs::create_directories(out_dir);

    OptimizeSpec spec = cfg.optimizer;
    spec.render = manifest.renderer;
    spec.checkpoints.clear();

    RunConfig effective = cfg;
    effective.chain_file = manifest.chain_file;
    effective.camera = manifest.camera;
    effective.light = manifest.light;
    effective.renderer = manifest.renderer;
    emit_effective_config(effective, out_dir);

    const int n = static_cast<int>(manifest.frames.size());
    std::vector<FrameOutcome> outcomes(n);
    parallel_for_index(n, [&](int i) {
        outcomes[i] = run_frame(manifest, scene, spec, i,
                                manifest.frames[i].measured_joints, no_optim);
    });
    write_align_outputs(out_dir, manifest_path, manifest, scene, outcomes, no_optim);
    return 0;
}

int cmd_ablate_iters(const RunConfig& cfg, const std::string& manifest_path,
                     const std::string& out_dir) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    const SceneSetup scene = load_scene(manifest);
    fs::create_directories(out_dir);

    const std::vector<int> checkpoints{1, 10, 20, 30, 50, 100};
    OptimizeSpec spec = cfg.optimizer;
    spec.render = manifest.renderer;
    spec.checkpoints = checkpoints;
    spec.max_iters = checkpoints.back();

    RunConfig effective = cfg;
    effective.chain_file = manifest.chain_file;
    effective.camera = manifest.camera;
    effective.light = manifest.light;
    effective.renderer = manifest.renderer;
    emit_effective_config(effective, out_dir);

    const int n = static_cast<int>(manifest.frames.size());
    std::vector<FrameOutcome> outcomes(n);
    std::vector<std::vector<double>> checkpoint_dice(n);
    parallel_for_index(n, [&](int i) {
        outcomes[i] = run_frame(manifest, scene, spec, i,
                                manifest.frames[i].measured_joints, false);
        if (!outcomes[i].ok) return;
        const MaskImage gt_mask = load_png_mask(manifest.frames[i].mask);
        std::vector<double>& row = checkpoint_dice[i];
        for (int c : checkpoints) {
            const auto& states = outcomes[i].result.checkpoint_states;
            auto it = std::find_if(states.begin(), states.end(),
                                   [c](const auto& p) { return p.first == c; });
            if (it == states.end()) {
                row.push_back(-1.0);
                continue;
            }
            row.push_back(
                dice(soft_mask(it->second, manifest.renderer, spec.attention_threshold),
                     gt_mask));
        }
    });

    std::vector<double> mean_dice(checkpoints.size(), 0.0);
    std::vector<double> init_dice, final_dice, final_mae;
    int ok_frames = 0;
    for (int i = 0; i < n; ++i) {
        if (!outcomes[i].ok) {
            std::cerr << "frame " << i << " failed: " << outcomes[i].error << "\n";
            continue;
        }
        ++ok_frames;
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            mean_dice[c] += checkpoint_dice[i][c];
        }
        init_dice.push_back(outcomes[i].record.dice_initial);
        final_dice.push_back(outcomes[i].record.dice_final);
        final_mae.push_back(outcomes[i].record.mae_final_deg);
    }
    if (ok_frames == 0) throw Error("all frames failed");
    for (double& v : mean_dice) v /= ok_frames;

    json report{{"sweep", "iters"},
                {"checkpoints", checkpoints},
                {"frames", ok_frames},
                {"mean_dice", mean_dice},
                {"per_frame_dice", json::array()}};
    for (int i = 0; i < n; ++i) {
        if (outcomes[i].ok) report["per_frame_dice"].push_back(checkpoint_dice[i]);
    }
    write_text((fs::path(out_dir) / "ablate_iters.json").string(),
               report.dump(2) + "\n");

    std::ostringstream table;
    table << "iterations ";
    for (int c : checkpoints) {
        char cell[16];
        std::snprintf(cell, sizeof(cell), "%8d", c);
        table << cell;
    }
    table << "\nmean dice  ";
    for (double v : mean_dice) {
        char cell[16];
        std::snprintf(cell, sizeof(cell), "%8.4f", v);
        table << cell;
    }
    table << "\n";
    write_text((fs::path(out_dir) / "ablate_iters.txt").string(), table.str());
    std::cout << table.str();

    double mae_hi = 1.0;
    for (double v : final_mae) mae_hi = std::max(mae_hi, v);
    emit_scatter(out_dir, "scatter_dice", "initial dice", "optimized dice",
                 init_dice, final_dice, 0.0, 1.0, 0.0, 1.0, true);
    emit_scatter(out_dir, "scatter_mae", "initial dice", "optimized mae (deg)",
                 init_dice, final_mae, 0.0, 1.0, 0.0, mae_hi * 1.05, false);
    return 0;
}

int cmd_ablate_error(const RunConfig& cfg, const std::string& manifest_path,
                     const std::string& out_dir) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    const SceneSetup scene = load_scene(manifest);
    fs::create_directories(out_dir);

    OptimizeSpec spec = cfg.optimizer;
    spec.render = manifest.renderer;
    spec.checkpoints.clear();

    RunConfig effective = cfg;
    effective.chain_file = manifest.chain_file;
    effective.camera = manifest.camera;
    effective.light = manifest.light;
    effective.renderer = manifest.renderer;
    emit_effective_config(effective, out_dir);

    const std::vector<double> magnitudes{0.0, 1.0, 2.0, 3.0};
    const int n = static_cast<int>(manifest.frames.size());
    std::vector<double> mean_dice, mean_mae, mean_init_dice, mean_init_mae;
    std::vector<double> all_init_dice, all_final_dice, all_final_mae;
    json per_magnitude = json::array();

    for (std::size_t m = 0; m < magnitudes.size(); ++m) {
        std::vector<FrameOutcome> outcomes(n);
        parallel_for_index(n, [&](int i) {
            const JointConfig measured = perturb_joints(
                manifest.frames[i].gt_joints, scene.chain, magnitudes[m],
                mix_seed(mix_seed(manifest.seed, 0xAB1A7E00u + m), i));
            outcomes[i] = run_frame(manifest, scene, spec, i, measured, false);
        });
        double d = 0, e = 0, di = 0, ei = 0;
        int ok = 0;
        json frames = json::array();
        for (int i = 0; i < n; ++i) {
            if (!outcomes[i].ok) {
                std::cerr << "magnitude " << magnitudes[m] << " frame " << i
                          << " failed: " << outcomes[i].error << "\n";
                continue;
            }
            const EvalRecord& r = outcomes[i].record;
            ++ok;
            d += r.dice_final;
            e += r.mae_final_deg;
            di += r.dice_initial;
            ei += r.mae_initial_deg;
            all_init_dice.push_back(r.dice_initial);
            all_final_dice.push_back(r.dice_final);
            all_final_mae.push_back(r.mae_final_deg);
            frames.push_back(json{{"frame", i},
                                  {"dice_initial", r.dice_initial},
                                  {"dice_final", r.dice_final},
                                  {"mae_initial_deg", r.mae_initial_deg},
                                  {"mae_final_deg", r.mae_final_deg},
                                  {"iterations", r.iterations}});
        }
        if (ok == 0) throw Error("all frames failed");
        mean_dice.push_back(d / ok);
        mean_mae.push_back(e / ok);
        mean_init_dice.push_back(di / ok);
        mean_init_mae.push_back(ei / ok);
        per_magnitude.push_back(json{{"magnitude_deg", magnitudes[m]},
                                     {"frames", frames}});
    }

    json report{{"sweep", "error"},
                {"magnitudes_deg", magnitudes},
                {"mean_initial_dice", mean_init_dice},
                {"mean_dice", mean_dice},
                {"mean_initial_mae_deg", mean_init_mae},
                {"mean_mae_deg", mean_mae},
                {"per_magnitude", per_magnitude}};
    write_text((fs::path(out_dir) / "ablate_error.json").string(),
               report.dump(2) + "\n");

    std::ostringstream table;
    table << "error (deg)   mean dice   mean mae (deg)\n";
    for (std::size_t m = 0; m < magnitudes.size(); ++m) {
        char line[96];
        std::snprintf(line, sizeof(line), "%11.0f   %9.4f   %14.4f\n",
                      magnitudes[m], mean_dice[m], mean_mae[m]);
        table << line;
    }
    write_text((fs::path(out_dir) / "ablate_error.txt").string(), table.str());
    std::cout << table.str();

    double mae_hi = 1.0;
    for (double v : all_final_mae) mae_hi = std::max(mae_hi, v);
    emit_scatter(out_dir, "scatter_dice", "initial dice", "optimized dice",
                 all_init_dice, all_final_dice, 0.0, 1.0, 0.0, 1.0, true);
    emit_scatter(out_dir, "scatter_mae", "initial dice", "optimized mae (deg)",
                 all_init_dice, all_final_mae, 0.0, 1.0, 0.0, mae_hi * 1.05, false);
    return 0;
}

int cmd_eval(const std::vector<std::string>& record_paths, const std::string& out_dir) {
    std::vector<EvalRecord> records;
    for (const std::string& path : record_paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open records csv: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::vector<EvalRecord> part = records_from_csv(buf.str());
        records.insert(records.end(), part.begin(), part.end());
    }
    const Summary summary = aggregate(records);
    std::cout << summary.to_table();
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text((fs::path(out_dir) / "summary.json").string(), summary.to_json());
        write_text((fs::path(out_dir) / "summary.txt").string(), summary.to_table());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kinalign: corrects erroneous robot kinematics by rendering an "
                 "articulated tool model and descending a feature-space loss"};
    app.require_subcommand(1);

    std::string config_path, out_dir, manifest_path, domain_name = "regular";
    std::string sweep;
    int frames = 10;
    double error_deg = 1.0;
    std::uint64_t seed = 7;
    bool no_optim = false;
    DomainSpec domain_params;
    std::vector<std::string> record_paths;

    CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    gen->add_option("--config", config_path, "Run configuration JSON");
    gen->add_option("--domain", domain_name,
                    "regular|low_brightness|smoke|blood|background_change");
    gen->add_option("--frames", frames, "Number of frames");
    gen->add_option("--error-deg", error_deg, "Kinematics perturbation magnitude");
    gen->add_option("--seed", seed, "Dataset seed");
    gen->add_option("--out", out_dir, "Output directory")->required();
    gen->add_option("--brightness-scale", domain_params.brightness_scale,
                    "low_brightness multiplier");
    gen->add_option("--smoke-opacity", domain_params.smoke_opacity, "smoke opacity");
    gen->add_option("--blob-count", domain_params.blob_count, "blood blob count");
    gen->add_option("--blob-radius", domain_params.blob_radius_px,
                    "blood blob radius, px");
    gen->add_option("--background-id", domain_params.background_id,
                    "background_change texture id");

    CLI::App* align_cmd =
        app.add_subcommand("align", "Correct kinematics against observed frames");
    align_cmd->add_option("--config", config_path, "Run configuration JSON");
    align_cmd->add_option("--manifest", manifest_path, "Dataset manifest")->required();
    align_cmd->add_option("--out", out_dir, "Output directory")->required();
    align_cmd->add_flag("--no-optim", no_optim,
                        "Segment from the measured kinematics without optimizing");

    CLI::App* ablate = app.add_subcommand("ablate", "Iteration or error-magnitude sweep");
    ablate->add_option("--config", config_path, "Run configuration JSON");
    ablate->add_option("--manifest", manifest_path, "Dataset manifest")->required();
    ablate->add_option("--sweep", sweep, "iters|error")->required();
    ablate->add_option("--out", out_dir, "Output directory")->required();

    CLI::App* eval_cmd = app.add_subcommand("eval", "Aggregate per-frame records");
    eval_cmd->add_option("--records", record_paths, "records.csv paths")->required();
    eval_cmd->add_option("--out", out_dir, "Output directory (optional)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(gen)) {
            const RunConfig cfg = load_run_config(config_path);
            const int code = cmd_gen(cfg, domain_name, frames, error_deg, seed,
                                     out_dir, domain_params);
            write_run_log(out_dir, argc, argv);
            return code;
        }
        if (app.got_subcommand(align_cmd)) {
            const RunConfig cfg = load_run_config(config_path);
            const int code = cmd_align(cfg, manifest_path, out_dir, no_optim);
            write_run_log(out_dir, argc, argv);
            return code;
        }
        if (app.got_subcommand(ablate)) {
            const RunConfig cfg = load_run_config(config_path);
            int code = 0;
            if (sweep == "iters") {
                code = cmd_ablate_iters(cfg, manifest_path, out_dir);
            } else if (sweep == "error") {
                code = cmd_ablate_error(cfg, manifest_path, out_dir);
            } else {
                throw ConfigError("--sweep must be 'iters' or 'error'");
            }
            write_run_log(out_dir, argc, argv);
            return code;
        }
        if (app.got_subcommand(eval_cmd)) {
            const int code = cmd_eval(record_paths, out_dir);
            if (!out_dir.empty()) write_run_log(out_dir, argc, argv);
            return code;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const UnknownDomain& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const UnknownExtractor& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const EmptyList& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
