#include "kinalign/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "kinalign/errors.hpp"
#include "kinalign/serialize.hpp"

namespace fs = std::filesystem;

namespace kinalign {

namespace {

double next_uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    return lo + u * (hi - lo);
}

double cell_value(std::uint64_t seed, int gx, int gy) {
    const std::uint64_t cell =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(gx)) << 32) |
        static_cast<std::uint32_t>(gy);
    return static_cast<double>(mix_seed(seed, cell) >> 11) * 0x1p-53;
}

/// Bilinear lattice (value) noise in [0, 1].
double value_noise(std::uint64_t seed, double x, double y, double cell_px) {
    const double fx = x / cell_px;
    const double fy = y / cell_px;
    const int gx = static_cast<int>(std::floor(fx));
    const int gy = static_cast<int>(std::floor(fy));
    const double tx = fx - gx;
    const double ty = fy - gy;
    const double v00 = cell_value(seed, gx, gy);
    const double v10 = cell_value(seed, gx + 1, gy);
    const double v01 = cell_value(seed, gx, gy + 1);
    const double v11 = cell_value(seed, gx + 1, gy + 1);
    const double top = v00 + tx * (v10 - v00);
    const double bottom = v01 + tx * (v11 - v01);
    return top + ty * (bottom - top);
}

/// Multi-octave value noise in [0, 1]; each octave halves cell size and weight.
double fractal_noise(std::uint64_t seed, double x, double y, double base_cell,
                     int octaves) {
    double total = 0.0;
    double weight_sum = 0.0;
    double weight = 1.0;
    double cell = base_cell;
    for (int o = 0; o < octaves; ++o) {
        total += weight * value_noise(mix_seed(seed, 0xBEEF + o), x, y, cell);
        weight_sum += weight;
        weight *= 0.5;
        cell = std::max(2.0, cell * 0.5);
    }
    return total / weight_sum;
}

std::uint64_t hash_string(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

TriangleMesh make_box(const Vec3& center, const Vec3& half) {
    TriangleMesh m;
    for (int i = 0; i < 8; ++i) {
        m.vertices.push_back(center + Vec3(i & 1 ? half.x() : -half.x(),
                                           i & 2 ? half.y() : -half.y(),
                                           i & 4 ? half.z() : -half.z()));
    }
    const int quads[6][4] = {{0, 1, 3, 2}, {4, 6, 7, 5}, {0, 4, 5, 1},
                             {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 5, 7, 3}};
    for (const auto& f : quads) {
        m.faces.push_back({static_cast<std::uint32_t>(f[0]),
                           static_cast<std::uint32_t>(f[2]),
                           static_cast<std::uint32_t>(f[1])});
        m.faces.push_back({static_cast<std::uint32_t>(f[0]),
                           static_cast<std::uint32_t>(f[3]),
                           static_cast<std::uint32_t>(f[2])});
    }
    return m;
}

std::string frame_stem(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%04d", index);
    return buf;
}

nlohmann::json joints_to_json(const JointConfig& q) {
    nlohmann::json out = nlohmann::json::array();
    for (double v : q.values) out.push_back(v);
    return out;
}

JointConfig joints_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ParseError("joint array expected");
    JointConfig q;
    for (const auto& v : j) q.values.push_back(v.get<double>());
    return q;
}

nlohmann::json domain_to_json(const DomainSpec& d) {
    return {{"kind", to_string(d.kind)},
            {"brightness_scale", d.brightness_scale},
            {"smoke_opacity", d.smoke_opacity},
            {"noise_octaves", d.noise_octaves},
            {"blob_count", d.blob_count},
            {"blob_radius_px", d.blob_radius_px},
            {"background_id", d.background_id},
            {"seed", d.seed}};
}

DomainSpec domain_from_json(const nlohmann::json& j) {
    DomainSpec d;
    d.kind = domain_from_string(j.at("kind").get<std::string>());
    d.brightness_scale = j.value("brightness_scale", d.brightness_scale);
    d.smoke_opacity = j.value("smoke_opacity", d.smoke_opacity);
    d.noise_octaves = j.value("noise_octaves", d.noise_octaves);
    d.blob_count = j.value("blob_count", d.blob_count);
    d.blob_radius_px = j.value("blob_radius_px", d.blob_radius_px);
    d.background_id = j.value("background_id", d.background_id);
    d.seed = j.value("seed", d.seed);
    d.validate();
    return d;
}

}  // namespace

DomainKind domain_from_string(const std::string& name) {
    if (name == "regular") return DomainKind::Regular;
    if (name == "low_brightness") return DomainKind::LowBrightness;
    if (name == "smoke") return DomainKind::Smoke;
    if (name == "blood") return DomainKind::Blood;
    if (name == "background_change") return DomainKind::BackgroundChange;
    throw UnknownDomain("unknown domain kind: " + name);
}

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::Regular: return "regular";
        case DomainKind::LowBrightness: return "low_brightness";
        case DomainKind::Smoke: return "smoke";
        case DomainKind::Blood: return "blood";
        case DomainKind::BackgroundChange: return "background_change";
    }
    throw UnknownDomain("invalid domain kind value");
}

void DomainSpec::validate() const {
    switch (kind) {
        case DomainKind::Regular:
            break;
        case DomainKind::LowBrightness:
            if (!(brightness_scale > 0.0) || brightness_scale > 1.0) {
                throw ConfigError("brightness_scale must lie in (0, 1]");
            }
            break;
        case DomainKind::Smoke:
            if (smoke_opacity < 0.0 || smoke_opacity > 1.0) {
                throw ConfigError("smoke_opacity must lie in [0, 1]");
            }
            if (noise_octaves < 1) {
                throw ConfigError("noise_octaves must be >= 1");
            }
            break;
        case DomainKind::Blood:
            if (blob_count < 0) throw ConfigError("blob_count must be >= 0");
            if (blob_radius_px < 1) {
                throw ConfigError("blob_radius_px must be >= 1");
            }
            break;
        case DomainKind::BackgroundChange:
            if (background_id.empty()) {
                throw ConfigError("background_id must not be empty");
            }
            break;
    }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<JointConfig> generate_trajectory(const DHChain& chain, int n_frames,
                                             std::uint64_t seed) {
    if (n_frames < 1) throw ConfigError("n_frames must be >= 1");
    chain.validate();
    const std::size_t dof = chain.dof();
    struct Wave {
        double center, amplitude, cycles, phase;
    };
    std::vector<Wave> waves(dof);
    for (std::size_t j = 0; j < dof; ++j) {
        std::mt19937_64 rng(mix_seed(seed, j));
        const auto [lo, hi] = chain.joint_limits[j];
        const double half_span = (hi - lo) / 2.0;
        waves[j].center = (lo + hi) / 2.0;
        waves[j].amplitude = half_span * next_uniform(rng, 0.25, 0.8);
        waves[j].cycles = next_uniform(rng, 0.5, 2.5);
        waves[j].phase = next_uniform(rng, 0.0, 2.0 * kPi);
    }
    std::vector<JointConfig> out(n_frames);
    for (int t = 0; t < n_frames; ++t) {
        JointConfig q;
        q.values.resize(dof);
        for (std::size_t j = 0; j < dof; ++j) {
            const Wave& w = waves[j];
            q.values[j] = w.center +
                          w.amplitude * std::sin(2.0 * kPi * w.cycles * t / n_frames +
                                                 w.phase);
        }
        out[t] = std::move(q);
    }
    return out;
}

JointConfig perturb_joints(const JointConfig& q, const DHChain& chain,
                           double magnitude_deg, std::uint64_t seed) {
    if (magnitude_deg < 0.0) throw ConfigError("magnitude must be >= 0");
    if (q.size() != chain.dof()) {
        throw LengthMismatch("joint config does not match the chain");
    }
    std::mt19937_64 rng(mix_seed(seed, 0x50455254ULL));
    JointConfig out = q;
    for (std::size_t j = 0; j < q.size(); ++j) {
        const double eps = next_uniform(rng, -magnitude_deg, magnitude_deg);
        if (chain.rows[j].kind == JointKind::Revolute) {
            out[j] += deg_to_rad(eps);
        } else {
            out[j] += eps / 100.0;
        }
    }
    return out;
}

ImageRgb make_background(const std::string& id, int width, int height) {
    if (id.size() > 4 && id.substr(id.size() - 4) == ".png" && fs::exists(id)) {
        const ImageRgb src = load_png_rgb(id);
        if (src.width == width && src.height == height) return src;
        ImageRgb out(width, height);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const int sx = std::min(src.width - 1, x * src.width / width);
                const int sy = std::min(src.height - 1, y * src.height / height);
                for (int c = 0; c < 3; ++c) {
                    out.at(x, y, c) = src.at(sx, sy, c);
                }
            }
        }
        return out;
    }
    // Dark backdrop with strong fine grain. The shaded tool reads bright and
    // smooth against it, so channel-wise similarity cleanly separates the two;
    // a low-contrast background would leave nearly parallel feature vectors
    // everywhere and starve the alignment of gradient.
    const std::uint64_t seed = hash_string(id);
    std::mt19937_64 rng(seed);
    const double floor_r = next_uniform(rng, 0.03, 0.08);
    const double floor_g = next_uniform(rng, 0.03, 0.08);
    const double floor_b = next_uniform(rng, 0.03, 0.08);
    const double gain = next_uniform(rng, 0.45, 0.60);
    const double hue = next_uniform(rng, 0.15, 0.30);
    ImageRgb out(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double grain = fractal_noise(seed, x, y, 7.0, 3);
            const double tint = fractal_noise(mix_seed(seed, 13), x, y, 20.0, 2);
            out.at(x, y, 0) = clamp01(floor_r + gain * grain + hue * (tint - 0.5));
            out.at(x, y, 1) = clamp01(floor_g + gain * grain);
            out.at(x, y, 2) = clamp01(floor_b + gain * grain - hue * (tint - 0.5));
        }
    }
    return out;
}

ImageRgb corrupt(const ImageRgb& image, const MaskImage& gt_mask,
                 const DomainSpec& domain) {
    domain.validate();
    if (image.width != gt_mask.width || image.height != gt_mask.height) {
        throw DimensionMismatch("image and mask sizes differ");
    }
    switch (domain.kind) {
        case DomainKind::Regular:
            return image;
        case DomainKind::LowBrightness: {
            ImageRgb out = image;
            for (double& v : out.data) v = clamp01(v * domain.brightness_scale);
            return out;
        }
        case DomainKind::Smoke: {
            ImageRgb out = image;
            const double gray = 0.85;
            for (int y = 0; y < out.height; ++y) {
                for (int x = 0; x < out.width; ++x) {
                    const double alpha =
                        domain.smoke_opacity *
                        fractal_noise(domain.seed, x, y, 32.0, domain.noise_octaves);
                    for (int c = 0; c < 3; ++c) {
                        out.at(x, y, c) = clamp01((1.0 - alpha) * out.at(x, y, c) +
                                                  alpha * gray);
                    }
                }
            }
            return out;
        }
        case DomainKind::Blood: {
            ImageRgb out = image;
            std::mt19937_64 rng(mix_seed(domain.seed, 0xB10BULL));
            for (int b = 0; b < domain.blob_count; ++b) {
                const double cx = next_uniform(rng, 0.0, out.width);
                const double cy = next_uniform(rng, 0.0, out.height);
                const double radius =
                    domain.blob_radius_px * next_uniform(rng, 0.7, 1.3);
                const double red = next_uniform(rng, 0.38, 0.52);
                const double alpha = next_uniform(rng, 0.75, 0.9);
                const int x0 = std::max(0, static_cast<int>(cx - radius) - 1);
                const int x1 = std::min(out.width - 1,
                                        static_cast<int>(cx + radius) + 1);
                const int y0 = std::max(0, static_cast<int>(cy - radius) - 1);
                const int y1 = std::min(out.height - 1,
                                        static_cast<int>(cy + radius) + 1);
                for (int y = y0; y <= y1; ++y) {
                    for (int x = x0; x <= x1; ++x) {
                        if (gt_mask.at(x, y)) continue;
                        const double dx = x + 0.5 - cx;
                        const double dy = y + 0.5 - cy;
                        if (dx * dx + dy * dy > radius * radius) continue;
                        out.at(x, y, 0) =
                            clamp01((1 - alpha) * out.at(x, y, 0) + alpha * red);
                        out.at(x, y, 1) =
                            clamp01((1 - alpha) * out.at(x, y, 1) + alpha * 0.025);
                        out.at(x, y, 2) =
                            clamp01((1 - alpha) * out.at(x, y, 2) + alpha * 0.035);
                    }
                }
            }
            return out;
        }
        case DomainKind::BackgroundChange: {
            ImageRgb out = image;
            const ImageRgb alt =
                make_background(domain.background_id, image.width, image.height);
            for (int y = 0; y < out.height; ++y) {
                for (int x = 0; x < out.width; ++x) {
                    if (gt_mask.at(x, y)) continue;
                    for (int c = 0; c < 3; ++c) out.at(x, y, c) = alt.at(x, y, c);
                }
            }
            return out;
        }
    }
    throw UnknownDomain("invalid domain kind value");
}

DatasetManifest generate_dataset(const DHChain& chain, const PinholeCamera& cam,
                                 const PointLight& light, int n_frames,
                                 double error_deg, const DomainSpec& domain,
                                 std::uint64_t seed, const std::string& out_dir,
                                 const SoftRenderConfig* render_cfg) {
    if (error_deg < 0.0) throw ConfigError("error_deg must be >= 0");
    domain.validate();
    chain.validate();
    SoftRenderConfig cfg =
        render_cfg ? *render_cfg : SoftRenderConfig::defaults_for(cam);
    cfg.validate();

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);

    const std::vector<JointConfig> trajectory =
        generate_trajectory(chain, n_frames, seed);
    const ImageRgb scene_bg = make_background("default", cam.width, cam.height);
    const MaskImage no_tool(cam.width, cam.height);

    DatasetManifest manifest;
    manifest.camera = cam;
    manifest.light = light;
    manifest.renderer = cfg;
    manifest.error_deg = error_deg;
    manifest.seed = seed;
    manifest.chain_file = "chain.json";
    manifest.mean_background = "mean_background.pfm";
    save_chain(chain, (fs::path(out_dir) / "chain.json").string());

    std::vector<ImageRgb> background_frames;
    background_frames.reserve(n_frames);
    nlohmann::json kinematics = nlohmann::json::array();

    for (int t = 0; t < n_frames; ++t) {
        const JointConfig& gt = trajectory[t];
        const JointConfig measured =
            perturb_joints(gt, chain, error_deg, mix_seed(seed, 0x464D00ULL + t));
        const TriangleMesh posed = pose_meshes(chain, gt);
        const MaskImage mask = hard_rasterize(posed, cam);
        const SoftRenderOutput render = soft_shade(posed, cam, light, cfg);

        DomainSpec frame_domain = domain;
        if (domain.kind == DomainKind::Smoke) {
            frame_domain.seed = mix_seed(domain.seed, t);
        }
        const ImageRgb observed =
            corrupt(compose_hybrid(render, {scene_bg}).image, mask, frame_domain);
        background_frames.push_back(corrupt(scene_bg, no_tool, frame_domain));

        const std::string stem = frame_stem(t);
        FrameRecord record;
        record.observed = stem + ".png";
        record.observed_pfm = stem + ".pfm";
        record.mask = stem + "_mask.png";
        record.gt_joints = gt;
        record.measured_joints = measured;
        record.domain = frame_domain;
        save_png(observed, (fs::path(out_dir) / record.observed).string());
        save_pfm(observed, (fs::path(out_dir) / record.observed_pfm).string());
        save_png(mask, (fs::path(out_dir) / record.mask).string());
        manifest.frames.push_back(std::move(record));

        kinematics.push_back({{"gt_joints", joints_to_json(gt)},
                              {"measured_joints", joints_to_json(measured)}});
    }

    const MeanBackground mean = mean_background(background_frames);
    save_pfm(mean.image, (fs::path(out_dir) / manifest.mean_background).string());

    nlohmann::json kin_file = {{"angles", "radians"}, {"frames", kinematics}};
    std::ofstream kin_out(fs::path(out_dir) / "kinematics.json");
    if (!kin_out) throw IoError("cannot write kinematics.json");
    kin_out << kin_file.dump(2) << "\n";
    kin_out.close();

    const std::string manifest_path =
        (fs::path(out_dir) / "manifest.json").string();
    save_manifest(manifest, manifest_path);
    return load_manifest(manifest_path);
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    nlohmann::json j;
    j["chain_file"] = manifest.chain_file;
    j["camera"] = camera_to_json(manifest.camera);
    j["light"] = light_to_json(manifest.light);
    j["renderer"] = render_config_to_json(manifest.renderer);
    j["error_deg"] = manifest.error_deg;
    j["seed"] = manifest.seed;
    j["mean_background"] = manifest.mean_background;
    j["perturbation_model"] = manifest.perturbation_model;
    j["angles"] = "radians";
    nlohmann::json frames = nlohmann::json::array();
    for (const FrameRecord& f : manifest.frames) {
        frames.push_back({{"observed", f.observed},
                          {"observed_pfm", f.observed_pfm},
                          {"mask", f.mask},
                          {"gt_joints", joints_to_json(f.gt_joints)},
                          {"measured_joints", joints_to_json(f.measured_joints)},
                          {"domain", domain_to_json(f.domain)}});
    }
    j["frames"] = frames;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest JSON: ") + e.what());
    }
    const fs::path dir = fs::path(path).parent_path();
    auto resolve = [&](const std::string& rel) {
        return (dir / rel).lexically_normal().string();
    };
    try {
        DatasetManifest m;
        m.chain_file = resolve(j.at("chain_file").get<std::string>());
        m.camera = camera_from_json(j.at("camera"));
        m.light = light_from_json(j.at("light"));
        m.renderer = render_config_from_json(j.at("renderer"));
        m.error_deg = j.at("error_deg").get<double>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.mean_background = resolve(j.at("mean_background").get<std::string>());
        m.perturbation_model = j.value("perturbation_model", std::string("uniform"));
        for (const auto& f : j.at("frames")) {
            FrameRecord record;
            record.observed = resolve(f.at("observed").get<std::string>());
            record.observed_pfm = resolve(f.at("observed_pfm").get<std::string>());
            record.mask = resolve(f.at("mask").get<std::string>());
            record.gt_joints = joints_from_json(f.at("gt_joints"));
            record.measured_joints = joints_from_json(f.at("measured_joints"));
            record.domain = domain_from_json(f.at("domain"));
            m.frames.push_back(std::move(record));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest JSON: ") + e.what());
    }
}

PinholeCamera demo_camera() {
    return PinholeCamera(280.0, 280.0, 160.0, 120.0, 320, 240);
}

PointLight demo_light() { return PointLight(Vec3(0.2, -0.3, -0.5), 1.0); }

DHChain demo_chain() {
    DHChain chain;
    auto add_row = [&chain](JointKind kind, double a, double alpha_deg, double d,
                            double theta_deg, double lo, double hi) {
        DHRow row;
        row.kind = kind;
        row.a = a;
        row.alpha = deg_to_rad(alpha_deg);
        row.d_offset = d;
        row.theta_offset = deg_to_rad(theta_deg);
        chain.rows.push_back(row);
        if (kind == JointKind::Revolute) {
            chain.joint_limits.emplace_back(deg_to_rad(lo), deg_to_rad(hi));
        } else {
            chain.joint_limits.emplace_back(lo, hi);  // meters
        }
    };
    // Shoulder yaw and pitch, prismatic insertion, three-revolute wrist.
    // The mount keeps every joint's sweep roughly parallel to the image
    // plane: motions then translate the silhouette instead of rescaling it,
    // which is what the feature-similarity descent can follow.
    add_row(JointKind::Revolute, 0.018, -90.0, 0.030, 0.0, -32.0, 32.0);
    add_row(JointKind::Revolute, 0.135, -90.0, 0.000, -8.0, -40.0, 24.0);
    add_row(JointKind::Prismatic, 0.000, 90.0, 0.050, 0.0, -0.018, 0.038);
    add_row(JointKind::Revolute, 0.030, -90.0, 0.000, 35.0, -30.0, 30.0);
    add_row(JointKind::Revolute, 0.022, 90.0, 0.000, -25.0, -30.0, 30.0);
    add_row(JointKind::Revolute, 0.000, 0.0, 0.030, 0.0, -50.0, 50.0);
    chain.base = RigidTransform::from_axis_angle(
                     Vec3(0.0, deg_to_rad(8.0), 0.0), Vec3(-0.155, 0.035, 0.40)) *
                 RigidTransform::from_axis_angle(
                     Vec3(deg_to_rad(-84.0), 0.0, 0.0), Vec3(0.0, 0.0, 0.0));

    chain.link_meshes.emplace_back(
        0, make_box(Vec3(0.0, 0.0, -0.010), Vec3(0.017, 0.017, 0.028)));
    chain.link_meshes.emplace_back(
        1, make_box(Vec3(-0.0675, 0.0, 0.0), Vec3(0.0675, 0.016, 0.016)));
    chain.link_meshes.emplace_back(
        2, make_box(Vec3(0.0, 0.0, -0.062), Vec3(0.0115, 0.0115, 0.072)));
    chain.link_meshes.emplace_back(
        3, make_box(Vec3(-0.021, 0.0, 0.0), Vec3(0.021, 0.011, 0.011)));
    chain.link_meshes.emplace_back(
        4, make_box(Vec3(-0.016, 0.0, 0.0), Vec3(0.016, 0.010, 0.010)));
    // Two unequal blades spread from the roll axis so rolling the tool
    // sweeps a visibly asymmetric silhouette; the forward prong sits off
    // that axis at a different phase angle than the blades, so roll drags
    // it along a circle no wrist pitch or yaw can reproduce.
    TriangleMesh tip = make_box(Vec3(0.0, 0.0, -0.008), Vec3(0.0095, 0.0095, 0.014));
    tip.append(make_box(Vec3(0.0, 0.0, 0.002), Vec3(0.036, 0.008, 0.0055)));
    tip.append(make_box(Vec3(0.029, 0.019, 0.004), Vec3(0.0075, 0.019, 0.005)));
    tip.append(make_box(Vec3(-0.027, -0.014, -0.010), Vec3(0.0085, 0.015, 0.0065)));
    tip.append(make_box(Vec3(0.009, 0.007, 0.022), Vec3(0.0042, 0.0042, 0.020)));
    tip.append(make_box(Vec3(-0.010, 0.012, 0.030), Vec3(0.0040, 0.0040, 0.011)));
    chain.link_meshes.emplace_back(5, std::move(tip));
    chain.validate();
    return chain;
}

}  // namespace kinalign
