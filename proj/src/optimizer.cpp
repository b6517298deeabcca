#include "kinalign/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "kinalign/errors.hpp"

namespace kinalign {

namespace {

SoftRenderConfig effective_render(const KinematicState& state,
                                  const OptimizeSpec& spec) {
    SoftRenderConfig cfg =
        spec.render ? *spec.render : SoftRenderConfig::defaults_for(state.camera);
    cfg.validate();
    return cfg;
}

struct FeatureLoss {
    double value = 0.0;
    FeatureMap grad;
};

void copy_plane(const FeatureMap& map, int c, ImageGray* out) {
    const std::size_t plane = static_cast<std::size_t>(map.width) * map.height;
    std::copy_n(map.data.begin() + static_cast<std::size_t>(c) * plane, plane,
                out->data.begin());
}

FeatureLoss feature_loss(const FeatureMap& f_obs, const FeatureMap& f_ren,
                         const ImageGray& silhouette, const OptimizeSpec& spec) {
    if (spec.loss == LossKind::Acs) {
        const AttentionMap att = dilate_silhouette(
            silhouette, spec.attention_threshold, spec.dilation_radius);
        AcsLoss loss = acs_loss(f_obs, f_ren, att);
        return {loss.value, std::move(loss.grad)};
    }
    if (!f_obs.same_shape(f_ren)) {
        throw DimensionMismatch("feature map shapes differ");
    }
    const int channels = f_ren.channels;
    const std::size_t plane = static_cast<std::size_t>(f_ren.width) * f_ren.height;
    FeatureLoss out;
    out.grad = FeatureMap(channels, f_ren.width, f_ren.height);
    ImageGray pred(f_ren.width, f_ren.height);
    ImageGray target(f_ren.width, f_ren.height);
    for (int c = 0; c < channels; ++c) {
        copy_plane(f_ren, c, &pred);
        copy_plane(f_obs, c, &target);
        const SmoothL1Loss loss = smooth_l1_loss(pred, target, spec.smooth_l1_beta);
        out.value += loss.value / channels;
        const std::size_t base = static_cast<std::size_t>(c) * plane;
        for (std::size_t i = 0; i < plane; ++i) {
            out.grad.data[base + i] = loss.grad.data[i] / channels;
        }
    }
    return out;
}

std::vector<double> pull_to_target(const KinematicState& state,
                                   const TriangleMesh& posed,
                                   const std::vector<Vec3>& cotangents,
                                   OptimizeTarget target) {
    if (target == OptimizeTarget::Joints) {
        return vertex_jacobian_vjp(state.chain, state.joints, cotangents);
    }
    Vec3 rot_grad = Vec3::Zero();
    Vec3 trans_grad = Vec3::Zero();
    if (target == OptimizeTarget::BaseFrame) {
        const Vec3 pivot = state.chain.base.translation();
        for (std::size_t i = 0; i < posed.vertices.size(); ++i) {
            rot_grad += (posed.vertices[i] - pivot).cross(cotangents[i]);
            trans_grad += cotangents[i];
        }
    } else {
        // The renderer reports world-space cotangents c_w = R^T c_cam, so the
        // camera-frame cotangent is R c_w; the lever arm about the rotation
        // increment is the rotated point R v = x_cam - t.
        const Mat3& rot = state.camera.extrinsics.rotation();
        for (std::size_t i = 0; i < posed.vertices.size(); ++i) {
            const Vec3 cam_cot = rot * cotangents[i];
            rot_grad += (rot * posed.vertices[i]).cross(cam_cot);
            trans_grad += cam_cot;
        }
    }
    return {rot_grad.x(), rot_grad.y(), rot_grad.z(),
            trans_grad.x(), trans_grad.y(), trans_grad.z()};
}

bool all_finite(const EvaluatedLoss& loss) {
    if (!std::isfinite(loss.value)) return false;
    for (double g : loss.gradient) {
        if (!std::isfinite(g)) return false;
    }
    return true;
}

}  // namespace

OptimizeTarget target_from_string(const std::string& name) {
    if (name == "joints") return OptimizeTarget::Joints;
    if (name == "base_frame") return OptimizeTarget::BaseFrame;
    if (name == "camera_extrinsics") return OptimizeTarget::CameraExtrinsics;
    throw ConfigError("unknown optimization target: " + name);
}

std::string to_string(OptimizeTarget target) {
    switch (target) {
        case OptimizeTarget::Joints: return "joints";
        case OptimizeTarget::BaseFrame: return "base_frame";
        case OptimizeTarget::CameraExtrinsics: return "camera_extrinsics";
    }
    throw ConfigError("invalid optimization target value");
}

LossKind loss_from_string(const std::string& name) {
    if (name == "acs") return LossKind::Acs;
    if (name == "smooth_l1") return LossKind::SmoothL1;
    throw ConfigError("unknown loss kind: " + name);
}

std::string to_string(LossKind kind) {
    switch (kind) {
        case LossKind::Acs: return "acs";
        case LossKind::SmoothL1: return "smooth_l1";
    }
    throw ConfigError("invalid loss kind value");
}

double OptimizeSpec::effective_step() const {
    if (step_size > 0.0) return step_size;
    return target == OptimizeTarget::Joints ? 2e-3 : 1e-3;
}

void OptimizeSpec::validate() const {
    if (step_size < 0.0 || !std::isfinite(step_size)) {
        throw ConfigError("step_size must be >= 0");
    }
    if (max_iters < 1) {
        throw ConfigError("max_iters must be >= 1");
    }
    if (convergence_eps < 0.0 || !std::isfinite(convergence_eps)) {
        throw ConfigError("convergence_eps must be >= 0");
    }
    if (!(attention_threshold > 0.0) || !(attention_threshold < 1.0)) {
        throw ConfigError("attention_threshold must lie in (0, 1)");
    }
    if (dilation_radius < 0) {
        throw ConfigError("dilation_radius must be >= 0");
    }
    if (!(smooth_l1_beta > 0.0)) {
        throw ConfigError("smooth_l1_beta must be > 0");
    }
    if (!(prismatic_step_scale > 0.0)) {
        throw ConfigError("prismatic_step_scale must be > 0");
    }
    for (int c : checkpoints) {
        if (c < 0) throw ConfigError("checkpoints must be >= 0");
    }
    extractor.validate();
    if (render) render->validate();
}

EvaluatedLoss evaluate_loss(const KinematicState& state,
                            const FeatureMap& observed_features,
                            const MeanBackground& background,
                            const OptimizeSpec& spec) {
    spec.validate();
    if (spec.extractor.kind == "external") {
        throw ConfigError(
            "external feature maps are not a function of the rendered image "
            "and cannot drive alignment; use identity or filterbank");
    }
    if (observed_features.width != state.camera.width ||
        observed_features.height != state.camera.height) {
        throw DimensionMismatch("observed features do not match the camera size");
    }
    const SoftRenderConfig cfg = effective_render(state, spec);
    const TriangleMesh posed = pose_meshes(state.chain, state.joints);
    SoftRenderOutput render = soft_shade(posed, state.camera, state.light, cfg);
    HybridRender hybrid = compose_hybrid(render, background);
    FeatureExtraction extracted = extract_features(hybrid.image, spec.extractor);
    if (extracted.features.channels != observed_features.channels) {
        throw DimensionMismatch("observed and rendered feature channels differ");
    }

    FeatureLoss loss =
        feature_loss(observed_features, extracted.features, render.silhouette, spec);

    const ImageRgb hybrid_cot = extracted.vjp(loss.grad);
    const auto [image_cot, sil_cot] = hybrid.vjp(hybrid_cot);
    const std::vector<Vec3> vertex_cots = render.vjp(image_cot, sil_cot);

    EvaluatedLoss out;
    out.value = loss.value;
    out.gradient = pull_to_target(state, posed, vertex_cots, spec.target);
    return out;
}

EvaluatedLoss evaluate_loss(const KinematicState& state, const ImageRgb& observed,
                            const MeanBackground& background,
                            const OptimizeSpec& spec) {
    spec.validate();
    const FeatureExtraction obs = extract_features(observed, spec.extractor);
    return evaluate_loss(state, obs.features, background, spec);
}

KinematicState apply_increment(const KinematicState& state, OptimizeTarget target,
                               const std::vector<double>& delta, bool clamp) {
    KinematicState out = state;
    if (target == OptimizeTarget::Joints) {
        if (delta.size() != state.joints.size()) {
            throw LengthMismatch("joint increment size does not match the config");
        }
        for (std::size_t i = 0; i < delta.size(); ++i) {
            out.joints[i] += delta[i];
        }
        if (clamp) {
            out.joints = out.chain.clamp_to_limits(out.joints);
        }
        return out;
    }
    if (delta.size() != 6) {
        throw LengthMismatch("rigid-frame increment needs 6 components");
    }
    const Vec3 axis_angle(delta[0], delta[1], delta[2]);
    const Vec3 translation(delta[3], delta[4], delta[5]);
    const Mat3 rot = RigidTransform::from_axis_angle(axis_angle).rotation();
    if (target == OptimizeTarget::BaseFrame) {
        const RigidTransform& base = state.chain.base;
        out.chain.base = RigidTransform(rot * base.rotation(),
                                        base.translation() + translation);
    } else {
        const RigidTransform& ext = state.camera.extrinsics;
        out.camera.extrinsics = RigidTransform(rot * ext.rotation(),
                                               ext.translation() + translation);
    }
    return out;
}

AlignmentResult align(const KinematicState& measured, const ImageRgb& observed,
                      const MeanBackground& background, const OptimizeSpec& spec) {
    spec.validate();
    if (spec.extractor.kind == "external") {
        throw ConfigError(
            "external feature maps are not a function of the rendered image "
            "and cannot drive alignment; use identity or filterbank");
    }
    const FeatureExtraction obs = extract_features(observed, spec.extractor);
    const double step = spec.effective_step();
    const std::set<int> wanted(spec.checkpoints.begin(), spec.checkpoints.end());

    AlignmentResult result;
    KinematicState current = measured;
    EvaluatedLoss eval = evaluate_loss(current, obs.features, background, spec);
    if (!all_finite(eval)) {
        throw NonFiniteLoss("loss is not finite at the starting state",
                            result.loss_trace);
    }
    result.loss_trace.push_back(eval.value);
    result.best_state = current;
    result.best_loss = eval.value;
    if (wanted.count(0)) {
        result.checkpoint_states.emplace_back(0, current);
    }

    int plateau = 0;
    for (int iter = 1; iter <= spec.max_iters; ++iter) {
        std::vector<double> delta(eval.gradient.size());
        for (std::size_t i = 0; i < delta.size(); ++i) {
            double joint_step = step;
            if (spec.target == OptimizeTarget::Joints &&
                measured.chain.rows[i].kind == JointKind::Prismatic) {
                joint_step *= spec.prismatic_step_scale;
            }
            delta[i] = -joint_step * eval.gradient[i];
        }
        current = apply_increment(current, spec.target, delta, spec.clamp_to_limits);
        eval = evaluate_loss(current, obs.features, background, spec);
        if (!all_finite(eval)) {
            throw NonFiniteLoss("loss became non-finite at iteration " +
                                    std::to_string(iter),
                                result.loss_trace);
        }
        result.iterations_run = iter;
        result.loss_trace.push_back(eval.value);
        if (eval.value < result.best_loss) {
            result.best_loss = eval.value;
            result.best_state = current;
        }
        if (wanted.count(iter)) {
            result.checkpoint_states.emplace_back(iter, current);
        }
        const double change = std::abs(result.loss_trace[iter] -
                                       result.loss_trace[iter - 1]);
        if (change < spec.convergence_eps) {
            if (++plateau >= 3) break;
        } else {
            plateau = 0;
        }
    }
    // Checkpoints past an early stop report the state the run settled on.
    for (int c : wanted) {
        if (c > result.iterations_run) {
            result.checkpoint_states.emplace_back(c, current);
        }
    }

    const SoftRenderConfig cfg = effective_render(result.best_state, spec);
    const TriangleMesh posed =
        pose_meshes(result.best_state.chain, result.best_state.joints);
    const ImageGray sil =
        soft_silhouette(posed, result.best_state.camera, cfg).silhouette;
    result.mask = MaskImage(sil.width, sil.height);
    for (std::size_t i = 0; i < sil.data.size(); ++i) {
        result.mask.data[i] = sil.data[i] > spec.attention_threshold ? 1 : 0;
    }
    return result;
}

MaskImage segment(const KinematicState& state) {
    return hard_rasterize(pose_meshes(state.chain, state.joints), state.camera);
}

std::string alignment_report_json(const AlignmentResult& result,
                                  const KinematicState& initial,
                                  const std::string& mask_path) {
    nlohmann::json report;
    report["loss_trace"] = result.loss_trace;
    report["best_loss"] = result.best_loss;
    report["iterations_run"] = result.iterations_run;
    report["mask"] = mask_path;
    nlohmann::json joints = nlohmann::json::array();
    const DHChain& chain = result.best_state.chain;
    for (std::size_t i = 0; i < chain.rows.size(); ++i) {
        nlohmann::json entry;
        entry["index"] = i;
        if (chain.rows[i].kind == JointKind::Revolute) {
            entry["kind"] = "revolute";
            entry["initial_deg"] = rad_to_deg(initial.joints[i]);
            entry["final_deg"] = rad_to_deg(result.best_state.joints[i]);
        } else {
            entry["kind"] = "prismatic";
            entry["initial_m"] = initial.joints[i];
            entry["final_m"] = result.best_state.joints[i];
        }
        joints.push_back(entry);
    }
    report["joints"] = joints;
    return report.dump(2);
}

}  // namespace kinalign
