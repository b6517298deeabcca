#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kinalign/features.hpp"
#include "kinalign/geometry.hpp"
#include "kinalign/kinematics.hpp"
#include "kinalign/losses.hpp"
#include "kinalign/rasterizer.hpp"

namespace kinalign {

/// Everything needed to synthesize one view of the tool.
struct KinematicState {
    DHChain chain;
    JointConfig joints;
    PinholeCamera camera;
    PointLight light;
};

/// Which block of parameters gradient descent updates.
enum class OptimizeTarget { Joints, BaseFrame, CameraExtrinsics };

enum class LossKind { Acs, SmoothL1 };

OptimizeTarget target_from_string(const std::string& name);  // throws ConfigError
std::string to_string(OptimizeTarget target);
LossKind loss_from_string(const std::string& name);  // throws ConfigError
std::string to_string(LossKind kind);

struct OptimizeSpec {
    OptimizeTarget target = OptimizeTarget::Joints;
    double step_size = 0.0;  // 0 -> per-target default, see effective_step()
    int max_iters = 100;
    LossKind loss = LossKind::Acs;
    FeatureExtractorSpec extractor;
    double convergence_eps = 1e-6;
    bool clamp_to_limits = true;
    std::optional<SoftRenderConfig> render;  // nullopt -> defaults_for(camera)
    double attention_threshold = 0.5;
    int dilation_radius = 11;
    double smooth_l1_beta = 1.0;
    /// Multiplies the step applied to prismatic joints, whose gradients are
    /// per meter rather than per radian; 0.01 puts a centimeter of slide on
    /// the same footing as a degree-scale rotation.
    double prismatic_step_scale = 0.01;
    std::vector<int> checkpoints;  // step counts whose iterate to snapshot

    /// 2e-3 rad for joints, 1e-3 for the rigid-frame targets.
    double effective_step() const;

    void validate() const;  // throws ConfigError / UnknownExtractor
};

/// Loss value and its gradient in target coordinates: one entry per joint,
/// or 6 entries (axis-angle then translation) for the rigid-frame targets.
struct EvaluatedLoss {
    double value = 0.0;
    std::vector<double> gradient;
};

/// Renders the state, composites it over the background, extracts features
/// and differentiates the configured loss against the observed features.
/// The attention map is rebuilt from the rendered silhouette each call and
/// treated as a constant by the gradient.
EvaluatedLoss evaluate_loss(const KinematicState& state,
                            const FeatureMap& observed_features,
                            const MeanBackground& background,
                            const OptimizeSpec& spec);

/// Convenience overload; extracts the observed features first. Callers
/// evaluating repeatedly against one image should extract once instead.
EvaluatedLoss evaluate_loss(const KinematicState& state, const ImageRgb& observed,
                            const MeanBackground& background,
                            const OptimizeSpec& spec);

/// Moves the state along `delta` in target coordinates. Joint deltas add to
/// the joint vector (clamped to limits when `clamp`); rigid-frame deltas
/// apply exp of the axis-angle part on the left of the rotation and add the
/// translation part. Throws LengthMismatch on a wrong-sized delta.
KinematicState apply_increment(const KinematicState& state, OptimizeTarget target,
                               const std::vector<double>& delta, bool clamp);

struct AlignmentResult {
    KinematicState best_state;
    double best_loss = 0.0;
    std::vector<double> loss_trace;  // initial loss, then one entry per step
    MaskImage mask;                  // best-state soft silhouette, thresholded
    int iterations_run = 0;
    std::vector<std::pair<int, KinematicState>> checkpoint_states;
};

/// Gradient descent from the measured state. Stops after max_iters steps or
/// once |loss_i - loss_{i-1}| < convergence_eps holds three steps in a row.
/// Returns the lowest-loss iterate seen, the start included. Parameters
/// outside the target block are returned unchanged. Throws NonFiniteLoss,
/// carrying the finite prefix of the trace, when a loss or gradient stops
/// being finite.
AlignmentResult align(const KinematicState& measured, const ImageRgb& observed,
                      const MeanBackground& background, const OptimizeSpec& spec);

/// Hard-rasterized tool mask for a state, no optimization.
MaskImage segment(const KinematicState& state);

/// JSON report: loss trace, iteration count, per-joint initial/final values
/// (degrees for revolute joints, meters for prismatic) and the mask path.
std::string alignment_report_json(const AlignmentResult& result,
                                  const KinematicState& initial,
                                  const std::string& mask_path);

}  // namespace kinalign
