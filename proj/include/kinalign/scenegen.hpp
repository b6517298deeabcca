#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kinalign/features.hpp"
#include "kinalign/geometry.hpp"
#include "kinalign/image.hpp"
#include "kinalign/kinematics.hpp"
#include "kinalign/rasterizer.hpp"

namespace kinalign {

enum class DomainKind { Regular, LowBrightness, Smoke, Blood, BackgroundChange };

DomainKind domain_from_string(const std::string& name);  // throws UnknownDomain
std::string to_string(DomainKind kind);

/// One counterfactual imaging condition. Only the parameters of the declared
/// kind are consulted; the seed fixes every random choice bit-for-bit.
struct DomainSpec {
    DomainKind kind = DomainKind::Regular;
    double brightness_scale = 0.5;   // low_brightness, in (0, 1]
    double smoke_opacity = 0.6;      // smoke, in [0, 1]
    int noise_octaves = 4;           // smoke
    int blob_count = 6;              // blood
    int blob_radius_px = 16;         // blood
    std::string background_id = "alt";  // background_change
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError
};

struct Frame {
    ImageRgb observed_image;
    MaskImage gt_mask;
    JointConfig gt_joints;
    JointConfig measured_joints;
    DomainSpec domain;
};

/// SplitMix-style stream derivation so one dataset seed yields independent
/// per-frame and per-purpose substreams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Smooth per-joint sinusoids: random phase, frequency and amplitude, always
/// inside the joint limits.
std::vector<JointConfig> generate_trajectory(const DHChain& chain, int n_frames,
                                             std::uint64_t seed);

/// Adds independent uniform noise in [-magnitude, +magnitude] degrees per
/// revolute joint and [-magnitude, +magnitude] / 100 m per prismatic joint.
/// The chain supplies each joint's kind.
JointConfig perturb_joints(const JointConfig& q, const DHChain& chain,
                           double magnitude_deg, std::uint64_t seed);

/// Deterministic procedural background texture for an identifier; when the
/// identifier names a readable PNG file it is loaded and resized by edge
/// clamping instead.
ImageRgb make_background(const std::string& id, int width, int height);

/// Applies the domain's corruption to an observed image. The ground-truth
/// mask guards tool pixels: blood pools and background swaps only touch
/// pixels where gt_mask = 0. Output stays inside [0, 1].
ImageRgb corrupt(const ImageRgb& image, const MaskImage& gt_mask,
                 const DomainSpec& domain);

struct FrameRecord {
    std::string observed;      // 8-bit PNG, for viewing
    std::string observed_pfm;  // float PFM, consumed by alignment
    std::string mask;
    JointConfig gt_joints;
    JointConfig measured_joints;
    DomainSpec domain;
};

struct DatasetManifest {
    std::string chain_file;
    PinholeCamera camera;
    PointLight light;
    SoftRenderConfig renderer;
    double error_deg = 0.0;
    std::uint64_t seed = 0;
    std::string mean_background;  // RGB PFM
    std::string perturbation_model = "uniform";
    std::vector<FrameRecord> frames;
};

/// Renders a ground-truth trajectory over a fixed textured background,
/// corrupts it per the domain, perturbs the measured kinematics and writes
/// frames, chain, kinematics and manifest JSON under out_dir. The same seed
/// replays the same trajectory and perturbations for every domain. Passing
/// render_cfg = nullptr uses SoftRenderConfig::defaults_for(cam).
DatasetManifest generate_dataset(const DHChain& chain, const PinholeCamera& cam,
                                 const PointLight& light, int n_frames,
                                 double error_deg, const DomainSpec& domain,
                                 std::uint64_t seed, const std::string& out_dir,
                                 const SoftRenderConfig* render_cfg = nullptr);

/// Manifest JSON I/O. Loading resolves every stored path against the
/// manifest's directory.
void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

// --- Bundled demo fixture ---------------------------------------------------
// A desk-scale 6-DOF tool: two revolute shoulder joints, one prismatic
// insertion joint and a three-revolute wrist carrying a forked tip. Sized so
// the shaft enters the demo camera's frame from the side with the wrist
// centered, and so every joint sweep visibly moves the silhouette.

DHChain demo_chain();
PinholeCamera demo_camera();
PointLight demo_light();

}  // namespace kinalign
