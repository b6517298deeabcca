#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kinalign/image.hpp"
#include "kinalign/rasterizer.hpp"

namespace kinalign {

/// Planar multi-channel feature image; data index (c * height + y) * width + x.
struct FeatureMap {
    int channels = 0;
    int width = 0;
    int height = 0;
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(int c, int w, int h, double fill = 0.0)
        : channels(c), width(w), height(h),
          data(static_cast<std::size_t>(c) * w * h, fill) {}

    double& at(int c, int x, int y) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int c, int x, int y) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    bool same_shape(const FeatureMap& o) const {
        return channels == o.channels && width == o.width && height == o.height;
    }
};

/// Pixel-wise average of a dataset's collected images.
struct MeanBackground {
    ImageRgb image;
};

/// Per-pixel arithmetic mean. Throws EmptyList / DimensionMismatch.
MeanBackground mean_background(const std::vector<ImageRgb>& images);

/// Soft alpha-composite of a render over the average background:
/// out = S * I + (1 - S) * BG per channel.
struct HybridRender {
    ImageRgb image;
    /// Pullback of dL/dimage onto (dL/drendered image, dL/dsilhouette).
    std::function<std::pair<ImageRgb, ImageGray>(const ImageRgb&)> vjp;
};

HybridRender compose_hybrid(const SoftRenderOutput& rendered,
                            const MeanBackground& bg);

/// Which feature extractor to run.
///   identity   - the 3 raw channels
///   filterbank - per Gaussian scale (1, 2, 4 px): smoothed luminance,
///                horizontal and vertical derivative-of-Gaussian, C = 9
///   external   - precomputed map loaded from `external_path` (PFM stack
///                with a sidecar JSON declaring the channel count)
struct FeatureExtractorSpec {
    std::string kind = "filterbank";
    std::string external_path;

    void validate() const;  // throws UnknownExtractor
};

struct FeatureExtraction {
    FeatureMap features;
    /// False for `external` maps, which are not a function of the image.
    bool differentiable = false;
    /// Pullback of dL/dfeatures onto dL/dimage; null when not differentiable.
    std::function<ImageRgb(const FeatureMap&)> vjp;
};

/// Deterministic feature extraction. Built-in extractors are linear in the
/// image. Convolutions use reflect padding (border sample not repeated).
FeatureExtraction extract_features(const ImageRgb& image,
                                   const FeatureExtractorSpec& spec);

// --- External feature map files ------------------------------------------
// A C-channel map is stored as one grayscale PFM of height C*H with the
// channels stacked top to bottom, plus `<path>.json` holding {"channels": C}.

void save_feature_map(const FeatureMap& map, const std::string& path);
FeatureMap load_feature_map(const std::string& path);

}  // namespace kinalign
