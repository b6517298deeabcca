#pragma once

#include "kinalign/features.hpp"
#include "kinalign/image.hpp"

namespace kinalign {

/// Binary region-of-interest mask produced by dilating a silhouette.
struct AttentionMap {
    MaskImage mask;
    int dilation_radius = 0;
};

/// Binarizes at `threshold` (values strictly above count as set), then
/// dilates with a Euclidean disc of `radius` pixels. Radius 0 returns the
/// binarized input. Implemented with an exact squared distance transform.
AttentionMap dilate_silhouette(const ImageGray& silhouette, double threshold,
                               int radius);

/// Attentional cosine-similarity loss:
///   L = 1 - (1 / (w*h)) * sum_p sim_cos(f_obs, f_ren)_p * att_p
/// with the cosine taken along channels. Pixels where either feature
/// vector has norm < 1e-12 contribute similarity 0. The gradient is taken
/// w.r.t. f_ren only; the attention map is a constant.
struct AcsLoss {
    double value = 0.0;
    FeatureMap grad;  // dL/df_ren
};

AcsLoss acs_loss(const FeatureMap& f_obs, const FeatureMap& f_ren,
                 const AttentionMap& att);

/// Mean over pixels of the Huber-style penalty
///   0.5 * e^2 / beta       when |e| < beta
///   |e| - 0.5 * beta       otherwise,      e = pred - target.
struct SmoothL1Loss {
    double value = 0.0;
    ImageGray grad;  // dL/dpred
};

SmoothL1Loss smooth_l1_loss(const ImageGray& pred, const ImageGray& target,
                            double beta);

}  // namespace kinalign
