#pragma once

#include <functional>
#include <vector>

#include "kinalign/geometry.hpp"
#include "kinalign/image.hpp"
#include "kinalign/mesh.hpp"

namespace kinalign {

/// Aggregation constants for the soft rasterizer.
struct SoftRenderConfig {
    double sigma = 1e-2;            // edge sharpness, pixel^2 after projection
    double gamma = 1e-4;            // depth-softmax temperature, meters
    double background_value = 0.0;  // in [0, 1]

    /// sigma = 1e-4 * (image diagonal px)^2, gamma = 1e-4, background 0.
    static SoftRenderConfig defaults_for(const PinholeCamera& cam);

    void validate() const;
};

/// Rendered image / silhouette plus the pullback onto mesh vertices.
/// The vjp maps (dL/dimage, dL/dsilhouette) to one world-space 3-vector
/// per mesh vertex and may be invoked repeatedly.
struct SoftRenderOutput {
    ImageRgb image;
    ImageGray silhouette;
    std::function<std::vector<Vec3>(const ImageRgb&, const ImageGray&)> vjp;
};

struct SilhouetteRender {
    ImageGray silhouette;
    std::function<std::vector<Vec3>(const ImageGray&)> vjp;
};

/// Soft silhouette: per-triangle influence
///   D_j(p) = sigmoid(s_j(p) * d^2(p, proj tri_j) / sigma)
/// with s_j = +1 inside / -1 outside and d the screen-space distance to
/// the projected triangle; aggregated as S(p) = 1 - prod_j (1 - D_j(p)).
/// Triangles only influence pixels within their bounding box inflated by
/// sqrt(20 sigma) px; beyond that D_j < 1e-8 and is treated as zero.
SilhouetteRender soft_silhouette(const TriangleMesh& mesh, const PinholeCamera& cam,
                                 const SoftRenderConfig& cfg);

/// Lambertian-shaded soft render: per-pixel gray value
///   S * softmax_depth(c_j; gamma) + (1 - S) * background_value
/// where c_j = intensity * max(0, n_j . l_j), flat-shaded, replicated to
/// three channels. Also returns the silhouette and the joint VJP.
SoftRenderOutput soft_shade(const TriangleMesh& mesh, const PinholeCamera& cam,
                            const PointLight& light, const SoftRenderConfig& cfg);

/// Point-in-triangle coverage at pixel centers, nearest depth wins.
/// Triangles with any vertex behind the near plane are culled.
MaskImage hard_rasterize(const TriangleMesh& mesh, const PinholeCamera& cam);

}  // namespace kinalign
