#include "kinalign/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "kinalign/errors.hpp"

namespace kinalign {

SoftRenderConfig SoftRenderConfig::defaults_for(const PinholeCamera& cam) {
    SoftRenderConfig cfg;
    const double diag = cam.image_diagonal();
    cfg.sigma = 1e-4 * diag * diag;
    cfg.gamma = 1e-4;
    cfg.background_value = 0.0;
    return cfg;
}

void SoftRenderConfig::validate() const {
    if (!(sigma > 0.0) || !(gamma > 0.0)) {
        throw Error("SoftRenderConfig: sigma and gamma must be positive");
    }
    if (background_value < 0.0 || background_value > 1.0) {
        throw Error("SoftRenderConfig: background_value must be in [0,1]");
    }
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double cross2(const Vec2& a, const Vec2& b) {
    return a.x() * b.y() - a.y() * b.x();
}

/// Squared distance from q to segment [a,b] plus the data the backward
/// pass needs: the clamped parameter t and the offset q - closest.
struct SegDist {
    double d2;
    double t;
    Vec2 diff;
};

SegDist point_segment_sqdist(const Vec2& q, const Vec2& a, const Vec2& b) {
    const Vec2 u = b - a;
    const double uu = u.squaredNorm();
    double t = 0.0;
    if (uu > 1e-30) {
        t = std::clamp((q - a).dot(u) / uu, 0.0, 1.0);
    }
    const Vec2 diff = q - (a + t * u);
    return {diff.squaredNorm(), t, diff};
}

/// Signed squared distance to a projected triangle: value of d^2 together
/// with the closest edge, its parameter, and the inside flag.
struct TriDist {
    double d2;
    int edge;   // 0:(0,1) 1:(1,2) 2:(2,0)
    double t;
    Vec2 diff;
    bool inside;
};

TriDist point_triangle_sqdist(const Vec2& q, const Vec2 px[3]) {
    TriDist best{std::numeric_limits<double>::infinity(), 0, 0.0, Vec2::Zero(), false};
    for (int e = 0; e < 3; ++e) {
        const SegDist sd = point_segment_sqdist(q, px[e], px[(e + 1) % 3]);
        if (sd.d2 < best.d2) {
            best.d2 = sd.d2;
            best.edge = e;
            best.t = sd.t;
            best.diff = sd.diff;
        }
    }
    const double w0 = cross2(px[1] - px[0], q - px[0]);
    const double w1 = cross2(px[2] - px[1], q - px[1]);
    const double w2 = cross2(px[0] - px[2], q - px[2]);
    best.inside = (w0 >= 0.0 && w1 >= 0.0 && w2 >= 0.0) ||
                  (w0 <= 0.0 && w1 <= 0.0 && w2 <= 0.0);
    return best;
}

struct FaceData {
    bool valid = false;
    std::array<std::uint32_t, 3> verts{};
    Vec3 cam[3];
    Vec2 px[3];
    double zbar = 0.0;   // mean camera-frame depth
    double shade = 0.0;  // Lambertian gray value
    int x0 = 0, x1 = -1, y0 = 0, y1 = -1;  // inflated pixel bbox, inclusive
};

/// One (pixel, face) influence together with the closest-point data the
/// backward pass reuses instead of recomputing.
struct Entry {
    std::uint32_t face;
    std::int32_t edge;  // closest edge index
    double influence;   // D_j at this pixel
    double t;           // closest-edge parameter
    double dx, dy;      // q - closest point
    double depth_w;     // exp(-(zbar - zref)/gamma), shaded passes only
    double sign;        // +1 inside the projection, -1 outside
};

/// Everything the forward pass produced that the VJP needs.
struct RenderState {
    PinholeCamera cam;
    SoftRenderConfig cfg;
    PointLight light;
    bool shaded = false;
    std::size_t vertex_count = 0;

    std::vector<FaceData> faces;
    std::vector<Vec3> cam_pts;           // per-vertex camera-frame points
    std::vector<std::uint32_t> offsets;  // per-pixel segment starts, size W*H+1
    std::vector<std::uint32_t> kept;     // per-pixel entry counts after pruning
    std::vector<Entry> entries;
    std::vector<double> zref;        // per-pixel softmax shift (shaded only)
    std::vector<double> weight_sum;  // per-pixel softmax denominator (shaded only)
    ImageGray silhouette;
    ImageGray foreground;  // softmax-aggregated shade (shaded only)
};

double lambert_shade(const Vec3 cam_pts[3], const PointLight& light) {
    const Vec3 n_raw = (cam_pts[1] - cam_pts[0]).cross(cam_pts[2] - cam_pts[0]);
    const double n_len = n_raw.norm();
    if (n_len < 1e-30) {
        return 0.0;
    }
    const Vec3 centroid = (cam_pts[0] + cam_pts[1] + cam_pts[2]) / 3.0;
    const Vec3 l_raw = light.position - centroid;
    const double l_len = l_raw.norm();
    if (l_len < 1e-30) {
        return 0.0;
    }
    const double ndotl = n_raw.dot(l_raw) / (n_len * l_len);
    return light.intensity * std::max(0.0, ndotl);
}

/// Gradient of lambert_shade w.r.t. the three camera-frame corners.
void lambert_shade_grad(const Vec3 cam_pts[3], const PointLight& light,
                        double upstream, Vec3 grads[3]) {
    const Vec3 e1 = cam_pts[1] - cam_pts[0];
    const Vec3 e2 = cam_pts[2] - cam_pts[0];
    const Vec3 n_raw = e1.cross(e2);
    const double n_len = n_raw.norm();
    if (n_len < 1e-30) {
        return;
    }
    const Vec3 n = n_raw / n_len;
    const Vec3 centroid = (cam_pts[0] + cam_pts[1] + cam_pts[2]) / 3.0;
    const Vec3 l_raw = light.position - centroid;
    const double l_len = l_raw.norm();
    if (l_len < 1e-30) {
        return;
    }
    const Vec3 l = l_raw / l_len;
    const double ndotl = n.dot(l);
    if (ndotl <= 0.0) {
        return;  // clamped; zero gradient
    }
    const double scale = upstream * light.intensity;

    // Normal path: d(n.l)/dn_raw = (l - (n.l) n) / |n_raw|.
    const Vec3 w = (l - ndotl * n) / n_len;
    const Vec3 g1 = e2.cross(w);
    const Vec3 g2 = w.cross(e1);
    grads[1] += scale * g1;
    grads[2] += scale * g2;
    grads[0] -= scale * (g1 + g2);

    // Light-direction path: d(n.l)/dcentroid = -(n - (n.l) l) / |l_raw|,
    // split equally over the corners.
    const Vec3 gl = -(n - ndotl * l) / (3.0 * l_len);
    grads[0] += scale * gl;
    grads[1] += scale * gl;
    grads[2] += scale * gl;
}

std::shared_ptr<RenderState> build_state(const TriangleMesh& mesh,
                                         const PinholeCamera& cam,
                                         const SoftRenderConfig& cfg,
                                         const PointLight& light, bool shaded) {
    cfg.validate();
    if (mesh.face_count() == 0 || mesh.vertex_count() == 0) {
        throw EmptyMesh("soft render: mesh has no geometry");
    }

    auto state = std::make_shared<RenderState>();
    state->cam = cam;
    state->cfg = cfg;
    state->light = light;
    state->shaded = shaded;
    state->vertex_count = mesh.vertex_count();

    const int w = cam.width, h = cam.height;
    const double inflate = std::sqrt(20.0 * cfg.sigma);

    // Per-face projection, bbox and flat shade.
    std::vector<Vec3>& cam_pts = state->cam_pts;
    cam_pts.resize(mesh.vertex_count());
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
        cam_pts[i] = cam.to_camera(mesh.vertices[i]);
    }

    state->faces.resize(mesh.face_count());
    bool any_in_front = false;
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        FaceData& fd = state->faces[f];
        fd.verts = mesh.faces[f];
        bool in_front = true;
        for (int k = 0; k < 3; ++k) {
            fd.cam[k] = cam_pts[fd.verts[k]];
            in_front = in_front && fd.cam[k].z() > kNearClip;
        }
        if (!in_front) {
            continue;
        }
        any_in_front = true;
        for (int k = 0; k < 3; ++k) {
            fd.px[k] = cam.project_camera_point(fd.cam[k]);
        }
        fd.zbar = (fd.cam[0].z() + fd.cam[1].z() + fd.cam[2].z()) / 3.0;
        fd.shade = shaded ? lambert_shade(fd.cam, light) : 0.0;

        const double xmin = std::min({fd.px[0].x(), fd.px[1].x(), fd.px[2].x()});
        const double xmax = std::max({fd.px[0].x(), fd.px[1].x(), fd.px[2].x()});
        const double ymin = std::min({fd.px[0].y(), fd.px[1].y(), fd.px[2].y()});
        const double ymax = std::max({fd.px[0].y(), fd.px[1].y(), fd.px[2].y()});
        // Pixel (x,y) samples at (x+0.5, y+0.5).
        fd.x0 = std::max(0, static_cast<int>(std::floor(xmin - inflate - 0.5)));
        fd.x1 = std::min(w - 1, static_cast<int>(std::ceil(xmax + inflate - 0.5)));
        fd.y0 = std::max(0, static_cast<int>(std::floor(ymin - inflate - 0.5)));
        fd.y1 = std::min(h - 1, static_cast<int>(std::ceil(ymax + inflate - 0.5)));
        fd.valid = fd.x0 <= fd.x1 && fd.y0 <= fd.y1;
    }
    if (!any_in_front) {
        throw AllBehindCamera("soft render: every triangle is behind the camera");
    }

    // Two-pass grouping of (pixel, face) influences.
    const std::size_t pixel_count = static_cast<std::size_t>(w) * h;
    std::vector<std::uint32_t> counts(pixel_count, 0);
    for (const FaceData& fd : state->faces) {
        if (!fd.valid) continue;
        for (int y = fd.y0; y <= fd.y1; ++y) {
            for (int x = fd.x0; x <= fd.x1; ++x) {
                ++counts[static_cast<std::size_t>(y) * w + x];
            }
        }
    }
    state->offsets.assign(pixel_count + 1, 0);
    for (std::size_t p = 0; p < pixel_count; ++p) {
        state->offsets[p + 1] = state->offsets[p] + counts[p];
    }
    state->entries.resize(state->offsets.back());
    std::vector<std::uint32_t> cursor(state->offsets.begin(),
                                      state->offsets.end() - 1);
    for (std::size_t f = 0; f < state->faces.size(); ++f) {
        const FaceData& fd = state->faces[f];
        if (!fd.valid) continue;
        for (int y = fd.y0; y <= fd.y1; ++y) {
            for (int x = fd.x0; x <= fd.x1; ++x) {
                const std::size_t p = static_cast<std::size_t>(y) * w + x;
                state->entries[cursor[p]++] = {static_cast<std::uint32_t>(f), 0.0};
            }
        }
    }

    // Influences and aggregation.
    state->silhouette = ImageGray(w, h, 0.0);
    if (shaded) {
        state->foreground = ImageGray(w, h, 0.0);
        state->zref.assign(pixel_count, 0.0);
    }
    for (std::size_t p = 0; p < pixel_count; ++p) {
        const std::uint32_t begin = state->offsets[p], end = state->offsets[p + 1];
        if (begin == end) continue;
        const Vec2 q(static_cast<double>(p % w) + 0.5,
                     static_cast<double>(p / w) + 0.5);

        double one_minus = 1.0;
        double zmin = std::numeric_limits<double>::infinity();
        for (std::uint32_t i = begin; i < end; ++i) {
            const FaceData& fd = state->faces[state->entries[i].face];
            const TriDist td = point_triangle_sqdist(q, fd.px);
            const double sign = td.inside ? 1.0 : -1.0;
            const double d = sigmoid(sign * td.d2 / cfg.sigma);
            state->entries[i].influence = d;
            one_minus *= 1.0 - d;
            zmin = std::min(zmin, fd.zbar);
        }
        state->silhouette.data[p] = 1.0 - one_minus;

        if (shaded) {
            state->zref[p] = zmin;
            double weight_sum = 0.0, color_sum = 0.0;
            for (std::uint32_t i = begin; i < end; ++i) {
                const FaceData& fd = state->faces[state->entries[i].face];
                const double u = state->entries[i].influence *
                                 std::exp(-(fd.zbar - zmin) / cfg.gamma);
                weight_sum += u;
                color_sum += u * fd.shade;
            }
            // weight_sum can underflow to zero when every influence is in
            // the far sigmoid tail; the silhouette is zero there too.
            state->foreground.data[p] =
                weight_sum > 0.0 ? color_sum / weight_sum : 0.0;
        }
    }
    return state;
}

ImageRgb compose_image(const RenderState& state) {
    const int w = state.cam.width, h = state.cam.height;
    ImageGray gray(w, h, state.cfg.background_value);
    for (std::size_t p = 0; p < gray.data.size(); ++p) {
        const double s = state.silhouette.data[p];
        const double v = s * state.foreground.data[p] +
                         (1.0 - s) * state.cfg.background_value;
        gray.data[p] = std::clamp(v, 0.0, 1.0);
    }
    return ImageRgb::from_gray(gray);
}

/// Shared backward pass. image_cot may be null for silhouette-only renders.
std::vector<Vec3> backward(const RenderState& state, const ImageRgb* image_cot,
                           const ImageGray* sil_cot) {
    const int w = state.cam.width, h = state.cam.height;
    if (sil_cot && (sil_cot->width != w || sil_cot->height != h)) {
        throw DimensionMismatch("render vjp: silhouette cotangent size mismatch");
    }
    if (image_cot && (image_cot->width != w || image_cot->height != h)) {
        throw DimensionMismatch("render vjp: image cotangent size mismatch");
    }

    std::vector<Vec3> cam_grads(state.vertex_count, Vec3::Zero());
    std::vector<double> shade_bar(state.faces.size(), 0.0);
    std::vector<double> zbar_bar(state.faces.size(), 0.0);
    const double sigma = state.cfg.sigma;
    const double gamma = state.cfg.gamma;

    std::vector<double> influence_bar;
    std::vector<double> prefix, suffix;

    const std::size_t pixel_count = static_cast<std::size_t>(w) * h;
    for (std::size_t p = 0; p < pixel_count; ++p) {
        const std::uint32_t begin = state.offsets[p], end = state.offsets[p + 1];
        if (begin == end) continue;
        const std::size_t k = end - begin;
        const Vec2 q(static_cast<double>(p % w) + 0.5,
                     static_cast<double>(p / w) + 0.5);

        double s_bar = sil_cot ? sil_cot->data[p] : 0.0;
        double fg_bar = 0.0;
        if (image_cot && state.shaded) {
            // Gray value replicated to three channels; clamp was inactive
            // whenever the pre-clamp value sat inside [0,1].
            const double g = image_cot->data[p * 3] + image_cot->data[p * 3 + 1] +
                             image_cot->data[p * 3 + 2];
            const double s = state.silhouette.data[p];
            const double pre_clamp = s * state.foreground.data[p] +
                                     (1.0 - s) * state.cfg.background_value;
            if (pre_clamp >= 0.0 && pre_clamp <= 1.0) {
                s_bar += g * (state.foreground.data[p] - state.cfg.background_value);
                fg_bar = g * s;
            }
        }

        influence_bar.assign(k, 0.0);

        // Silhouette: dS/dD_j = prod_{k != j} (1 - D_k).
        if (s_bar != 0.0) {
            prefix.assign(k + 1, 1.0);
            suffix.assign(k + 1, 1.0);
            for (std::size_t i = 0; i < k; ++i) {
                prefix[i + 1] = prefix[i] * (1.0 - state.entries[begin + i].influence);
            }
            for (std::size_t i = k; i-- > 0;) {
                suffix[i] = suffix[i + 1] * (1.0 - state.entries[begin + i].influence);
            }
            for (std::size_t i = 0; i < k; ++i) {
                influence_bar[i] += s_bar * prefix[i] * suffix[i + 1];
            }
        }

        // Depth softmax: foreground = sum_j u_j c_j / sum_j u_j,
        // u_j = D_j exp(-(zbar_j - zref)/gamma).
        if (fg_bar != 0.0) {
            const double zref = state.zref[p];
            double weight_sum = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                const FaceData& fd = state.faces[state.entries[begin + i].face];
                weight_sum += state.entries[begin + i].influence *
                              std::exp(-(fd.zbar - zref) / gamma);
            }
            // Zero weight sum means every influence underflowed; the
            // forward pass emitted 0 there and the pullback vanishes.
            if (weight_sum > 0.0) {
                const double fg = state.foreground.data[p];
                for (std::size_t i = 0; i < k; ++i) {
                    const FaceData& fd = state.faces[state.entries[begin + i].face];
                    const double e = std::exp(-(fd.zbar - zref) / gamma);
                    const double u = state.entries[begin + i].influence * e;
                    const double u_bar = fg_bar * (fd.shade - fg) / weight_sum;
                    influence_bar[i] += u_bar * e;
                    zbar_bar[state.entries[begin + i].face] -= u_bar * u / gamma;
                    shade_bar[state.entries[begin + i].face] +=
                        fg_bar * u / weight_sum;
                }
            }
        }

        // Influence -> projected vertices of the closest edge.
        for (std::size_t i = 0; i < k; ++i) {
            const double d_bar = influence_bar[i];
            if (d_bar == 0.0) continue;
            const Entry& entry = state.entries[begin + i];
            const FaceData& fd = state.faces[entry.face];
            const TriDist td = point_triangle_sqdist(q, fd.px);
            const double d = entry.influence;
            const double sign = td.inside ? 1.0 : -1.0;
            const double d2_bar = d_bar * d * (1.0 - d) * sign / sigma;

            // d^2 = |q - (a + t (b - a))|^2 with t clamped; the envelope
            // theorem gives dd^2/da = -2 (1-t) diff, dd^2/db = -2 t diff.
            const int ia = td.edge, ib = (td.edge + 1) % 3;
            const Vec2 ga = d2_bar * -2.0 * (1.0 - td.t) * td.diff;
            const Vec2 gb = d2_bar * -2.0 * td.t * td.diff;
            cam_grads[fd.verts[ia]] +=
                state.cam.projection_jacobian(fd.cam[ia]).transpose() * ga;
            cam_grads[fd.verts[ib]] +=
                state.cam.projection_jacobian(fd.cam[ib]).transpose() * gb;
        }
    }

    // Per-face scalars -> camera-frame corners.
    for (std::size_t f = 0; f < state.faces.size(); ++f) {
        const FaceData& fd = state.faces[f];
        if (!fd.valid) continue;
        if (zbar_bar[f] != 0.0) {
            for (int c = 0; c < 3; ++c) {
                cam_grads[fd.verts[c]].z() += zbar_bar[f] / 3.0;
            }
        }
        if (shade_bar[f] != 0.0) {
            Vec3 g[3] = {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
            lambert_shade_grad(fd.cam, state.light, shade_bar[f], g);
            for (int c = 0; c < 3; ++c) {
                cam_grads[fd.verts[c]] += g[c];
            }
        }
    }

    // Camera frame -> world frame.
    const Mat3 rot_t = state.cam.extrinsics.rotation().transpose();
    std::vector<Vec3> world_grads(state.vertex_count);
    for (std::size_t v = 0; v < state.vertex_count; ++v) {
        world_grads[v] = rot_t * cam_grads[v];
    }
    return world_grads;
}

}  // namespace

SilhouetteRender soft_silhouette(const TriangleMesh& mesh, const PinholeCamera& cam,
                                 const SoftRenderConfig& cfg) {
    auto state = build_state(mesh, cam, cfg, PointLight(), /*shaded=*/false);
    SilhouetteRender out;
    out.silhouette = state->silhouette;
    out.vjp = [state](const ImageGray& sil_cot) {
        return backward(*state, nullptr, &sil_cot);
    };
    return out;
}

SoftRenderOutput soft_shade(const TriangleMesh& mesh, const PinholeCamera& cam,
                            const PointLight& light, const SoftRenderConfig& cfg) {
    auto state = build_state(mesh, cam, cfg, light, /*shaded=*/true);
    SoftRenderOutput out;
    out.silhouette = state->silhouette;
    out.image = compose_image(*state);
    out.vjp = [state](const ImageRgb& image_cot, const ImageGray& sil_cot) {
        return backward(*state, &image_cot, &sil_cot);
    };
    return out;
}

MaskImage hard_rasterize(const TriangleMesh& mesh, const PinholeCamera& cam) {
    if (mesh.face_count() == 0 || mesh.vertex_count() == 0) {
        throw EmptyMesh("hard_rasterize: mesh has no geometry");
    }
    const int w = cam.width, h = cam.height;
    MaskImage mask(w, h, 0);
    std::vector<double> depth(static_cast<std::size_t>(w) * h,
                              std::numeric_limits<double>::infinity());

    std::vector<Vec3> cam_pts(mesh.vertex_count());
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
        cam_pts[i] = cam.to_camera(mesh.vertices[i]);
    }

    bool any_in_front = false;
    for (const auto& face : mesh.faces) {
        const Vec3 c0 = cam_pts[face[0]], c1 = cam_pts[face[1]], c2 = cam_pts[face[2]];
        if (c0.z() <= kNearClip || c1.z() <= kNearClip || c2.z() <= kNearClip) {
            continue;
        }
        any_in_front = true;
        const Vec2 a = cam.project_camera_point(c0);
        const Vec2 b = cam.project_camera_point(c1);
        const Vec2 c = cam.project_camera_point(c2);
        const double denom = cross2(b - a, c - a);
        if (std::abs(denom) < 1e-30) {
            continue;  // edge-on
        }
        const int x0 = std::max(0, static_cast<int>(std::floor(
                                       std::min({a.x(), b.x(), c.x()}) - 0.5)));
        const int x1 = std::min(w - 1, static_cast<int>(std::ceil(
                                           std::max({a.x(), b.x(), c.x()}) - 0.5)));
        const int y0 = std::max(0, static_cast<int>(std::floor(
                                       std::min({a.y(), b.y(), c.y()}) - 0.5)));
        const int y1 = std::min(h - 1, static_cast<int>(std::ceil(
                                           std::max({a.y(), b.y(), c.y()}) - 0.5)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const Vec2 q(x + 0.5, y + 0.5);
                const double s = cross2(q - a, c - a) / denom;
                const double t = cross2(b - a, q - a) / denom;
                if (s < 0.0 || t < 0.0 || s + t > 1.0) {
                    continue;
                }
                const double z = c0.z() + s * (c1.z() - c0.z()) + t * (c2.z() - c0.z());
                const std::size_t p = static_cast<std::size_t>(y) * w + x;
                if (z < depth[p]) {
                    depth[p] = z;
                    mask.data[p] = 1;
                }
            }
        }
    }
    if (!any_in_front) {
        throw AllBehindCamera("hard_rasterize: every triangle is behind the camera");
    }
    return mask;
}

}  // namespace kinalign
