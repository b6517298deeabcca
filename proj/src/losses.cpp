#include "kinalign/losses.hpp"

#include <cmath>
#include <vector>

#include "kinalign/errors.hpp"

namespace kinalign {

namespace {

constexpr double kInf = 1e20;

/// One pass of Felzenszwalb-Huttenlocher lower-envelope distance transform:
/// d[q] = min_p (q - p)^2 + f[p].
void dt_1d(const double* f, int n, double* d, int* v, double* z) {
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) /
                   (2.0 * (q - v[k]));
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) /
                (2.0 * (q - v[k]));
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) {
            ++k;
        }
        d[q] = static_cast<double>(q - v[k]) * (q - v[k]) + f[v[k]];
    }
}

/// Squared Euclidean distance to the nearest set pixel (kInf when none).
std::vector<double> squared_distance_transform(const MaskImage& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<double> dist(static_cast<std::size_t>(w) * h);
    for (std::size_t p = 0; p < dist.size(); ++p) {
        dist[p] = mask.data[p] ? 0.0 : kInf;
    }

    const int n = std::max(w, h);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);

    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) {
            f[y] = dist[static_cast<std::size_t>(y) * w + x];
        }
        dt_1d(f.data(), h, d.data(), v.data(), z.data());
        for (int y = 0; y < h; ++y) {
            dist[static_cast<std::size_t>(y) * w + x] = d[y];
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            f[x] = dist[static_cast<std::size_t>(y) * w + x];
        }
        dt_1d(f.data(), w, d.data(), v.data(), z.data());
        for (int x = 0; x < w; ++x) {
            dist[static_cast<std::size_t>(y) * w + x] = d[x];
        }
    }
    return dist;
}

}  // namespace

AttentionMap dilate_silhouette(const ImageGray& silhouette, double threshold,
                               int radius) {
    if (radius < 0) {
        throw Error("dilate_silhouette: radius must be >= 0");
    }
    if (!(threshold > 0.0) || !(threshold < 1.0)) {
        throw Error("dilate_silhouette: threshold must be in (0,1)");
    }

    AttentionMap att;
    att.dilation_radius = radius;
    att.mask = MaskImage(silhouette.width, silhouette.height, 0);
    for (std::size_t p = 0; p < silhouette.data.size(); ++p) {
        att.mask.data[p] = silhouette.data[p] > threshold ? 1 : 0;
    }
    if (radius == 0 || att.mask.count_set() == 0) {
        return att;
    }

    const std::vector<double> dist = squared_distance_transform(att.mask);
    const double r2 = static_cast<double>(radius) * radius;
    for (std::size_t p = 0; p < dist.size(); ++p) {
        att.mask.data[p] = dist[p] <= r2 ? 1 : 0;
    }
    return att;
}

AcsLoss acs_loss(const FeatureMap& f_obs, const FeatureMap& f_ren,
                 const AttentionMap& att) {
    if (!f_obs.same_shape(f_ren)) {
        throw DimensionMismatch("acs_loss: feature shapes differ");
    }
    if (att.mask.width != f_obs.width || att.mask.height != f_obs.height) {
        throw DimensionMismatch("acs_loss: attention size differs");
    }

    const int w = f_obs.width, h = f_obs.height, nc = f_obs.channels;
    const std::size_t plane = static_cast<std::size_t>(w) * h;
    constexpr double kNormEps = 1e-12;

    AcsLoss out;
    out.grad = FeatureMap(nc, w, h, 0.0);
    double sim_sum = 0.0;
    for (std::size_t p = 0; p < plane; ++p) {
        if (!att.mask.data[p]) {
            continue;
        }
        double dot = 0.0, oo = 0.0, rr = 0.0;
        for (int c = 0; c < nc; ++c) {
            const double o = f_obs.data[c * plane + p];
            const double r = f_ren.data[c * plane + p];
            dot += o * r;
            oo += o * o;
            rr += r * r;
        }
        const double no = std::sqrt(oo), nr = std::sqrt(rr);
        if (no < kNormEps || nr < kNormEps) {
            continue;  // similarity 0, gradient 0
        }
        const double sim = dot / (no * nr);
        sim_sum += sim;
        const double scale = -1.0 / (plane);
        for (int c = 0; c < nc; ++c) {
            const double o = f_obs.data[c * plane + p];
            const double r = f_ren.data[c * plane + p];
            out.grad.data[c * plane + p] =
                scale * (o / (no * nr) - sim * r / rr);
        }
    }
    out.value = 1.0 - sim_sum / static_cast<double>(plane);
    return out;
}

SmoothL1Loss smooth_l1_loss(const ImageGray& pred, const ImageGray& target,
                            double beta) {
    if (!pred.same_size(target)) {
        throw DimensionMismatch("smooth_l1_loss: image sizes differ");
    }
    if (!(beta > 0.0)) {
        throw Error("smooth_l1_loss: beta must be positive");
    }

    SmoothL1Loss out;
    out.grad = ImageGray(pred.width, pred.height);
    const double inv_n = 1.0 / static_cast<double>(pred.data.size());
    double sum = 0.0;
    for (std::size_t p = 0; p < pred.data.size(); ++p) {
        const double e = pred.data[p] - target.data[p];
        if (std::abs(e) < beta) {
            sum += 0.5 * e * e / beta;
            out.grad.data[p] = inv_n * e / beta;
        } else {
            sum += std::abs(e) - 0.5 * beta;
            out.grad.data[p] = inv_n * (e > 0 ? 1.0 : -1.0);
        }
    }
    out.value = sum * inv_n;
    return out;
}

}  // namespace kinalign
