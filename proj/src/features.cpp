#include "kinalign/features.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "kinalign/errors.hpp"

namespace kinalign {

MeanBackground mean_background(const std::vector<ImageRgb>& images) {
    if (images.empty()) {
        throw EmptyList("mean_background: no images given");
    }
    MeanBackground bg;
    bg.image = ImageRgb(images[0].width, images[0].height, 0.0);
    for (const ImageRgb& img : images) {
        if (!img.same_size(bg.image)) {
            throw DimensionMismatch("mean_background: image sizes differ");
        }
        for (std::size_t i = 0; i < img.data.size(); ++i) {
            bg.image.data[i] += img.data[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(images.size());
    for (double& v : bg.image.data) {
        v *= inv;
    }
    return bg;
}

HybridRender compose_hybrid(const SoftRenderOutput& rendered,
                            const MeanBackground& bg) {
    const ImageRgb& img = rendered.image;
    const ImageGray& sil = rendered.silhouette;
    if (!img.same_size(bg.image) || sil.width != img.width ||
        sil.height != img.height) {
        throw DimensionMismatch("compose_hybrid: image sizes differ");
    }

    HybridRender out;
    out.image = ImageRgb(img.width, img.height);
    for (std::size_t p = 0; p < sil.data.size(); ++p) {
        const double s = sil.data[p];
        for (int c = 0; c < 3; ++c) {
            out.image.data[p * 3 + c] =
                s * img.data[p * 3 + c] + (1.0 - s) * bg.image.data[p * 3 + c];
        }
    }

    out.vjp = [img, sil, background = bg.image](const ImageRgb& cot) {
        if (!cot.same_size(img)) {
            throw DimensionMismatch("compose_hybrid vjp: cotangent size differs");
        }
        ImageRgb image_cot(img.width, img.height);
        ImageGray sil_cot(img.width, img.height);
        for (std::size_t p = 0; p < sil.data.size(); ++p) {
            double ds = 0.0;
            for (int c = 0; c < 3; ++c) {
                const double g = cot.data[p * 3 + c];
                image_cot.data[p * 3 + c] = g * sil.data[p];
                ds += g * (img.data[p * 3 + c] - background.data[p * 3 + c]);
            }
            sil_cot.data[p] = ds;
        }
        return std::make_pair(std::move(image_cot), std::move(sil_cot));
    };
    return out;
}

namespace {

constexpr double kFilterScales[3] = {1.0, 2.0, 4.0};

/// Reflect indexing without repeating the border sample (..., 2, 1, 0, 1, 2, ...).
inline int reflect(int i, int n) {
    if (n == 1) {
        return 0;
    }
    const int period = 2 * n - 2;
    i = std::abs(i) % period;
    return i < n ? i : period - i;
}

struct Kernel {
    int radius = 0;
    std::vector<double> taps;  // index radius + k, k in [-radius, radius]

    double tap(int k) const { return taps[static_cast<std::size_t>(radius + k)]; }
};

Kernel gaussian_kernel(double sigma) {
    Kernel ker;
    ker.radius = static_cast<int>(std::ceil(3.0 * sigma));
    ker.taps.resize(2 * ker.radius + 1);
    double sum = 0.0;
    for (int k = -ker.radius; k <= ker.radius; ++k) {
        const double v = std::exp(-0.5 * k * k / (sigma * sigma));
        ker.taps[ker.radius + k] = v;
        sum += v;
    }
    for (double& v : ker.taps) {
        v /= sum;
    }
    return ker;
}

/// Correlating with this kernel approximates the smoothed derivative along
/// the correlation axis (positive response to increasing values).
Kernel gaussian_derivative_kernel(double sigma) {
    const Kernel g = gaussian_kernel(sigma);
    Kernel ker = g;
    for (int k = -ker.radius; k <= ker.radius; ++k) {
        ker.taps[ker.radius + k] = g.tap(k) * static_cast<double>(k) /
                                   (sigma * sigma);
    }
    return ker;
}

/// out[x, y] = sum_k ker[k] * in[x + k, y] with reflected borders. Border
/// columns take the reflecting path; the interior runs branch-free.
void correlate_rows(const std::vector<double>& in, int w, int h,
                    const Kernel& ker, std::vector<double>& out) {
    const int r = ker.radius;
    const int lo = std::min(r, w);
    const int hi = std::max(lo, w - r);
    for (int y = 0; y < h; ++y) {
        const double* row = in.data() + static_cast<std::size_t>(y) * w;
        double* orow = out.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < lo; ++x) {
            double s = 0.0;
            for (int k = -r; k <= r; ++k) {
                s += ker.tap(k) * row[reflect(x + k, w)];
            }
            orow[x] = s;
        }
        for (int x = lo; x < hi; ++x) {
            double s = 0.0;
            for (int k = -r; k <= r; ++k) {
                s += ker.tap(k) * row[x + k];
            }
            orow[x] = s;
        }
        for (int x = hi; x < w; ++x) {
            double s = 0.0;
            for (int k = -r; k <= r; ++k) {
                s += ker.tap(k) * row[reflect(x + k, w)];
            }
            orow[x] = s;
        }
    }
}

void correlate_cols(const std::vector<double>& in, int w, int h,
                    const Kernel& ker, std::vector<double>& out) {
    const int r = ker.radius;
    for (int y = 0; y < h; ++y) {
        double* orow = out.data() + static_cast<std::size_t>(y) * w;
        std::fill(orow, orow + w, 0.0);
        for (int k = -r; k <= r; ++k) {
            const double t = ker.tap(k);
            const double* irow =
                in.data() + static_cast<std::size_t>(reflect(y + k, h)) * w;
            for (int x = 0; x < w; ++x) {
                orow[x] += t * irow[x];
            }
        }
    }
}

/// Adjoint of correlate_rows: scatter into a zero-padded row, then fold the
/// pads back onto their reflected positions.
void correlate_rows_adjoint(const std::vector<double>& cot, int w, int h,
                            const Kernel& ker, std::vector<double>& out) {
    const int r = ker.radius;
    std::vector<double> pad(static_cast<std::size_t>(w) + 2 * r);
    for (int y = 0; y < h; ++y) {
        const double* crow = cot.data() + static_cast<std::size_t>(y) * w;
        double* orow = out.data() + static_cast<std::size_t>(y) * w;
        std::fill(pad.begin(), pad.end(), 0.0);
        for (int k = -r; k <= r; ++k) {
            const double t = ker.tap(k);
            double* dst = pad.data() + (r + k);
            for (int x = 0; x < w; ++x) {
                dst[x] += t * crow[x];
            }
        }
        std::copy(pad.begin() + r, pad.begin() + r + w, orow);
        for (int j = 0; j < r; ++j) {
            orow[reflect(j - r, w)] += pad[static_cast<std::size_t>(j)];
            orow[reflect(w - 1 + r - j, w)] +=
                pad[pad.size() - 1 - static_cast<std::size_t>(j)];
        }
    }
}

void correlate_cols_adjoint(const std::vector<double>& cot, int w, int h,
                            const Kernel& ker, std::vector<double>& out) {
    const int r = ker.radius;
    std::vector<double> pad(static_cast<std::size_t>(w) * (h + 2 * r), 0.0);
    for (int y = 0; y < h; ++y) {
        const double* crow = cot.data() + static_cast<std::size_t>(y) * w;
        for (int k = -r; k <= r; ++k) {
            const double t = ker.tap(k);
            double* prow = pad.data() + static_cast<std::size_t>(y + k + r) * w;
            for (int x = 0; x < w; ++x) {
                prow[x] += t * crow[x];
            }
        }
    }
    std::copy(pad.begin() + static_cast<std::size_t>(r) * w,
              pad.begin() + static_cast<std::size_t>(r + h) * w, out.begin());
    for (int j = 0; j < r; ++j) {
        const double* top = pad.data() + static_cast<std::size_t>(j) * w;
        double* tdst =
            out.data() + static_cast<std::size_t>(reflect(j - r, h)) * w;
        const double* bot =
            pad.data() + static_cast<std::size_t>(h + 2 * r - 1 - j) * w;
        double* bdst =
            out.data() + static_cast<std::size_t>(reflect(h - 1 + r - j, h)) * w;
        for (int x = 0; x < w; ++x) {
            tdst[x] += top[x];
            bdst[x] += bot[x];
        }
    }
}

FeatureExtraction extract_identity(const ImageRgb& image) {
    FeatureExtraction out;
    out.features = FeatureMap(3, image.width, image.height);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                out.features.at(c, x, y) = image.at(x, y, c);
            }
        }
    }
    out.differentiable = true;
    const int w = image.width, h = image.height;
    out.vjp = [w, h](const FeatureMap& cot) {
        if (cot.channels != 3 || cot.width != w || cot.height != h) {
            throw DimensionMismatch("identity features vjp: shape differs");
        }
        ImageRgb g(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                for (int c = 0; c < 3; ++c) {
                    g.at(x, y, c) = cot.at(c, x, y);
                }
            }
        }
        return g;
    };
    return out;
}

FeatureExtraction extract_filterbank(const ImageRgb& image) {
    const int w = image.width, h = image.height;
    const std::size_t plane = static_cast<std::size_t>(w) * h;

    std::vector<double> lum(plane);
    for (std::size_t p = 0; p < plane; ++p) {
        lum[p] = (image.data[p * 3] + image.data[p * 3 + 1] +
                  image.data[p * 3 + 2]) / 3.0;
    }

    FeatureExtraction out;
    out.features = FeatureMap(9, w, h);
    std::vector<double> row_g(plane), row_dg(plane);
    for (int s = 0; s < 3; ++s) {
        const Kernel g = gaussian_kernel(kFilterScales[s]);
        const Kernel dg = gaussian_derivative_kernel(kFilterScales[s]);
        correlate_rows(lum, w, h, g, row_g);
        correlate_rows(lum, w, h, dg, row_dg);
        auto* base = out.features.data.data() + 3 * s * plane;
        std::vector<double> res(plane);
        correlate_cols(row_g, w, h, g, res);
        std::copy(res.begin(), res.end(), base);
        correlate_cols(row_dg, w, h, g, res);
        std::copy(res.begin(), res.end(), base + plane);
        correlate_cols(row_g, w, h, dg, res);
        std::copy(res.begin(), res.end(), base + 2 * plane);
    }

    out.differentiable = true;
    out.vjp = [w, h, plane](const FeatureMap& cot) {
        if (cot.channels != 9 || cot.width != w || cot.height != h) {
            throw DimensionMismatch("filterbank vjp: shape differs");
        }
        std::vector<double> lum_cot(plane, 0.0);
        std::vector<double> chan(plane), acc_g(plane), tmp2(plane), res2(plane);
        for (int s = 0; s < 3; ++s) {
            const Kernel g = gaussian_kernel(kFilterScales[s]);
            const Kernel dg = gaussian_derivative_kernel(kFilterScales[s]);
            const auto* base = cot.data.data() + 3 * s * plane;
            // Smooth and vertical-derivative channels share the row-g pass.
            std::copy(base, base + plane, chan.begin());
            correlate_cols_adjoint(chan, w, h, g, acc_g);
            std::copy(base + 2 * plane, base + 3 * plane, chan.begin());
            correlate_cols_adjoint(chan, w, h, dg, tmp2);
            for (std::size_t p = 0; p < plane; ++p) {
                acc_g[p] += tmp2[p];
            }
            correlate_rows_adjoint(acc_g, w, h, g, res2);
            for (std::size_t p = 0; p < plane; ++p) {
                lum_cot[p] += res2[p];
            }
            std::copy(base + plane, base + 2 * plane, chan.begin());
            correlate_cols_adjoint(chan, w, h, g, tmp2);
            correlate_rows_adjoint(tmp2, w, h, dg, res2);
            for (std::size_t p = 0; p < plane; ++p) {
                lum_cot[p] += res2[p];
            }
        }
        ImageRgb grad(w, h);
        for (std::size_t p = 0; p < plane; ++p) {
            const double v = lum_cot[p] / 3.0;
            grad.data[p * 3] = v;
            grad.data[p * 3 + 1] = v;
            grad.data[p * 3 + 2] = v;
        }
        return grad;
    };
    return out;
}

}  // namespace

void FeatureExtractorSpec::validate() const {
    if (kind != "identity" && kind != "filterbank" && kind != "external") {
        throw UnknownExtractor("unknown feature extractor: " + kind);
    }
    if (kind == "external" && external_path.empty()) {
        throw ConfigError("external feature extractor needs a path");
    }
}

FeatureExtraction extract_features(const ImageRgb& image,
                                   const FeatureExtractorSpec& spec) {
    spec.validate();
    if (spec.kind == "identity") {
        return extract_identity(image);
    }
    if (spec.kind == "filterbank") {
        return extract_filterbank(image);
    }
    FeatureExtraction out;
    out.features = load_feature_map(spec.external_path);
    if (out.features.width != image.width || out.features.height != image.height) {
        throw DimensionMismatch("external feature map size differs from image");
    }
    out.differentiable = false;
    return out;
}

void save_feature_map(const FeatureMap& map, const std::string& path) {
    ImageGray stack(map.width, map.height * map.channels);
    std::copy(map.data.begin(), map.data.end(), stack.data.begin());
    save_pfm(stack, path);

    nlohmann::json doc;
    doc["channels"] = map.channels;
    std::ofstream out(path + ".json");
    if (!out) {
        throw IoError("cannot write " + path + ".json");
    }
    out << doc.dump(2) << "\n";
}

FeatureMap load_feature_map(const std::string& path) {
    std::ifstream in(path + ".json");
    if (!in) {
        throw IoError("cannot read " + path + ".json");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ".json: " + e.what());
    }
    if (!doc.contains("channels") || !doc["channels"].is_number_integer()) {
        throw ParseError(path + ".json: missing integer \"channels\"");
    }
    const int channels = doc["channels"].get<int>();
    if (channels < 1) {
        throw ParseError(path + ".json: channels must be >= 1");
    }

    const ImageGray stack = load_pfm_gray(path);
    if (stack.height % channels != 0) {
        throw ParseError(path + ": stacked height is not divisible by channels");
    }
    FeatureMap map(channels, stack.width, stack.height / channels);
    std::copy(stack.data.begin(), stack.data.end(), map.data.begin());
    return map;
}

}  // namespace kinalign
