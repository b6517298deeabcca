#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "kinalign/errors.hpp"
#include "kinalign/features.hpp"

using namespace kinalign;

namespace {

std::mt19937_64 rng(41);

double uniform(double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    return lo + u * (hi - lo);
}

ImageRgb random_image(int w, int h) {
    ImageRgb img(w, h);
    for (auto& v : img.data) v = uniform(0, 1);
    return img;
}

SoftRenderOutput fake_render(const ImageRgb& image, const ImageGray& sil) {
    SoftRenderOutput out;
    out.image = image;
    out.silhouette = sil;
    return out;
}

/// Independent dense evaluation of one filterbank channel with the same
/// reflect rule: out = sum_{kx,ky} row[kx]*col[ky]*lum(x+kx, y+ky).
double dense_response(const ImageRgb& img, int x, int y, double sigma,
                      bool d_horizontal, bool d_vertical) {
    const int r = static_cast<int>(std::ceil(3 * sigma));
    std::vector<double> g(2 * r + 1);
    double gsum = 0.0;
    for (int k = -r; k <= r; ++k) {
        g[r + k] = std::exp(-0.5 * k * k / (sigma * sigma));
        gsum += g[r + k];
    }
    for (auto& v : g) v /= gsum;

    auto reflect = [](int i, int n) {
        if (n == 1) return 0;
        const int period = 2 * n - 2;
        i = std::abs(i) % period;
        return i < n ? i : period - i;
    };
    auto lum = [&](int px, int py) {
        px = reflect(px, img.width);
        py = reflect(py, img.height);
        return (img.at(px, py, 0) + img.at(px, py, 1) + img.at(px, py, 2)) / 3.0;
    };

    double s = 0.0;
    for (int ky = -r; ky <= r; ++ky) {
        for (int kx = -r; kx <= r; ++kx) {
            double wx = g[r + kx], wy = g[r + ky];
            if (d_horizontal) wx *= kx / (sigma * sigma);
            if (d_vertical) wy *= ky / (sigma * sigma);
            s += wx * wy * lum(x + kx, y + ky);
        }
    }
    return s;
}

}  // namespace

TEST_CASE("mean_background: single image is its own mean") {
    const ImageRgb img = random_image(6, 4);
    const MeanBackground bg = mean_background({img});
    CHECK(bg.image.data == img.data);
}

TEST_CASE("mean_background: two-point mean") {
    ImageRgb a(2, 2, 0.2), b(2, 2, 0.6);
    const MeanBackground bg = mean_background({a, b});
    for (double v : bg.image.data) {
        CHECK(v == doctest::Approx(0.4).epsilon(1e-12));
    }
}

TEST_CASE("mean_background: idempotent on copies") {
    const ImageRgb img = random_image(5, 3);
    const MeanBackground bg = mean_background({img, img, img, img});
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        CHECK(bg.image.data[i] == doctest::Approx(img.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("mean_background: error cases") {
    CHECK_THROWS_AS(mean_background({}), EmptyList);
    CHECK_THROWS_AS(mean_background({ImageRgb(2, 2), ImageRgb(3, 2)}),
                    DimensionMismatch);
}

TEST_CASE("compose_hybrid: silhouette extremes select each source") {
    const ImageRgb rendered = random_image(5, 4);
    MeanBackground bg;
    bg.image = random_image(5, 4);

    const HybridRender zero =
        compose_hybrid(fake_render(rendered, ImageGray(5, 4, 0.0)), bg);
    CHECK(zero.image.data == bg.image.data);

    const HybridRender one =
        compose_hybrid(fake_render(rendered, ImageGray(5, 4, 1.0)), bg);
    CHECK(one.image.data == rendered.data);

    MeanBackground black;
    black.image = ImageRgb(5, 4, 0.0);
    const HybridRender half = compose_hybrid(
        fake_render(ImageRgb(5, 4, 1.0), ImageGray(5, 4, 0.5)), black);
    CHECK(half.image.data[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("compose_hybrid: output bounded by inputs per channel") {
    const ImageRgb rendered = random_image(7, 5);
    MeanBackground bg;
    bg.image = random_image(7, 5);
    ImageGray sil(7, 5);
    for (auto& v : sil.data) v = uniform(0, 1);
    const HybridRender out = compose_hybrid(fake_render(rendered, sil), bg);
    for (std::size_t i = 0; i < out.image.data.size(); ++i) {
        const double lo = std::min(rendered.data[i], bg.image.data[i]);
        const double hi = std::max(rendered.data[i], bg.image.data[i]);
        CHECK(out.image.data[i] >= lo - 1e-12);
        CHECK(out.image.data[i] <= hi + 1e-12);
    }
}

TEST_CASE("compose_hybrid: dimension mismatch throws") {
    MeanBackground bg;
    bg.image = ImageRgb(4, 4);
    CHECK_THROWS_AS(
        compose_hybrid(fake_render(ImageRgb(5, 4), ImageGray(5, 4)), bg),
        DimensionMismatch);
}

TEST_CASE("compose_hybrid VJP matches finite differences") {
    const int w = 6, h = 5;
    const ImageRgb rendered = random_image(w, h);
    MeanBackground bg;
    bg.image = random_image(w, h);
    ImageGray sil(w, h);
    for (auto& v : sil.data) v = uniform(0.1, 0.9);

    const HybridRender out = compose_hybrid(fake_render(rendered, sil), bg);
    ImageRgb cot(w, h);
    for (auto& v : cot.data) v = uniform(-1, 1);
    const auto [img_cot, sil_cot] = out.vjp(cot);

    auto objective = [&](const ImageRgb& img, const ImageGray& s) {
        const HybridRender o = compose_hybrid(fake_render(img, s), bg);
        double sum = 0.0;
        for (std::size_t i = 0; i < o.image.data.size(); ++i) {
            sum += o.image.data[i] * cot.data[i];
        }
        return sum;
    };

    const double fd_h = 1e-6;
    for (std::size_t i = 0; i < rendered.data.size(); i += 5) {
        ImageRgb hi = rendered, lo = rendered;
        hi.data[i] += fd_h;
        lo.data[i] -= fd_h;
        const double fd = (objective(hi, sil) - objective(lo, sil)) / (2 * fd_h);
        CHECK(img_cot.data[i] == doctest::Approx(fd).epsilon(1e-6));
    }
    for (std::size_t i = 0; i < sil.data.size(); i += 3) {
        ImageGray hi = sil, lo = sil;
        hi.data[i] += fd_h;
        lo.data[i] -= fd_h;
        const double fd =
            (objective(rendered, hi) - objective(rendered, lo)) / (2 * fd_h);
        CHECK(sil_cot.data[i] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("identity extractor returns the raw channels") {
    const ImageRgb img = random_image(6, 4);
    const FeatureExtraction out = extract_features(img, {"identity", ""});
    REQUIRE(out.features.channels == 3);
    CHECK(out.differentiable);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 6; ++x) {
            for (int c = 0; c < 3; ++c) {
                CHECK(out.features.at(c, x, y) == img.at(x, y, c));
            }
        }
    }
}

TEST_CASE("filterbank on a constant image has zero derivative channels") {
    const ImageRgb img(10, 8, 0.37);
    const FeatureExtraction out = extract_features(img, {"filterbank", ""});
    REQUIRE(out.features.channels == 9);
    for (int s = 0; s < 3; ++s) {
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 10; ++x) {
                CHECK(out.features.at(3 * s, x, y) ==
                      doctest::Approx(0.37).epsilon(1e-12));
                CHECK(out.features.at(3 * s + 1, x, y) ==
                      doctest::Approx(0.0).epsilon(1e-12));
                CHECK(out.features.at(3 * s + 2, x, y) ==
                      doctest::Approx(0.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("filterbank matches a dense convolution oracle on a step edge") {
    ImageRgb img(16, 16, 0.0);
    for (int y = 0; y < 16; ++y) {
        for (int x = 8; x < 16; ++x) {
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = 1.0;
        }
    }
    const FeatureExtraction out = extract_features(img, {"filterbank", ""});

    const double scales[3] = {1, 2, 4};
    for (int s = 0; s < 3; ++s) {
        for (int y = 4; y < 12; y += 3) {
            for (int x = 0; x < 16; ++x) {
                CHECK(out.features.at(3 * s, x, y) ==
                      doctest::Approx(dense_response(img, x, y, scales[s],
                                                     false, false))
                          .epsilon(1e-10));
                CHECK(out.features.at(3 * s + 1, x, y) ==
                      doctest::Approx(dense_response(img, x, y, scales[s],
                                                     true, false))
                          .epsilon(1e-10));
                CHECK(out.features.at(3 * s + 2, x, y) ==
                      doctest::Approx(dense_response(img, x, y, scales[s],
                                                     false, true))
                          .epsilon(1e-10));
            }
        }
        // Horizontal derivative at sigma=1 peaks at the edge, vanishes away.
        if (s == 0) {
            const double at_edge = std::abs(out.features.at(1, 7, 8)) +
                                   std::abs(out.features.at(1, 8, 8));
            CHECK(at_edge > 0.2);
            CHECK(std::abs(out.features.at(1, 1, 8)) < 1e-6);
            CHECK(std::abs(out.features.at(1, 14, 8)) < 1e-6);
            // Rising edge gives a positive horizontal derivative.
            CHECK(out.features.at(1, 7, 8) > 0.0);
        }
    }
}

TEST_CASE("built-in extractors are linear") {
    for (const char* kind : {"identity", "filterbank"}) {
        const ImageRgb x = random_image(9, 7), y = random_image(9, 7);
        const double alpha = 0.7, beta = -1.3;
        ImageRgb mix(9, 7);
        for (std::size_t i = 0; i < mix.data.size(); ++i) {
            mix.data[i] = alpha * x.data[i] + beta * y.data[i];
        }
        const FeatureExtractorSpec spec{kind, ""};
        const FeatureMap fx = extract_features(x, spec).features;
        const FeatureMap fy = extract_features(y, spec).features;
        const FeatureMap fm = extract_features(mix, spec).features;
        for (std::size_t i = 0; i < fm.data.size(); ++i) {
            CHECK(std::abs(fm.data[i] - alpha * fx.data[i] - beta * fy.data[i]) <
                  1e-6);
        }
    }
}

TEST_CASE("extractor VJPs are exact adjoints and match finite differences") {
    for (const char* kind : {"identity", "filterbank"}) {
        const FeatureExtractorSpec spec{kind, ""};
        const ImageRgb img = random_image(8, 6);
        const FeatureExtraction out = extract_features(img, spec);
        REQUIRE(out.differentiable);

        FeatureMap cot(out.features.channels, 8, 6);
        for (auto& v : cot.data) v = uniform(-1, 1);
        const ImageRgb grad = out.vjp(cot);

        // Adjoint identity <cot, F(img)> = <vjp(cot), img> for linear F.
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < cot.data.size(); ++i) {
            lhs += cot.data[i] * out.features.data[i];
        }
        for (std::size_t i = 0; i < img.data.size(); ++i) {
            rhs += grad.data[i] * img.data[i];
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

        const double h = 1e-6;
        for (std::size_t i = 0; i < img.data.size(); i += 7) {
            ImageRgb hi = img, lo = img;
            hi.data[i] += h;
            lo.data[i] -= h;
            double fd = 0.0;
            const FeatureMap fh = extract_features(hi, spec).features;
            const FeatureMap fl = extract_features(lo, spec).features;
            for (std::size_t j = 0; j < cot.data.size(); ++j) {
                fd += cot.data[j] * (fh.data[j] - fl.data[j]) / (2 * h);
            }
            const double scale = std::max({1.0, std::abs(fd), std::abs(grad.data[i])});
            CHECK(std::abs(grad.data[i] - fd) / scale < 1e-4);
        }
    }
}

TEST_CASE("unknown extractor is rejected") {
    CHECK_THROWS_AS(extract_features(ImageRgb(4, 4), {"resnet", ""}),
                    UnknownExtractor);
}

TEST_CASE("external feature maps round-trip through PFM stacks") {
    FeatureMap map(5, 7, 6);
    for (auto& v : map.data) v = uniform(-2, 2);
    const auto dir = std::filesystem::temp_directory_path();
    const std::string path = (dir / "kinalign_features.pfm").string();
    save_feature_map(map, path);

    const FeatureMap back = load_feature_map(path);
    REQUIRE(back.channels == 5);
    REQUIRE(back.width == 7);
    REQUIRE(back.height == 6);
    for (std::size_t i = 0; i < map.data.size(); ++i) {
        CHECK(back.data[i] ==
              static_cast<double>(static_cast<float>(map.data[i])));
    }

    const FeatureExtraction ext =
        extract_features(ImageRgb(7, 6), {"external", path});
    CHECK_FALSE(ext.differentiable);
    CHECK(ext.features.channels == 5);

    CHECK_THROWS_AS(extract_features(ImageRgb(9, 6), {"external", path}),
                    DimensionMismatch);
    std::filesystem::remove(path);
    std::filesystem::remove(path + ".json");
}
