#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "kinalign/errors.hpp"
#include "kinalign/scenegen.hpp"

using namespace kinalign;

namespace {

ImageRgb test_image(int w, int h) {
    ImageRgb img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.at(x, y, 0) = (x + 0.5) / w;
            img.at(x, y, 1) = (y + 0.5) / h;
            img.at(x, y, 2) = 0.8;
        }
    }
    return img;
}

MaskImage stripe_mask(int w, int h) {
    MaskImage m(w, h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = w / 3; x < 2 * w / 3; ++x) {
            m.at(x, y) = 1;
        }
    }
    return m;
}

std::vector<char> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<char>(std::istreambuf_iterator<char>(in),
                             std::istreambuf_iterator<char>());
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("kinalign_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("generate_trajectory: one frame stays within joint limits") {
    const DHChain chain = demo_chain();
    const auto traj = generate_trajectory(chain, 1, 3);
    REQUIRE(traj.size() == 1);
    REQUIRE(traj[0].size() == chain.dof());
    for (std::size_t j = 0; j < chain.dof(); ++j) {
        CHECK(traj[0][j] >= chain.joint_limits[j].first);
        CHECK(traj[0][j] <= chain.joint_limits[j].second);
    }
}

TEST_CASE("generate_trajectory: same seed reproduces the trajectory") {
    const DHChain chain = demo_chain();
    const auto a = generate_trajectory(chain, 25, 17);
    const auto b = generate_trajectory(chain, 25, 17);
    REQUIRE(a.size() == b.size());
    for (std::size_t f = 0; f < a.size(); ++f) {
        CHECK(a[f].values == b[f].values);
    }
    const auto c = generate_trajectory(chain, 25, 18);
    CHECK(a[0].values != c[0].values);
}

TEST_CASE("generate_trajectory: 300 frames never leave the limits") {
    const DHChain chain = demo_chain();
    const auto traj = generate_trajectory(chain, 300, 11);
    REQUIRE(traj.size() == 300);
    for (const JointConfig& q : traj) {
        for (std::size_t j = 0; j < chain.dof(); ++j) {
            CHECK(q[j] >= chain.joint_limits[j].first);
            CHECK(q[j] <= chain.joint_limits[j].second);
        }
    }
}

TEST_CASE("perturb_joints: magnitude zero is the identity") {
    const DHChain chain = demo_chain();
    const JointConfig q = generate_trajectory(chain, 1, 5)[0];
    CHECK(perturb_joints(q, chain, 0.0, 99).values == q.values);
}

TEST_CASE("perturb_joints: offsets respect the magnitude bound") {
    const DHChain chain = demo_chain();
    const JointConfig q = generate_trajectory(chain, 1, 5)[0];
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const JointConfig p = perturb_joints(q, chain, 1.0, seed);
        for (std::size_t j = 0; j < chain.dof(); ++j) {
            const double bound = chain.rows[j].kind == JointKind::Prismatic
                                     ? 1.0 / 100.0
                                     : deg_to_rad(1.0);
            CHECK(std::abs(p[j] - q[j]) <= bound);
        }
    }
}

TEST_CASE("perturb_joints: revolute MAE over 1000 draws matches E|U(-2,2)|") {
    const DHChain chain = demo_chain();
    const JointConfig q = generate_trajectory(chain, 1, 5)[0];
    double sum = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const JointConfig p = perturb_joints(q, chain, 2.0, seed);
        for (std::size_t j = 0; j < chain.dof(); ++j) {
            if (chain.rows[j].kind != JointKind::Revolute) continue;
            sum += rad_to_deg(std::abs(p[j] - q[j]));
            ++count;
        }
    }
    CHECK(sum / count == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("perturb_joints: signed mean vanishes within 3 sigma") {
    const DHChain chain = demo_chain();
    const JointConfig q = generate_trajectory(chain, 1, 5)[0];
    const int n = 10000;
    double sum = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < n; ++seed) {
        const JointConfig p = perturb_joints(q, chain, 2.0, seed);
        for (std::size_t j = 0; j < chain.dof(); ++j) {
            if (chain.rows[j].kind != JointKind::Revolute) continue;
            sum += rad_to_deg(p[j] - q[j]);
            ++count;
        }
    }
    // std of U(-2,2) is 2/sqrt(3); the sample-mean std shrinks by sqrt(count).
    const double sigma_mean = 2.0 / std::sqrt(3.0) / std::sqrt(count);
    CHECK(std::abs(sum / count) < 3.0 * sigma_mean);
}

TEST_CASE("corrupt: regular passes the image through bit-equal") {
    const ImageRgb img = test_image(24, 18);
    const MaskImage mask = stripe_mask(24, 18);
    DomainSpec spec;
    spec.kind = DomainKind::Regular;
    CHECK(corrupt(img, mask, spec).data == img.data);
}

TEST_CASE("corrupt: low brightness scales exactly") {
    ImageRgb img(4, 3, 0.8);
    const MaskImage mask(4, 3, 0);
    DomainSpec spec;
    spec.kind = DomainKind::LowBrightness;
    spec.brightness_scale = 0.5;
    const ImageRgb out = corrupt(img, mask, spec);
    for (double v : out.data) {
        CHECK(v == 0.8 * 0.5);
    }
}

TEST_CASE("corrupt: zero-opacity smoke is the identity") {
    const ImageRgb img = test_image(24, 18);
    const MaskImage mask = stripe_mask(24, 18);
    DomainSpec spec;
    spec.kind = DomainKind::Smoke;
    spec.smoke_opacity = 0.0;
    spec.seed = 12;
    CHECK(corrupt(img, mask, spec).data == img.data);
}

TEST_CASE("corrupt: deterministic and clamped to [0,1] for every domain") {
    const ImageRgb img = test_image(32, 24);
    const MaskImage mask = stripe_mask(32, 24);
    for (DomainKind kind : {DomainKind::Regular, DomainKind::LowBrightness,
                            DomainKind::Smoke, DomainKind::Blood,
                            DomainKind::BackgroundChange}) {
        DomainSpec spec;
        spec.kind = kind;
        spec.seed = 77;
        const ImageRgb a = corrupt(img, mask, spec);
        const ImageRgb b = corrupt(img, mask, spec);
        CHECK(a.data == b.data);
        for (double v : a.data) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("corrupt: blood never touches tool pixels") {
    const ImageRgb img = test_image(32, 24);
    const MaskImage mask = stripe_mask(32, 24);
    DomainSpec spec;
    spec.kind = DomainKind::Blood;
    spec.blob_count = 12;
    spec.blob_radius_px = 6;
    spec.seed = 3;
    const ImageRgb out = corrupt(img, mask, spec);
    bool changed_bg = false;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                if (mask.at(x, y)) {
                    CHECK(out.at(x, y, c) == img.at(x, y, c));
                } else if (out.at(x, y, c) != img.at(x, y, c)) {
                    changed_bg = true;
                }
            }
        }
    }
    CHECK(changed_bg);
}

TEST_CASE("corrupt: background change replaces exactly the non-tool pixels") {
    const ImageRgb img = test_image(32, 24);
    const MaskImage mask = stripe_mask(32, 24);
    DomainSpec spec;
    spec.kind = DomainKind::BackgroundChange;
    spec.background_id = "alt";
    spec.seed = 3;
    const ImageRgb out = corrupt(img, mask, spec);
    const ImageRgb alt = make_background("alt", img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                const double want =
                    mask.at(x, y) ? img.at(x, y, c) : alt.at(x, y, c);
                CHECK(out.at(x, y, c) == want);
            }
        }
    }
}

TEST_CASE("domain_from_string rejects unknown names") {
    CHECK(domain_from_string("smoke") == DomainKind::Smoke);
    CHECK_THROWS_AS(domain_from_string("fog"), UnknownDomain);
}

TEST_CASE("make_background: deterministic, in range, id-sensitive") {
    const ImageRgb a = make_background("default", 40, 30);
    const ImageRgb b = make_background("default", 40, 30);
    const ImageRgb c = make_background("alt", 40, 30);
    CHECK(a.data == b.data);
    CHECK(a.data != c.data);
    for (double v : a.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("generate_dataset: manifest round-trip with existing files") {
    const TempDir dir("dataset");
    const DHChain chain = demo_chain();
    DomainSpec spec;
    spec.kind = DomainKind::Regular;
    const DatasetManifest manifest =
        generate_dataset(chain, demo_camera(), demo_light(), 3, 1.0, spec, 21,
                         dir.path.string());
    REQUIRE(manifest.frames.size() == 3);
    const std::string manifest_path = (dir.path / "manifest.json").string();
    const DatasetManifest loaded = load_manifest(manifest_path);
    REQUIRE(loaded.frames.size() == 3);
    for (std::size_t f = 0; f < loaded.frames.size(); ++f) {
        CHECK(std::filesystem::exists(loaded.frames[f].observed));
        CHECK(std::filesystem::exists(loaded.frames[f].observed_pfm));
        CHECK(std::filesystem::exists(loaded.frames[f].mask));
        CHECK(loaded.frames[f].gt_joints.values ==
              manifest.frames[f].gt_joints.values);
        CHECK(loaded.frames[f].measured_joints.values ==
              manifest.frames[f].measured_joints.values);
    }
}

TEST_CASE("generate_dataset: rerunning a seed is bit-identical") {
    const TempDir dir_a("rerun_a");
    const TempDir dir_b("rerun_b");
    const DHChain chain = demo_chain();
    DomainSpec spec;
    spec.kind = DomainKind::Smoke;
    spec.seed = 4;
    const DatasetManifest a = generate_dataset(
        chain, demo_camera(), demo_light(), 2, 1.0, spec, 4, dir_a.path.string());
    const DatasetManifest b = generate_dataset(
        chain, demo_camera(), demo_light(), 2, 1.0, spec, 4, dir_b.path.string());
    REQUIRE(a.frames.size() == b.frames.size());
    for (std::size_t f = 0; f < a.frames.size(); ++f) {
        CHECK(read_bytes(a.frames[f].observed) == read_bytes(b.frames[f].observed));
        CHECK(read_bytes(a.frames[f].observed_pfm) ==
              read_bytes(b.frames[f].observed_pfm));
        CHECK(read_bytes(a.frames[f].mask) == read_bytes(b.frames[f].mask));
    }
}

TEST_CASE("generate_dataset: domains replay identical ground truth") {
    const TempDir dir_a("replay_reg");
    const TempDir dir_b("replay_smoke");
    const DHChain chain = demo_chain();
    DomainSpec regular;
    regular.kind = DomainKind::Regular;
    DomainSpec smoke;
    smoke.kind = DomainKind::Smoke;
    smoke.seed = 9;
    const DatasetManifest a = generate_dataset(
        chain, demo_camera(), demo_light(), 3, 1.0, regular, 9, dir_a.path.string());
    const DatasetManifest b = generate_dataset(
        chain, demo_camera(), demo_light(), 3, 1.0, smoke, 9, dir_b.path.string());
    REQUIRE(a.frames.size() == b.frames.size());
    bool any_pixel_differs = false;
    for (std::size_t f = 0; f < a.frames.size(); ++f) {
        CHECK(a.frames[f].gt_joints.values == b.frames[f].gt_joints.values);
        CHECK(a.frames[f].measured_joints.values ==
              b.frames[f].measured_joints.values);
        CHECK(read_bytes(a.frames[f].mask) == read_bytes(b.frames[f].mask));
        if (read_bytes(a.frames[f].observed) != read_bytes(b.frames[f].observed)) {
            any_pixel_differs = true;
        }
    }
    CHECK(any_pixel_differs);
}

TEST_CASE("demo chain is the documented 6-DOF tool") {
    const DHChain chain = demo_chain();
    chain.validate();
    REQUIRE(chain.dof() == 6);
    const JointKind want[6] = {JointKind::Revolute,  JointKind::Revolute,
                               JointKind::Prismatic, JointKind::Revolute,
                               JointKind::Revolute,  JointKind::Revolute};
    for (int j = 0; j < 6; ++j) {
        CHECK(chain.rows[j].kind == want[j]);
    }
    const PinholeCamera cam = demo_camera();
    CHECK(cam.width == 320);
    CHECK(cam.height == 240);
}
