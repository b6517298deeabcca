#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "kinalign/errors.hpp"
#include "kinalign/geometry.hpp"
#include "kinalign/mesh.hpp"

using namespace kinalign;

namespace {

std::mt19937_64 rng(7);

double uniform(double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    return lo + u * (hi - lo);
}

Vec3 random_vec(double scale) {
    return Vec3(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale));
}

RigidTransform random_transform() {
    const Vec3 axis_angle = random_vec(kPi * 0.9);
    return RigidTransform::from_axis_angle(axis_angle, random_vec(2.0));
}

}  // namespace

TEST_CASE("compose: identity is neutral") {
    const RigidTransform x = random_transform();
    const RigidTransform left = compose(RigidTransform::identity(), x);
    const RigidTransform right = compose(x, RigidTransform::identity());
    CHECK((left.matrix() - x.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((right.matrix() - x.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("compose: transform with its inverse gives identity") {
    const RigidTransform x = random_transform();
    const RigidTransform id = compose(x, x.inverse());
    CHECK((id.matrix() - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("compose: pure translations add") {
    const RigidTransform a = RigidTransform::from_translation(Vec3(1, 0, 0));
    const RigidTransform b = RigidTransform::from_translation(Vec3(0, 2, 0));
    const RigidTransform c = compose(a, b);
    CHECK(c.translation().isApprox(Vec3(1, 2, 0), 1e-15));
    CHECK(c.rotation().isApprox(Mat3::Identity(), 1e-15));
}

TEST_CASE("compose: result applies b then a") {
    const RigidTransform a = random_transform();
    const RigidTransform b = random_transform();
    const Vec3 p = random_vec(1.0);
    CHECK(compose(a, b).apply(p).isApprox(a.apply(b.apply(p)), 1e-12));
}

TEST_CASE("compose: associative") {
    const RigidTransform a = random_transform();
    const RigidTransform b = random_transform();
    const RigidTransform c = random_transform();
    const Mat4 left = compose(compose(a, b), c).matrix();
    const Mat4 right = compose(a, compose(b, c)).matrix();
    CHECK((left - right).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("compose/inverse group laws hold on random transforms") {
    for (int i = 0; i < 200; ++i) {
        const RigidTransform x = random_transform();
        const Mat4 dev = compose(x, x.inverse()).matrix() - Mat4::Identity();
        CHECK(dev.cwiseAbs().maxCoeff() < 1e-9);
        const Mat3 r = x.rotation();
        CHECK((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("from_matrix rejects non-orthonormal rotations") {
    Mat4 m = Mat4::Identity();
    m(0, 0) = 2.0;
    CHECK_THROWS_AS(RigidTransform::from_matrix(m), Error);
}

TEST_CASE("project: on-axis point lands on the principal point") {
    PinholeCamera cam;
    cam.fx = 1; cam.fy = 1; cam.cx = 0; cam.cy = 0;
    cam.width = 640; cam.height = 480;
    CHECK(cam.project(Vec3(0, 0, 1)).isApprox(Vec2(0, 0), 1e-15));
}

TEST_CASE("project: unit offset at unit depth maps one-to-one") {
    PinholeCamera cam;
    cam.fx = 1; cam.fy = 1; cam.cx = 0; cam.cy = 0;
    cam.width = 640; cam.height = 480;
    CHECK(cam.project(Vec3(1, 0, 1)).isApprox(Vec2(1, 0), 1e-15));
}

TEST_CASE("project: matches the pinhole formula evaluated independently") {
    PinholeCamera cam;
    cam.fx = 100; cam.fy = 100; cam.cx = 320; cam.cy = 240;
    cam.width = 640; cam.height = 480;
    const Vec3 p(0.5, 0, 1);
    const double expected_x = cam.fx * p.x() / p.z() + cam.cx;
    CHECK(expected_x == doctest::Approx(370.0));
    CHECK(cam.project(p).x() == doctest::Approx(expected_x).epsilon(1e-12));
}

TEST_CASE("project: point at or behind the near plane throws") {
    PinholeCamera cam;
    cam.fx = 100; cam.fy = 100; cam.cx = 320; cam.cy = 240;
    cam.width = 640; cam.height = 480;
    CHECK_THROWS_AS(cam.project(Vec3(0, 0, 0)), BehindCamera);
    CHECK_THROWS_AS(cam.project(Vec3(0, 0, -1)), BehindCamera);
    CHECK_THROWS_AS(cam.project(Vec3(0, 0, 1e-7)), BehindCamera);
}

TEST_CASE("project applies extrinsics before the pinhole map") {
    PinholeCamera cam;
    cam.fx = 50; cam.fy = 60; cam.cx = 10; cam.cy = 20;
    cam.width = 640; cam.height = 480;
    cam.extrinsics = RigidTransform::from_translation(Vec3(0, 0, 3));
    const Vec3 world(0.2, -0.1, 1.0);
    const Vec3 in_cam = cam.extrinsics.apply(world);
    const Vec2 expected(cam.fx * in_cam.x() / in_cam.z() + cam.cx,
                        cam.fy * in_cam.y() / in_cam.z() + cam.cy);
    CHECK(cam.project(world).isApprox(expected, 1e-12));
}

TEST_CASE("projection Jacobian matches central finite differences") {
    PinholeCamera cam;
    cam.fx = 280; cam.fy = 280; cam.cx = 160; cam.cy = 120;
    cam.width = 320; cam.height = 240;
    const double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        Vec3 p = random_vec(0.5);
        p.z() = uniform(0.15, 2.0);
        const Eigen::Matrix<double, 2, 3> jac = cam.projection_jacobian(p);
        for (int k = 0; k < 3; ++k) {
            Vec3 hi = p, lo = p;
            hi[k] += h;
            lo[k] -= h;
            const Vec2 fd = (cam.project_camera_point(hi) -
                             cam.project_camera_point(lo)) / (2 * h);
            for (int r = 0; r < 2; ++r) {
                const double scale = std::max(1.0, std::abs(fd[r]));
                CHECK(std::abs(jac(r, k) - fd[r]) / scale < 1e-4);
            }
        }
    }
}

TEST_CASE("point light rejects negative intensity") {
    CHECK_THROWS_AS(PointLight(Vec3(0, 0, -1), -0.5), Error);
}

TEST_CASE("load_obj: minimal single-triangle file") {
    const TriangleMesh mesh = parse_obj(
        "# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", "inline");
    CHECK(mesh.vertex_count() == 3);
    CHECK(mesh.face_count() == 1);
    CHECK(mesh.vertices[1].isApprox(Vec3(1, 0, 0), 1e-15));
    CHECK(mesh.faces[0] == std::array<std::uint32_t, 3>{0, 1, 2});
}

TEST_CASE("load_obj: quad face is rejected") {
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n",
                              "inline"),
                    ParseError);
}

TEST_CASE("load_obj: zero face index is rejected") {
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n", "inline"),
                    IndexOutOfRange);
}

TEST_CASE("load_obj: out-of-range face index is rejected") {
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n", "inline"),
                    IndexOutOfRange);
}

TEST_CASE("load_obj: degenerate face is rejected") {
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n", "inline"),
                    DegenerateFace);
}

TEST_CASE("load_obj: malformed record is rejected") {
    CHECK_THROWS_AS(parse_obj("v 0 0\n", "inline"), ParseError);
    CHECK_THROWS_AS(parse_obj("vn 0 0 1\n", "inline"), ParseError);
}

TEST_CASE("OBJ save/load round-trips vertices bit-exactly") {
    TriangleMesh mesh;
    for (int i = 0; i < 40; ++i) {
        mesh.vertices.push_back(random_vec(3.0));
    }
    for (int i = 0; i + 2 < 40; i += 3) {
        mesh.faces.push_back({static_cast<std::uint32_t>(i),
                              static_cast<std::uint32_t>(i + 1),
                              static_cast<std::uint32_t>(i + 2)});
    }
    const TriangleMesh back = parse_obj(format_obj(mesh), "inline");
    REQUIRE(back.vertex_count() == mesh.vertex_count());
    REQUIRE(back.face_count() == mesh.face_count());
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
        CHECK(back.vertices[i].x() == mesh.vertices[i].x());
        CHECK(back.vertices[i].y() == mesh.vertices[i].y());
        CHECK(back.vertices[i].z() == mesh.vertices[i].z());
    }
    CHECK(back.faces == mesh.faces);

    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "kinalign_roundtrip.obj";
    save_obj(mesh, path.string());
    const TriangleMesh from_file = load_obj(path.string());
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
        CHECK(from_file.vertices[i].x() == mesh.vertices[i].x());
    }
    std::filesystem::remove(path);
}

TEST_CASE("load_obj: missing file raises IoError") {
    CHECK_THROWS_AS(load_obj("/nonexistent/kinalign/mesh.obj"), IoError);
}

TEST_CASE("mesh transform moves vertices and keeps faces") {
    TriangleMesh mesh = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", "inline");
    const RigidTransform t = RigidTransform::from_translation(Vec3(0, 0, 5));
    const TriangleMesh moved = mesh.transformed(t);
    CHECK(moved.vertices[0].isApprox(Vec3(0, 0, 5), 1e-15));
    CHECK(moved.faces == mesh.faces);
}

TEST_CASE("mesh append re-offsets face indices") {
    TriangleMesh a = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", "inline");
    const TriangleMesh b = parse_obj("v 0 0 1\nv 1 0 1\nv 0 1 1\nf 1 2 3\n", "inline");
    a.append(b);
    CHECK(a.vertex_count() == 6);
    REQUIRE(a.face_count() == 2);
    CHECK(a.faces[1] == std::array<std::uint32_t, 3>{3, 4, 5});
}

TEST_CASE("face normal and area of a reference triangle") {
    const TriangleMesh mesh =
        parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", "inline");
    CHECK(mesh.face_area(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mesh.face_normal(0).isApprox(Vec3(0, 0, 1), 1e-12));
}
