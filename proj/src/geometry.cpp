#include "kinalign/geometry.hpp"

#include <cmath>

#include "kinalign/errors.hpp"

namespace kinalign {

namespace {

void check_rotation(const Mat3& r) {
    const Mat3 gram = r.transpose() * r;
    if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6) {
        throw Error("RigidTransform: rotation is not orthonormal");
    }
    if (std::abs(r.determinant() - 1.0) > 1e-6) {
        throw Error("RigidTransform: rotation determinant is not +1");
    }
}

}  // namespace

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
    check_rotation(rotation_);
}

RigidTransform RigidTransform::from_axis_angle(const Vec3& axis_angle,
                                               const Vec3& translation) {
    const double angle = axis_angle.norm();
    if (angle < 1e-15) {
        return RigidTransform(Mat3::Identity(), translation);
    }
    const Eigen::AngleAxisd aa(angle, axis_angle / angle);
    return RigidTransform(aa.toRotationMatrix(), translation);
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
    if (std::abs(m(3, 0)) > 1e-12 || std::abs(m(3, 1)) > 1e-12 ||
        std::abs(m(3, 2)) > 1e-12 || std::abs(m(3, 3) - 1.0) > 1e-9) {
        throw Error("RigidTransform: bottom row of 4x4 matrix must be [0 0 0 1]");
    }
    return RigidTransform(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

Mat4 RigidTransform::matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation_;
    m.topRightCorner<3, 1>() = translation_;
    return m;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
    const Mat3 r = a.rotation() * b.rotation();
    const Vec3 t = a.rotation() * b.translation() + a.translation();
    return RigidTransform(r, t);
}

PinholeCamera::PinholeCamera(double fx_, double fy_, double cx_, double cy_,
                             int width_, int height_, RigidTransform extrinsics_)
    : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(width_), height(height_),
      extrinsics(std::move(extrinsics_)) {
    if (fx <= 0.0 || fy <= 0.0) {
        throw Error("PinholeCamera: focal lengths must be positive");
    }
    if (width < 1 || height < 1) {
        throw Error("PinholeCamera: image size must be at least 1x1");
    }
}

Vec2 PinholeCamera::project(const Vec3& world_point) const {
    return project_camera_point(to_camera(world_point));
}

Vec2 PinholeCamera::project_camera_point(const Vec3& p) const {
    if (p.z() <= kNearClip) {
        throw BehindCamera("project: point at or behind the near plane");
    }
    return Vec2(fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy);
}

Eigen::Matrix<double, 2, 3> PinholeCamera::projection_jacobian(const Vec3& p) const {
    if (p.z() <= kNearClip) {
        throw BehindCamera("projection_jacobian: point at or behind the near plane");
    }
    const double inv_z = 1.0 / p.z();
    Eigen::Matrix<double, 2, 3> j;
    j << fx * inv_z, 0.0, -fx * p.x() * inv_z * inv_z,
         0.0, fy * inv_z, -fy * p.y() * inv_z * inv_z;
    return j;
}

double PinholeCamera::image_diagonal() const {
    return std::sqrt(static_cast<double>(width) * width +
                     static_cast<double>(height) * height);
}

PointLight::PointLight(const Vec3& position_, double intensity_)
    : position(position_), intensity(intensity_) {
    if (intensity < 0.0) {
        throw Error("PointLight: intensity must be >= 0");
    }
}

}  // namespace kinalign
