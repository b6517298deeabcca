#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace kinalign {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Proper rigid motion x -> R*x + t. Rotation is kept orthonormal with
/// det +1; construction validates within 1e-6.
class RigidTransform {
public:
    RigidTransform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
    RigidTransform(const Mat3& rotation, const Vec3& translation);

    static RigidTransform identity() { return RigidTransform(); }
    static RigidTransform from_translation(const Vec3& t) {
        return RigidTransform(Mat3::Identity(), t);
    }
    /// Rodrigues: rotation about `axis_angle` direction by its norm (rad).
    static RigidTransform from_axis_angle(const Vec3& axis_angle,
                                          const Vec3& translation = Vec3::Zero());
    static RigidTransform from_matrix(const Mat4& m);

    const Mat3& rotation() const { return rotation_; }
    const Vec3& translation() const { return translation_; }

    Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
    RigidTransform inverse() const {
        return RigidTransform(rotation_.transpose(),
                              -(rotation_.transpose() * translation_));
    }

    Mat4 matrix() const;

private:
    Mat3 rotation_;
    Vec3 translation_;
};

/// Applies b first, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
    return compose(a, b);
}

/// Pinhole camera. Convention: +z forward, +x right, +y down, pixel (0,0)
/// at the top-left corner; pixel centers sit at integer + 0.5 coordinates.
struct PinholeCamera {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 1;
    int height = 1;
    RigidTransform extrinsics;  // world -> camera

    PinholeCamera() = default;
    PinholeCamera(double fx_, double fy_, double cx_, double cy_, int width_,
                  int height_, RigidTransform extrinsics_ = RigidTransform());

    Vec3 to_camera(const Vec3& world_point) const { return extrinsics.apply(world_point); }

    /// Projects a world point to pixel coordinates.
    /// Throws BehindCamera when the camera-frame z <= 1e-6 m.
    Vec2 project(const Vec3& world_point) const;

    /// Projects a camera-frame point directly.
    Vec2 project_camera_point(const Vec3& cam_point) const;

    /// 2x3 Jacobian of project_camera_point w.r.t. the camera-frame point.
    Eigen::Matrix<double, 2, 3> projection_jacobian(const Vec3& cam_point) const;

    double image_diagonal() const;
};

struct PointLight {
    Vec3 position = Vec3(0.0, 0.0, -1.0);  // camera frame, meters
    double intensity = 1.0;                // >= 0

    PointLight() = default;
    PointLight(const Vec3& position_, double intensity_);
};

/// Minimum z (camera frame, meters) for a point to count as in front.
inline constexpr double kNearClip = 1e-6;

}  // namespace kinalign
