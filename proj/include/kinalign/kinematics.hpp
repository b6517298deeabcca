#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kinalign/geometry.hpp"
#include "kinalign/mesh.hpp"

namespace kinalign {

enum class JointKind { Revolute, Prismatic };

/// One row of a classic (distal) Denavit-Hartenberg table. The joint
/// variable adds to theta_offset (revolute) or d_offset (prismatic).
struct DHRow {
    double a = 0.0;             // meters
    double alpha = 0.0;         // radians
    double d_offset = 0.0;      // meters
    double theta_offset = 0.0;  // radians
    JointKind kind = JointKind::Revolute;
};

struct JointConfig {
    std::vector<double> values;  // rad for revolute, meters for prismatic

    JointConfig() = default;
    explicit JointConfig(std::vector<double> v) : values(std::move(v)) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

/// Serial chain: DH rows, base frame, per-link meshes and joint limits.
/// Link mesh with index i rides on the frame after row i (0-based), so a
/// mesh on index i moves with joints 0..i.
struct DHChain {
    std::vector<DHRow> rows;
    RigidTransform base;  // F_B
    std::vector<std::pair<std::size_t, TriangleMesh>> link_meshes;
    std::vector<std::pair<double, double>> joint_limits;  // (lo, hi) rad or m

    std::size_t dof() const { return rows.size(); }

    /// Checks link indices and limit ordering; throws Error on violation.
    void validate() const;

    JointConfig clamp_to_limits(const JointConfig& q) const;
};

/// Frame of row `index` given joint value q: RotZ(theta) TransZ(d) TransX(a) RotX(alpha).
RigidTransform dh_transform(const DHRow& row, double q);

/// Frames of every link: out[i] = F_B * A_0 * ... * A_i.
/// Throws LengthMismatch when q.size() != chain.dof().
std::vector<RigidTransform> forward_kinematics(const DHChain& chain,
                                               const JointConfig& q);

/// Poses every link mesh by its frame and concatenates them; vertex order
/// follows chain.link_meshes order.
TriangleMesh pose_meshes(const DHChain& chain, const JointConfig& q);

/// Vector-Jacobian product of pose_meshes: given one 3-vector cotangent
/// per posed vertex, returns the pullback onto the joint vector.
/// Revolute joints use dv/dtheta_j = omega_j x (v - p_j); prismatic use
/// dv/dd_j = omega_j, where (omega_j, p_j) is the joint axis.
std::vector<double> vertex_jacobian_vjp(const DHChain& chain, const JointConfig& q,
                                        const std::vector<Vec3>& cotangents);

/// Joint axes in world coordinates: (direction, point on axis) per row.
/// Axis j is the z-axis of the frame preceding row j.
std::vector<std::pair<Vec3, Vec3>> joint_axes(const DHChain& chain,
                                              const JointConfig& q);

// --- Chain description file ------------------------------------------------
// JSON with "rows" (a, alpha, d, theta, kind; angles in degrees),
// "base" (4x4 row-major), "links" (index -> OBJ path relative to the file)
// and "limits" (degrees for revolute rows, meters for prismatic).

DHChain load_chain(const std::string& json_path);
void save_chain(const DHChain& chain, const std::string& json_path);

}  // namespace kinalign
