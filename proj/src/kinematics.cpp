#include "kinalign/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "kinalign/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace kinalign {

void DHChain::validate() const {
    for (const auto& [index, mesh] : link_meshes) {
        if (index >= rows.size()) {
            throw Error("DHChain: link index " + std::to_string(index) +
                        " out of range for " + std::to_string(rows.size()) + " rows");
        }
        mesh.validate();
    }
    if (joint_limits.size() != rows.size()) {
        throw Error("DHChain: limits count does not match row count");
    }
    for (std::size_t i = 0; i < joint_limits.size(); ++i) {
        if (!(joint_limits[i].first < joint_limits[i].second)) {
            throw Error("DHChain: joint " + std::to_string(i) + " has lo >= hi");
        }
    }
}

JointConfig DHChain::clamp_to_limits(const JointConfig& q) const {
    if (q.size() != rows.size()) {
        throw LengthMismatch("clamp_to_limits: joint vector length mismatch");
    }
    JointConfig out = q;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out[i] = std::clamp(out[i], joint_limits[i].first, joint_limits[i].second);
    }
    return out;
}

RigidTransform dh_transform(const DHRow& row, double q) {
    const double theta = row.theta_offset + (row.kind == JointKind::Revolute ? q : 0.0);
    const double d = row.d_offset + (row.kind == JointKind::Prismatic ? q : 0.0);
    const double ct = std::cos(theta), st = std::sin(theta);
    const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
    Mat3 r;
    r << ct, -st * ca, st * sa,
         st, ct * ca, -ct * sa,
         0.0, sa, ca;
    return RigidTransform(r, Vec3(row.a * ct, row.a * st, d));
}

std::vector<RigidTransform> forward_kinematics(const DHChain& chain,
                                               const JointConfig& q) {
    if (q.size() != chain.dof()) {
        throw LengthMismatch("forward_kinematics: expected " +
                             std::to_string(chain.dof()) + " joint values, got " +
                             std::to_string(q.size()));
    }
    std::vector<RigidTransform> frames;
    frames.reserve(chain.dof());
    RigidTransform current = chain.base;
    for (std::size_t i = 0; i < chain.rows.size(); ++i) {
        current = current * dh_transform(chain.rows[i], q[i]);
        frames.push_back(current);
    }
    return frames;
}

std::vector<std::pair<Vec3, Vec3>> joint_axes(const DHChain& chain,
                                              const JointConfig& q) {
    const auto frames = forward_kinematics(chain, q);
    std::vector<std::pair<Vec3, Vec3>> axes;
    axes.reserve(chain.dof());
    for (std::size_t j = 0; j < chain.dof(); ++j) {
        const RigidTransform& parent = j == 0 ? chain.base : frames[j - 1];
        axes.emplace_back(parent.rotation().col(2), parent.translation());
    }
    return axes;
}

TriangleMesh pose_meshes(const DHChain& chain, const JointConfig& q) {
    const auto frames = forward_kinematics(chain, q);
    TriangleMesh merged;
    for (const auto& [index, mesh] : chain.link_meshes) {
        merged.append(mesh.transformed(frames[index]));
    }
    return merged;
}

std::vector<double> vertex_jacobian_vjp(const DHChain& chain, const JointConfig& q,
                                        const std::vector<Vec3>& cotangents) {
    const auto frames = forward_kinematics(chain, q);
    const auto axes = joint_axes(chain, q);

    std::size_t total_vertices = 0;
    for (const auto& [index, mesh] : chain.link_meshes) {
        total_vertices += mesh.vertex_count();
    }
    if (cotangents.size() != total_vertices) {
        throw LengthMismatch("vertex_jacobian_vjp: expected " +
                             std::to_string(total_vertices) + " cotangents, got " +
                             std::to_string(cotangents.size()));
    }

    std::vector<double> grad(chain.dof(), 0.0);
    std::size_t cursor = 0;
    for (const auto& [link, mesh] : chain.link_meshes) {
        const RigidTransform& frame = frames[link];
        for (const Vec3& local : mesh.vertices) {
            const Vec3 world = frame.apply(local);
            const Vec3& cot = cotangents[cursor++];
            // Joints downstream of this link (j > link) do not move it.
            for (std::size_t j = 0; j <= link; ++j) {
                const auto& [omega, origin] = axes[j];
                if (chain.rows[j].kind == JointKind::Revolute) {
                    grad[j] += cot.dot(omega.cross(world - origin));
                } else {
                    grad[j] += cot.dot(omega);
                }
            }
        }
    }
    return grad;
}

// --- Chain description file ------------------------------------------------

namespace {

JointKind parse_kind(const std::string& s) {
    if (s == "revolute") return JointKind::Revolute;
    if (s == "prismatic") return JointKind::Prismatic;
    throw ConfigError("chain file: unknown joint kind '" + s + "'");
}

}  // namespace

DHChain load_chain(const std::string& json_path) {
    std::ifstream in(json_path);
    if (!in) {
        throw IoError("load_chain: cannot open " + json_path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("load_chain: " + json_path + ": " + e.what());
    }

    DHChain chain;
    try {
        for (const auto& row : doc.at("rows")) {
            DHRow r;
            r.a = row.at("a").get<double>();
            r.alpha = deg_to_rad(row.at("alpha").get<double>());
            r.d_offset = row.at("d").get<double>();
            r.theta_offset = deg_to_rad(row.at("theta").get<double>());
            r.kind = parse_kind(row.at("kind").get<std::string>());
            chain.rows.push_back(r);
        }
        const auto& base = doc.at("base");
        if (base.size() != 16) {
            throw ConfigError("chain file: base must be 16 row-major numbers");
        }
        Mat4 m;
        for (int i = 0; i < 16; ++i) {
            m(i / 4, i % 4) = base.at(i).get<double>();
        }
        chain.base = RigidTransform::from_matrix(m);

        const fs::path dir = fs::path(json_path).parent_path();
        for (const auto& [key, value] : doc.at("links").items()) {
            const auto index = static_cast<std::size_t>(std::stoul(key));
            const fs::path mesh_path = dir / value.get<std::string>();
            chain.link_meshes.emplace_back(index, load_obj(mesh_path.string()));
        }
        std::sort(chain.link_meshes.begin(), chain.link_meshes.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        for (const auto& lim : doc.at("limits")) {
            if (lim.size() != 2) {
                throw ConfigError("chain file: each limit must be [lo, hi]");
            }
            chain.joint_limits.emplace_back(lim.at(0).get<double>(),
                                            lim.at(1).get<double>());
        }
        // Limits are degrees for revolute joints in the file, radians inside.
        for (std::size_t i = 0; i < chain.joint_limits.size(); ++i) {
            if (i < chain.rows.size() && chain.rows[i].kind == JointKind::Revolute) {
                chain.joint_limits[i].first = deg_to_rad(chain.joint_limits[i].first);
                chain.joint_limits[i].second = deg_to_rad(chain.joint_limits[i].second);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError("load_chain: " + json_path + ": " + e.what());
    }

    chain.validate();
    return chain;
}

void save_chain(const DHChain& chain, const std::string& json_path) {
    chain.validate();
    const fs::path path(json_path);
    const fs::path dir = path.parent_path();
    const fs::path mesh_dir = dir / "meshes";
    std::error_code ec;
    fs::create_directories(mesh_dir, ec);

    json doc;
    doc["rows"] = json::array();
    for (const DHRow& r : chain.rows) {
        doc["rows"].push_back({{"a", r.a},
                               {"alpha", rad_to_deg(r.alpha)},
                               {"d", r.d_offset},
                               {"theta", rad_to_deg(r.theta_offset)},
                               {"kind", r.kind == JointKind::Revolute ? "revolute"
                                                                      : "prismatic"}});
    }
    doc["base"] = json::array();
    const Mat4 m = chain.base.matrix();
    for (int i = 0; i < 16; ++i) {
        doc["base"].push_back(m(i / 4, i % 4));
    }
    doc["links"] = json::object();
    for (const auto& [index, mesh] : chain.link_meshes) {
        const std::string name = "meshes/link" + std::to_string(index) + ".obj";
        save_obj(mesh, (dir / name).string());
        doc["links"][std::to_string(index)] = name;
    }
    doc["limits"] = json::array();
    for (std::size_t i = 0; i < chain.joint_limits.size(); ++i) {
        auto [lo, hi] = chain.joint_limits[i];
        if (chain.rows[i].kind == JointKind::Revolute) {
            lo = rad_to_deg(lo);
            hi = rad_to_deg(hi);
        }
        doc["limits"].push_back({lo, hi});
    }

    std::ofstream out(json_path);
    if (!out) {
        throw IoError("save_chain: cannot open " + json_path + " for writing");
    }
    out << doc.dump(2) << "\n";
}

}  // namespace kinalign
