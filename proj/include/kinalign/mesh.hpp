#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kinalign/geometry.hpp"

namespace kinalign {

/// Indexed triangle mesh. Vertices in meters; faces are triples of
/// 0-based vertex indices. Valid meshes have in-range indices and no
/// face with area <= 1e-12 m^2.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t face_count() const { return faces.size(); }

    Vec3 face_normal(std::size_t face) const;
    double face_area(std::size_t face) const;

    /// Throws IndexOutOfRange / DegenerateFace on invariant violations.
    void validate() const;

    TriangleMesh transformed(const RigidTransform& t) const;

    /// Appends `other`, re-offsetting its face indices.
    void append(const TriangleMesh& other);
};

/// Reads the OBJ subset: `v x y z`, `f i j k` (1-based, triangles only)
/// and `#` comments. Validates invariants after load.
TriangleMesh load_obj(const std::string& path);

/// Parses OBJ text (same subset as load_obj).
TriangleMesh parse_obj(const std::string& text, const std::string& origin = "<string>");

/// Writes the same subset; vertex coordinates round-trip bit-exactly.
void save_obj(const TriangleMesh& mesh, const std::string& path);

std::string format_obj(const TriangleMesh& mesh);

}  // namespace kinalign
