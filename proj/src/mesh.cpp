#include "kinalign/mesh.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "kinalign/errors.hpp"

namespace kinalign {

Vec3 TriangleMesh::face_normal(std::size_t face) const {
    const auto& f = faces[face];
    const Vec3 e1 = vertices[f[1]] - vertices[f[0]];
    const Vec3 e2 = vertices[f[2]] - vertices[f[0]];
    const Vec3 n = e1.cross(e2);
    const double len = n.norm();
    if (len < 1e-300) {
        throw DegenerateFace("face_normal: zero-area face " + std::to_string(face));
    }
    return n / len;
}

double TriangleMesh::face_area(std::size_t face) const {
    const auto& f = faces[face];
    const Vec3 e1 = vertices[f[1]] - vertices[f[0]];
    const Vec3 e2 = vertices[f[2]] - vertices[f[0]];
    return 0.5 * e1.cross(e2).norm();
}

void TriangleMesh::validate() const {
    for (std::size_t i = 0; i < faces.size(); ++i) {
        for (std::uint32_t idx : faces[i]) {
            if (idx >= vertices.size()) {
                throw IndexOutOfRange("mesh face " + std::to_string(i) +
                                      " references vertex " + std::to_string(idx) +
                                      " of " + std::to_string(vertices.size()));
            }
        }
        if (face_area(i) <= 1e-12) {
            throw DegenerateFace("mesh face " + std::to_string(i) +
                                 " has area <= 1e-12 m^2");
        }
    }
}

TriangleMesh TriangleMesh::transformed(const RigidTransform& t) const {
    TriangleMesh out;
    out.vertices.reserve(vertices.size());
    for (const Vec3& v : vertices) {
        out.vertices.push_back(t.apply(v));
    }
    out.faces = faces;
    return out;
}

void TriangleMesh::append(const TriangleMesh& other) {
    const auto offset = static_cast<std::uint32_t>(vertices.size());
    vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
    faces.reserve(faces.size() + other.faces.size());
    for (const auto& f : other.faces) {
        faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
    }
}

namespace {

bool parse_double(const char*& cursor, double& out) {
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(cursor, &end);
    if (end == cursor || errno == ERANGE) {
        return false;
    }
    cursor = end;
    out = value;
    return true;
}

bool parse_long(const char*& cursor, long& out) {
    char* end = nullptr;
    errno = 0;
    const long value = std::strtol(cursor, &end, 10);
    if (end == cursor || errno == ERANGE) {
        return false;
    }
    cursor = end;
    out = value;
    return true;
}

bool only_whitespace(const char* cursor) {
    while (*cursor != '\0') {
        if (!std::isspace(static_cast<unsigned char>(*cursor))) {
            return false;
        }
        ++cursor;
    }
    return true;
}

}  // namespace

TriangleMesh parse_obj(const std::string& text, const std::string& origin) {
    TriangleMesh mesh;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;

    auto fail = [&](const std::string& what) -> ParseError {
        return ParseError(origin + ":" + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const char* cursor = line.c_str();
        while (std::isspace(static_cast<unsigned char>(*cursor))) {
            ++cursor;
        }
        if (*cursor == '\0' || *cursor == '#') {
            continue;
        }
        if (cursor[0] == 'v' && std::isspace(static_cast<unsigned char>(cursor[1]))) {
            ++cursor;
            Vec3 v;
            for (int k = 0; k < 3; ++k) {
                if (!parse_double(cursor, v[k])) {
                    throw fail("malformed vertex record");
                }
            }
            if (!only_whitespace(cursor)) {
                throw fail("trailing data after vertex record");
            }
            mesh.vertices.push_back(v);
        } else if (cursor[0] == 'f' &&
                   std::isspace(static_cast<unsigned char>(cursor[1]))) {
            ++cursor;
            std::array<std::uint32_t, 3> face{};
            for (int k = 0; k < 3; ++k) {
                long idx = 0;
                if (!parse_long(cursor, idx)) {
                    throw fail("malformed face record");
                }
                // OBJ indices are 1-based; 0 is never valid and negative
                // (relative) indices are outside the supported subset.
                if (idx < 1) {
                    throw IndexOutOfRange(origin + ":" + std::to_string(line_no) +
                                          ": face index " + std::to_string(idx) +
                                          " (OBJ indices are 1-based)");
                }
                face[k] = static_cast<std::uint32_t>(idx - 1);
            }
            if (!only_whitespace(cursor)) {
                throw fail("face has more than 3 vertices (triangles only)");
            }
            mesh.faces.push_back(face);
        } else {
            throw fail("unsupported record '" + std::string(1, *cursor) + "'");
        }
    }

    mesh.validate();
    return mesh;
}

TriangleMesh load_obj(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("load_obj: cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_obj(buffer.str(), path);
}

std::string format_obj(const TriangleMesh& mesh) {
    std::string out;
    out.reserve(mesh.vertices.size() * 48 + mesh.faces.size() * 24);
    char line[128];
    for (const Vec3& v : mesh.vertices) {
        // %.17g guarantees the shortest exact decimal round-trip for doubles.
        std::snprintf(line, sizeof(line), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        out += line;
    }
    for (const auto& f : mesh.faces) {
        std::snprintf(line, sizeof(line), "f %u %u %u\n", f[0] + 1, f[1] + 1, f[2] + 1);
        out += line;
    }
    return out;
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("save_obj: cannot open " + path + " for writing");
    }
    out << format_obj(mesh);
    if (!out) {
        throw IoError("save_obj: write failed for " + path);
    }
}

}  // namespace kinalign
