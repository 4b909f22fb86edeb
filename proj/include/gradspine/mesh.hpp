#pragma once

#include "gradspine/geom.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace gradspine {

// Closed oriented triangle mesh bounding a compact solid. Faces are
// counter-clockwise as seen from outside (outward normals).
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }
    int edge_count() const;      // undirected edges
    int euler_char() const;      // V - E + F
    double bbox_diagonal() const;

    Vec3 face_normal(int f) const;      // unit outward normal
    Vec3 face_centroid(int f) const;

    // Throws Error("NotClosed"/"NotOriented"/"DegenerateFace") on a bad mesh:
    // every undirected edge must be shared by exactly two faces traversing it
    // in opposite directions.
    void validate() const;
};

TriMesh load_off(std::istream& in);
TriMesh load_off_file(const std::string& path);
void save_off(const TriMesh& m, std::ostream& out);
void save_off_file(const TriMesh& m, const std::string& path);

// Point-in-solid parity test, robust to grazing hits: casts a ray in a seeded
// direction and retries with a jittered direction when a hit falls within the
// exclusion radius of a triangle's boundary.
bool point_inside(const TriMesh& m, const Vec3& p, uint64_t seed = 7);

// Serial reference for the batched kernel; results must match exactly.
std::vector<char> points_inside_serial(const TriMesh& m, const std::vector<Vec3>& pts,
                                       uint64_t seed = 7);
std::vector<char> points_inside(const TriMesh& m, const std::vector<Vec3>& pts,
                                uint64_t seed = 7);

} // namespace gradspine
