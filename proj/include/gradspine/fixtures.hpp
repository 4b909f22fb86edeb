#pragma once

#include "gradspine/mesh.hpp"

#include <string>
#include <vector>

namespace gradspine {

// Built-in closed meshes used by the tests and the `fixture` CLI command.

// Subdivided icosahedron; faces = 20 * 4^(level-1). level=4 gives 1280 faces.
TriMesh icosphere(int level, double radius = 1.0);

// Torus of revolution, axis along z ("vertical": the z-field sees no plus folds).
TriMesh torus(double R, double r, int seg_major, int seg_minor);

// Torus of revolution with axis along x ("standing wheel").
TriMesh torus_standing(double R, double r, int seg_major, int seg_minor);

// Sphere with one (or two) inward Gaussian dents facing sideways.
// Each dent: unit direction, angular width, depth.
struct Dent {
    Vec3 dir;
    double width;
    double depth;
};
TriMesh dented_sphere(const std::vector<Dent>& dents, int level = 5, double radius = 1.0);

// Two-dent "peanut": a sphere with two sideways dents tuned so the plus-fold
// images cross; used as the gc >= 2 fixture.
TriMesh peanut();

// Genus-n surface: boundary of a slab with n square tunnels (voxel mesh).
TriMesh genus_surface(int genus);

// Patch of the x^3 + xy Whitney normal form closed into a ball.
TriMesh cusp_patch();

// Patch of the x^4 + t x^2 + xy dove-tail family closed into a ball;
// t < 0 produces the two-cusp configuration, t > 0 none.
TriMesh dovetail_patch(double t);

// Named lookup used by the CLI: "icosphere4", "torus", "torus_standing",
// "genus2", "dented_sphere", "peanut", "cusp_patch", "dovetail_neg",
// "dovetail_pos", ...
TriMesh fixture_by_name(const std::string& name);
std::vector<std::string> fixture_names();

} // namespace gradspine
