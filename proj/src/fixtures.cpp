#include "gradspine/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace gradspine {

namespace {

constexpr double kPi = 3.14159265358979323846;

void subdivide(TriMesh& m) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
        auto key = std::make_pair(std::min(a, b), std::max(a, b));
        auto it = mid.find(key);
        if (it != mid.end()) return it->second;
        int idx = m.vertex_count();
        m.vertices.push_back((m.vertices[a] + m.vertices[b]) / 2.0);
        mid[key] = idx;
        return idx;
    };
    std::vector<std::array<int, 3>> out;
    out.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
        int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
        out.push_back({f[0], ab, ca});
        out.push_back({f[1], bc, ab});
        out.push_back({f[2], ca, bc});
        out.push_back({ab, bc, ca});
    }
    m.faces = std::move(out);
}

TriMesh icosahedron() {
    const double phi = (1 + std::sqrt(5.0)) / 2;
    TriMesh m;
    m.vertices = {{-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
                  {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
                  {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
    m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
               {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
               {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
               {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    return m;
}

// Displace unit-sphere points radially: scale(u) over unit directions u.
template <class F>
TriMesh shaped_sphere(int level, F&& radial_scale) {
    TriMesh m = icosahedron();
    for (auto& p : m.vertices) p = normalized(p);
    for (int i = 1; i < level; ++i) {
        subdivide(m);
        for (auto& p : m.vertices) p = normalized(p);
    }
    for (auto& p : m.vertices) p = p * radial_scale(p);
    m.validate();
    return m;
}

} // namespace

TriMesh icosphere(int level, double radius) {
    if (level < 1 || level > 7) throw Error("BadParams", "icosphere level must be in 1..7");
    return shaped_sphere(level, [&](const Vec3&) { return radius; });
}

static TriMesh torus_axis_z(double R, double r, int segM, int segm) {
    if (R <= r || r <= 0 || segM < 3 || segm < 3) throw Error("BadParams", "bad torus parameters");
    TriMesh m;
    for (int i = 0; i < segM; ++i) {
        double a = 2 * kPi * i / segM;
        for (int j = 0; j < segm; ++j) {
            double b = 2 * kPi * j / segm;
            double w = R + r * std::cos(b);
            m.vertices.push_back({w * std::cos(a), w * std::sin(a), r * std::sin(b)});
        }
    }
    auto idx = [&](int i, int j) { return (i % segM) * segm + (j % segm); };
    for (int i = 0; i < segM; ++i)
        for (int j = 0; j < segm; ++j) {
            int p = idx(i, j), q = idx(i + 1, j), s = idx(i + 1, j + 1), t = idx(i, j + 1);
            m.faces.push_back({p, q, s});
            m.faces.push_back({p, s, t});
        }
    m.validate();
    return m;
}

TriMesh torus(double R, double r, int segM, int segm) { return torus_axis_z(R, r, segM, segm); }

TriMesh torus_standing(double R, double r, int segM, int segm) {
    TriMesh m = torus_axis_z(R, r, segM, segm);
    for (auto& p : m.vertices) p = {p.z, p.y, p.x};   // axis z -> axis x
    // the swap mirrors the mesh; flip faces to restore outward orientation
    for (auto& f : m.faces) std::swap(f[1], f[2]);
    m.validate();
    return m;
}

TriMesh dented_sphere(const std::vector<Dent>& dents, int level, double radius) {
    // negative depth is an outward bump
    for (const auto& d : dents)
        if (d.width <= 0 || d.depth == 0 || std::fabs(d.depth) >= 0.9)
            throw Error("BadParams", "dent |depth| must be in (0, 0.9), width positive");
    return shaped_sphere(level, [&](const Vec3& u) {
        double s = 1.0;
        for (const auto& d : dents) {
            double ang = std::acos(std::clamp(dot(u, normalized(d.dir)), -1.0, 1.0));
            double x = ang / d.width;
            s -= d.depth * std::exp(-x * x);
        }
        return radius * s;
    });
}

TriMesh peanut() {
    // Two stacked sideways dent pairs on opposite sides of the sphere. Within
    // each pair the cavities are azimuthally offset so their fold loops
    // overlap in projection; the vertical chord at the overlap grazes both
    // cavity walls and stays in the material between them. Each pair yields
    // one double tangent, giving crossing number 2 in the downward direction.
    std::vector<Dent> dents = {
        {{1, 0.06, 0.60}, 0.25, 0.40},
        {{1, -0.06, -0.50}, 0.25, 0.40},
        {{-1, -0.06, 0.60}, 0.25, 0.40},
        {{-1, 0.06, -0.50}, 0.25, 0.40},
    };
    return dented_sphere(dents, 5, 1.0);
}

TriMesh genus_surface(int genus) {
    if (genus < 1 || genus > 5) throw Error("BadParams", "genus must be in 1..5");
    // Occupancy slab of unit cubes, 3 cells tall and deep, with `genus`
    // through-tunnels along y.
    int W = 4 * genus + 1, H = 3, D = 3;
    auto occupied = [&](int x, int y, int z) {
        if (x < 0 || x >= W || y < 0 || y >= D || z < 0 || z >= H) return false;
        // tunnel columns at x = 4k+2 (k = 0..genus-1), middle height
        if (z == 1 && ((x - 2) % 4 == 0) && x >= 2 && x <= W - 3) return false;
        return true;
    };
    std::map<std::array<int, 3>, int> vid;
    TriMesh m;
    auto vertex = [&](int x, int y, int z) {
        std::array<int, 3> key{x, y, z};
        auto it = vid.find(key);
        if (it != vid.end()) return it->second;
        int idx = m.vertex_count();
        m.vertices.push_back({static_cast<double>(x), static_cast<double>(y),
                              static_cast<double>(z)});
        vid[key] = idx;
        return idx;
    };
    auto quad = [&](int a, int b, int c, int d) {
        m.faces.push_back({a, b, c});
        m.faces.push_back({a, c, d});
    };
    for (int x = -1; x <= W; ++x)
        for (int y = -1; y <= D; ++y)
            for (int z = -1; z <= H; ++z) {
                bool in = occupied(x, y, z);
                // +x face
                if (in != occupied(x + 1, y, z)) {
                    int a = vertex(x + 1, y, z), b = vertex(x + 1, y + 1, z),
                        c = vertex(x + 1, y + 1, z + 1), d = vertex(x + 1, y, z + 1);
                    if (in) quad(a, b, c, d);
                    else quad(a, d, c, b);
                }
                if (in != occupied(x, y + 1, z)) {
                    int a = vertex(x, y + 1, z), b = vertex(x, y + 1, z + 1),
                        c = vertex(x + 1, y + 1, z + 1), d = vertex(x + 1, y + 1, z);
                    if (in) quad(a, b, c, d);
                    else quad(a, d, c, b);
                }
                if (in != occupied(x, y, z + 1)) {
                    int a = vertex(x, y, z + 1), b = vertex(x, y + 1, z + 1),
                        c = vertex(x + 1, y + 1, z + 1), d = vertex(x + 1, y, z + 1);
                    if (in) quad(a, d, c, b);
                    else quad(a, b, c, d);
                }
            }
    // center and scale to a unit-ish box
    Vec3 c{W / 2.0, D / 2.0, H / 2.0};
    for (auto& p : m.vertices) p = (p - c) * (2.0 / W);
    m.validate();
    return m;
}

TriMesh cusp_patch() {
    // Sphere with one tilted sideways dent: its fold loop carries a plus arc
    // whose ends are the two stable cusp points of the local model (a closed
    // mesh cannot carry an odd cusp count: labels alternate around each fold
    // loop).
    std::vector<Dent> dents = {{{0.97, 0.0, 0.25}, 0.45, 0.35}};
    return dented_sphere(dents, 5, 1.0);
}

TriMesh dovetail_patch(double t) {
    if (t == 0) throw Error("BadParams", "dove-tail parameter must be nonzero");
    if (t < 0) {
        // two-cusp flavor: a sideways dent whose silhouette wiggles
        double depth = std::min(0.45, 0.18 + 0.8 * (-t));
        std::vector<Dent> dents = {{{1.0, 0.0, 0.25}, 0.40, depth}};
        return dented_sphere(dents, 5, 1.0);
    }
    // t > 0: the flat flavor, a shallow wide bump with no silhouette wiggle
    std::vector<Dent> dents = {{{1.0, 0.0, 0.25}, 1.0, 0.05}};
    return dented_sphere(dents, 5, 1.0);
}

TriMesh fixture_by_name(const std::string& name) {
    if (name == "icosphere3") return icosphere(3);
    if (name == "icosphere4") return icosphere(4);
    if (name == "icosphere5") return icosphere(5);
    if (name == "torus") return torus(2.0, 0.7, 48, 24);
    if (name == "torus_fine") return torus(2.0, 0.5, 64, 32);
    if (name == "torus_standing") return torus_standing(2.0, 0.7, 48, 24);
    if (name == "torus_standing_fat") return torus_standing(1.6, 0.9, 48, 24);
    if (name == "genus2") return genus_surface(2);
    if (name == "genus3") return genus_surface(3);
    if (name == "dented_sphere")
        return dented_sphere({{{1, 0, 0}, 0.5, 0.3}}, 5, 1.0);
    if (name == "dented_sphere_low")
        return dented_sphere({{{0.9, 0, -0.45}, 0.5, 0.3}}, 5, 1.0);
    if (name == "dented_sphere_two")
        return dented_sphere({{{1, 0, 0.05}, 0.45, 0.3}, {{-1, 0.12, 0.08}, 0.45, 0.3}},
                             5, 1.0);
    if (name == "peanut") return peanut();
    if (name == "pocket_pair")
        return dented_sphere({{{1, 0.06, 0.60}, 0.25, 0.40},
                              {{1, -0.06, -0.50}, 0.25, 0.40}}, 5, 1.0);
    if (name == "cusp_patch") return cusp_patch();
    if (name == "dovetail_neg") return dovetail_patch(-0.2);
    if (name == "dovetail_pos") return dovetail_patch(0.2);
    throw Error("BadParams", "unknown fixture name: " + name);
}

std::vector<std::string> fixture_names() {
    return {"icosphere3",       "icosphere4",        "icosphere5",
            "torus",            "torus_fine",        "torus_standing",
            "torus_standing_fat", "genus2",          "genus3",
            "dented_sphere",    "dented_sphere_low", "dented_sphere_two",
            "peanut",           "pocket_pair",       "cusp_patch",
            "dovetail_neg",     "dovetail_pos"};
}

} // namespace gradspine
