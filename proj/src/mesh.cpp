#include "gradspine/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace gradspine {

Vec3 jitter_direction(const Vec3& v, Rng& rng, double max_angle_rad) {
    Vec3 u = normalized(v);
    // random unit axis, then rotate u about it by a uniform angle
    Vec3 axis;
    do {
        axis = {rng.uniform() * 2 - 1, rng.uniform() * 2 - 1, rng.uniform() * 2 - 1};
    } while (norm(axis) < 1e-3 || norm(cross(axis, u)) < 1e-6);
    axis = normalized(axis);
    double ang = max_angle_rad * (0.5 + 0.5 * rng.uniform());
    double c = std::cos(ang), s = std::sin(ang);
    // Rodrigues rotation
    Vec3 r = u * c + cross(axis, u) * s + axis * (dot(axis, u) * (1 - c));
    return normalized(r);
}

int TriMesh::edge_count() const {
    std::map<std::pair<int, int>, int> seen;
    for (const auto& f : faces)
        for (int k = 0; k < 3; ++k) {
            int a = f[k], b = f[(k + 1) % 3];
            seen[{std::min(a, b), std::max(a, b)}]++;
        }
    return static_cast<int>(seen.size());
}

int TriMesh::euler_char() const {
    return vertex_count() - edge_count() + face_count();
}

double TriMesh::bbox_diagonal() const {
    if (vertices.empty()) return 0;
    Vec3 lo = vertices[0], hi = vertices[0];
    for (const auto& p : vertices) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    return norm(hi - lo);
}

Vec3 TriMesh::face_normal(int f) const {
    const auto& t = faces[f];
    Vec3 n = cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
    return normalized(n);
}

Vec3 TriMesh::face_centroid(int f) const {
    const auto& t = faces[f];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

void TriMesh::validate() const {
    std::map<std::pair<int, int>, int> directed;
    for (size_t i = 0; i < faces.size(); ++i) {
        const auto& f = faces[i];
        for (int k = 0; k < 3; ++k) {
            if (f[k] < 0 || f[k] >= vertex_count())
                throw Error("ParseError", "face vertex index out of range", true);
            if (f[k] == f[(k + 1) % 3])
                throw Error("DegenerateFace", "face repeats a vertex at index " + std::to_string(i));
        }
        Vec3 n = cross(vertices[f[1]] - vertices[f[0]], vertices[f[2]] - vertices[f[0]]);
        if (norm(n) < 1e-30)
            throw Error("DegenerateFace", "zero-area face at index " + std::to_string(i));
        for (int k = 0; k < 3; ++k) {
            auto key = std::make_pair(f[k], f[(k + 1) % 3]);
            if (++directed[key] > 1)
                throw Error("NotOriented", "directed edge repeated; inconsistent orientation");
        }
    }
    for (const auto& [key, cnt] : directed) {
        auto rev = directed.find({key.second, key.first});
        if (rev == directed.end())
            throw Error("NotClosed", "boundary edge " + std::to_string(key.first) + "-" +
                                          std::to_string(key.second));
    }
}

TriMesh load_off(std::istream& in) {
    std::string line;
    auto next_line = [&](int& lineno) -> std::string {
        while (std::getline(in, line)) {
            ++lineno;
            auto h = line.find('#');
            if (h != std::string::npos) line.erase(h);
            if (line.find_first_not_of(" \t\r\n") != std::string::npos) return line;
        }
        throw Error("ParseError", "unexpected end of OFF stream", true);
    };
    int lineno = 0;
    std::string header = next_line(lineno);
    std::istringstream hs(header);
    std::string tag;
    hs >> tag;
    if (tag != "OFF") throw Error("ParseError", "missing OFF header", true);
    std::istringstream cs(next_line(lineno));
    long nv = 0, nf = 0, ne = 0;
    if (!(cs >> nv >> nf >> ne) || nv < 0 || nf < 0)
        throw Error("ParseError", "bad counts line " + std::to_string(lineno), true);
    TriMesh m;
    m.vertices.reserve(nv);
    for (long i = 0; i < nv; ++i) {
        std::istringstream vs(next_line(lineno));
        Vec3 p;
        if (!(vs >> p.x >> p.y >> p.z))
            throw Error("ParseError", "bad vertex line " + std::to_string(lineno), true);
        m.vertices.push_back(p);
    }
    m.faces.reserve(nf);
    for (long i = 0; i < nf; ++i) {
        std::istringstream fs(next_line(lineno));
        int k = 0;
        if (!(fs >> k)) throw Error("ParseError", "bad face line " + std::to_string(lineno), true);
        if (k != 3) throw Error("NotTriangulated", "face with " + std::to_string(k) + " sides", true);
        std::array<int, 3> f{};
        if (!(fs >> f[0] >> f[1] >> f[2]))
            throw Error("ParseError", "bad face line " + std::to_string(lineno), true);
        m.faces.push_back(f);
    }
    m.validate();
    return m;
}

TriMesh load_off_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot open " + path, true);
    return load_off(in);
}

void save_off(const TriMesh& m, std::ostream& out) {
    out << "OFF\n" << m.vertex_count() << " " << m.face_count() << " 0\n";
    out.precision(17);
    for (const auto& p : m.vertices) out << p.x << " " << p.y << " " << p.z << "\n";
    for (const auto& f : m.faces) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
}

void save_off_file(const TriMesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("IoError", "cannot write " + path, true);
    save_off(m, out);
}

namespace {

// Ray-triangle intersection with a quality flag: near-edge or near-parallel
// hits are flagged so the caller can retry with a fresh direction.
struct Hit {
    bool hit = false;
    bool clean = true;
    double t = 0;
};

Hit ray_triangle(const Vec3& orig, const Vec3& dir, const Vec3& v0, const Vec3& v1,
                 const Vec3& v2) {
    constexpr double kBary = 1e-9;
    Hit h;
    Vec3 e1 = v1 - v0, e2 = v2 - v0;
    Vec3 p = cross(dir, e2);
    double det = dot(e1, p);
    double scale = norm(e1) * norm(e2);
    if (std::fabs(det) < 1e-12 * scale) {
        // parallel: cannot certify a miss robustly
        h.clean = std::fabs(det) == 0.0 ? h.clean : false;
        return h;
    }
    double inv = 1.0 / det;
    Vec3 tv = orig - v0;
    double u = dot(tv, p) * inv;
    Vec3 q = cross(tv, e1);
    double v = dot(dir, q) * inv;
    double t = dot(e2, q) * inv;
    if (u < -kBary || v < -kBary || u + v > 1 + kBary) return h;
    if (t <= 0) return h;
    h.hit = true;
    if (u < kBary || v < kBary || u + v > 1 - kBary || t < 1e-12) h.clean = false;
    return h;
}

bool point_inside_impl(const TriMesh& m, const Vec3& p, uint64_t seed) {
    Rng rng(seed * 0x9e3779b97f4a7c15ull + 12345);
    for (int attempt = 0; attempt < 32; ++attempt) {
        Vec3 dir = normalized(
            Vec3{rng.uniform() * 2 - 1, rng.uniform() * 2 - 1, rng.uniform() * 2 - 1} +
            Vec3{1e-4, 2e-4, 3e-4});
        int count = 0;
        bool clean = true;
        for (size_t f = 0; f < m.faces.size() && clean; ++f) {
            const auto& t = m.faces[f];
            Hit h = ray_triangle(p, dir, m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
            if (!h.clean) clean = false;
            if (h.hit) ++count;
        }
        if (clean) return (count % 2) == 1;
    }
    throw Error("PerturbationExhausted", "no clean ray direction found for parity test");
}

} // namespace

bool point_inside(const TriMesh& m, const Vec3& p, uint64_t seed) {
    return point_inside_impl(m, p, seed);
}

std::vector<char> points_inside_serial(const TriMesh& m, const std::vector<Vec3>& pts,
                                       uint64_t seed) {
    std::vector<char> out(pts.size(), 0);
    for (size_t i = 0; i < pts.size(); ++i) out[i] = point_inside_impl(m, pts[i], seed) ? 1 : 0;
    return out;
}

std::vector<char> points_inside(const TriMesh& m, const std::vector<Vec3>& pts, uint64_t seed) {
    std::vector<char> out(pts.size(), 0);
    long n = static_cast<long>(pts.size());
#ifdef GRADSPINE_OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (long i = 0; i < n; ++i) out[i] = point_inside_impl(m, pts[i], seed) ? 1 : 0;
    return out;
}

} // namespace gradspine
