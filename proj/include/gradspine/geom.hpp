#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gradspine {

// Error with a stable code string, mapped to CLI exit codes:
// domain errors -> 1, I/O and format errors -> 2.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what, bool io = false)
        : std::runtime_error(code + ": " + what), code_(std::move(code)), io_(io) {}
    const std::string& code() const { return code_; }
    bool is_io() const { return io_; }

private:
    std::string code_;
    bool io_;
};

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
    double n = norm(a);
    if (n == 0) throw Error("DegenerateVector", "cannot normalize zero vector");
    return a / n;
}

struct Vec2 {
    double x = 0, y = 0;
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double det2(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double dot2(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

// Orthonormal frame (e1, e2) spanning the plane perpendicular to v,
// oriented so (e1, e2, v) is right-handed.
struct Frame2 {
    Vec3 e1, e2, v;
    Vec2 project(const Vec3& p) const { return {dot(p, e1), dot(p, e2)}; }
    double height(const Vec3& p) const { return dot(p, v); }
};

inline Frame2 make_frame(const Vec3& v_in) {
    Vec3 v = normalized(v_in);
    Vec3 a = std::fabs(v.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 e1 = normalized(cross(a, v));
    Vec3 e2 = cross(v, e1);
    return {e1, e2, v};
}

// Deterministic splitmix64-based generator for seeded jitter and tests.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // inclusive range
    int64_t uniform_int(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next() % static_cast<uint64_t>(hi - lo + 1));
    }
};

// Rotate v by a tiny angle about a seeded random axis (simulation of simplicity).
Vec3 jitter_direction(const Vec3& v, Rng& rng, double max_angle_rad);

} // namespace gradspine
