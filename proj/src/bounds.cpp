#include "gradspine/bounds.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace gradspine {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt_interval(bool has_lo, long long lo, bool has_hi, long long hi) {
    std::ostringstream os;
    os << "[" << (has_lo ? std::to_string(lo) : std::string("-inf")) << ", "
       << (has_hi ? std::to_string(hi) : std::string("+inf")) << "]";
    return os.str();
}

} // namespace

double lobachevsky(double theta) {
    // reduce to [0, pi): the function is pi-periodic and odd
    double t = std::fmod(theta, kPi);
    if (t < 0) t += kPi;
    double sum = 0;
    // stop on the 1/n^2 envelope: individual increments can vanish early
    // (sin hits zero on arithmetic progressions) without the tail being small
    for (long long n = 1; 1.0 / (static_cast<double>(n) * n) >= 1e-14; ++n)
        sum += std::sin(2.0 * n * t) / (static_cast<double>(n) * n);
    return 0.5 * sum;
}

const double kV0 = 3.0 * lobachevsky(kPi / 3.0);

std::pair<int, int> gc_interval(int c) {
    if (c < 0) throw Error("BadParams", "singular vertex count must be nonnegative");
    return {c, 6 * c};
}

BoundReport gc_interval_report(int c) {
    auto [lo, hi] = gc_interval(c);
    BoundReport r;
    r.name = "gc_interval";
    r.inputs = "c=" + std::to_string(c);
    r.has_lower = r.has_upper = true;
    r.lower = lo;
    r.upper = hi;
    r.citation = "the crossing number in the gradient direction of a spine with c "
                 "singular vertices lies between c and 6c";
    return r;
}

int homology_bound(long long torsion_order, int rank) {
    if (torsion_order < 1) throw Error("BadParams", "torsion order must be positive");
    if (rank < 0) throw Error("BadParams", "rank must be nonnegative");
    double value = 2.0 * std::log(static_cast<double>(torsion_order)) / std::log(5.0) +
                   rank - 1;
    long long up = static_cast<long long>(std::ceil(value - 1e-12));
    return static_cast<int>(std::max<long long>(0, up));
}

BoundReport homology_bound_report(long long torsion_order, int rank) {
    BoundReport r;
    r.name = "homology_bound";
    r.inputs = "torsion=" + std::to_string(torsion_order) + " rank=" + std::to_string(rank);
    r.has_lower = true;
    r.lower = homology_bound(torsion_order, rank);
    r.inputs += " -> " + fmt_interval(true, r.lower, false, 0);
    r.citation = "manifold complexity is at least 2*log5(|torsion H1|) + rank(H1) - 1";
    return r;
}

int volume_bound(double volume) {
    if (volume < 0) throw Error("BadParams", "volume must be nonnegative");
    return static_cast<int>(std::ceil(volume / kV0 - 1e-12));
}

BoundReport volume_bound_report(double volume) {
    BoundReport r;
    r.name = "volume_bound";
    std::ostringstream os;
    os << "volume=" << volume;
    r.inputs = os.str();
    r.has_lower = true;
    r.lower = volume_bound(volume);
    r.citation = "hyperbolic volume is less than the regular ideal tetrahedron volume "
                 "times the triangulation complexity";
    return r;
}

Rational group_bound(const Presentation& p) {
    long long c = presentation_complexity(p);
    long long g = std::gcd(c, 3ll);
    return {c / g, 3 / g};
}

BoundReport group_bound_report(const Presentation& p) {
    Rational q = group_bound(p);
    BoundReport r;
    r.name = "group_bound";
    r.inputs = "presentation_complexity=" + std::to_string(presentation_complexity(p));
    r.has_lower = true;
    // integer floor of the rational lower bound
    r.lower = q.num / q.den;
    r.citation = "manifold complexity is at least one third of the length of any "
                 "fundamental group presentation it carries";
    return r;
}

int lens_bound(const std::array<std::array<long long, 2>, 2>& a) {
    long long det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if (det != 1) throw Error("NotUnimodular", "matrix determinant must be 1");
    return static_cast<int>(4 * std::llabs(a[0][1]));
}

BoundReport lens_bound_report(const std::array<std::array<long long, 2>, 2>& a) {
    BoundReport r;
    r.name = "lens_bound";
    std::ostringstream os;
    os << "A=((" << a[0][0] << "," << a[0][1] << "),(" << a[1][0] << "," << a[1][1]
       << "))";
    r.inputs = os.str();
    r.has_upper = true;
    r.upper = lens_bound(a);
    r.citation = "a graph manifold glued along a unimodular matrix has complexity at "
                 "most four times the off-diagonal entry";
    return r;
}

std::vector<std::pair<std::string, int>> census_table() {
    return {
        {"P_24", 4},  {"P_48", 5},  {"P_120", 5}, {"Q_8", 2},   {"Q_12", 3},
        {"Q_16", 4},  {"Q_20", 5},  {"Q_24", 6},  {"L_4_1", 1}, {"L_5_2", 1},
        {"L_5_1", 2}, {"L_7_2", 2}, {"L_8_3", 2}, {"L_6_1", 3}, {"L_9_2", 3},
        {"L_10_3", 3}, {"L_11_3", 3}, {"L_12_5", 3}, {"L_13_5", 3},
    };
}

int census_lookup(const std::string& name) {
    for (const auto& [n, v] : census_table())
        if (n == name) return v;
    throw Error("UnknownName", "no census entry named " + name);
}

BoundReport census_lookup_report(const std::string& name) {
    BoundReport r;
    r.name = "census_lookup";
    r.inputs = name;
    r.has_lower = true;
    r.lower = census_lookup(name);
    r.citation = "known minimal triangulation complexity of small spherical space "
                 "forms and lens spaces";
    return r;
}

int cm_upper_bound(int presentation_length) {
    if (presentation_length < 0) throw Error("BadParams", "length must be nonnegative");
    return 4 * presentation_length;
}

BoundReport cm_upper_bound_report(int presentation_length) {
    BoundReport r;
    r.name = "cm_upper_bound";
    r.inputs = "length=" + std::to_string(presentation_length);
    r.has_upper = true;
    r.upper = cm_upper_bound(presentation_length);
    r.citation = "a geometric realization of a presentation yields a manifold spine "
                 "of at most four times its length";
    return r;
}

} // namespace gradspine
