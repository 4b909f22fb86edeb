#pragma once

#include "gradspine/origami.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace gradspine {

// Lobachevsky function via the series (1/2) * sum sin(2 n theta) / n^2,
// summed until increments fall below 1e-14.
double lobachevsky(double theta);

// Regular ideal tetrahedron volume, 3 * lobachevsky(pi / 3). The series
// oracle in the tests pins this value to 1e-12.
extern const double kV0;

struct BoundReport {
    std::string name;
    std::string inputs;
    bool has_lower = false, has_upper = false;
    long long lower = 0, upper = 0;
    std::string citation;   // the inequality the number instantiates
};

// [c, 6c]: singular vertex count below, six times it above.
std::pair<int, int> gc_interval(int c);
BoundReport gc_interval_report(int c);

// max(0, ceil(2*log5(torsion_order) + rank - 1)).
int homology_bound(long long torsion_order, int rank);
BoundReport homology_bound_report(long long torsion_order, int rank);

// ceil(V / V0).
int volume_bound(double volume);
BoundReport volume_bound_report(double volume);

// presentation_complexity / 3, as a rational.
struct Rational {
    long long num = 0, den = 1;
};
Rational group_bound(const Presentation& p);
BoundReport group_bound_report(const Presentation& p);

// 4*|b| for A = ((a,b),(c,d)) with det 1; Error("NotUnimodular") otherwise.
int lens_bound(const std::array<std::array<long long, 2>, 2>& a);
BoundReport lens_bound_report(const std::array<std::array<long long, 2>, 2>& a);

// Built-in table of known lower bounds for named quotients; the table is
// returned in a stable order. Error("UnknownName") for anything else.
int census_lookup(const std::string& name);
std::vector<std::pair<std::string, int>> census_table();
BoundReport census_lookup_report(const std::string& name);

// 4 * (closed-manifold complexity datum supplied by the caller).
int cm_upper_bound(int presentation_length);
BoundReport cm_upper_bound_report(int presentation_length);

} // namespace gradspine
