#pragma once

#include "gradspine/geom.hpp"

#include <string>
#include <utility>
#include <vector>

namespace gradspine {

// Purely combinatorial fold diagram: oriented closed curves carrying cyclic
// event lists (crossing ends and cusps) with a plus/minus label on every arc
// between consecutive events. Crossings live on plus arcs only; the label
// flips exactly at cusps.

struct DiagEvent {
    enum class Kind : char { Crossing, Cusp };
    Kind kind = Kind::Cusp;
    int id = 0;          // index into crossings or cusps
    bool upper = false;  // crossing ends only: this strand has the larger height
};

struct DiagCrossing {
    int polarity = 0;    // +1 oplus, -1 ominus
};

struct DiagCusp {
    int first = 0;       // +1 / -1
    int second = 0;      // +1 oplus / -1 ominus
    bool is_a_class() const { return first * second > 0; }
};

// Address of an arc position: the gap just before event `gap` of the curve
// (gap == k inserts between events k-1 and k). Event-free curves have the
// single gap 0.
struct ArcSite {
    int curve = 0;
    int gap = 0;
};

struct FoldDiagram {
    std::vector<std::vector<DiagEvent>> curves;
    // seg_sign[c][k] labels the arc following event k of curve c (+1 plus,
    // -1 minus); an event-free curve stores exactly one label.
    std::vector<std::vector<int>> seg_sign;
    std::vector<DiagCrossing> crossings;
    std::vector<DiagCusp> cusps;

    int crossing_count() const { return static_cast<int>(crossings.size()); }
    int cusp_count() const { return static_cast<int>(cusps.size()); }

    // Label of the arc a site sits on.
    int site_sign(const ArcSite& s) const;

    // Structural invariants: every crossing has exactly two ends (one upper,
    // one lower) on plus arcs; every cusp has exactly one event and flips the
    // label; consecutive cusps bounding a plus arc differ in exactly one
    // polarity. Throws Error("InvalidDiagram") with details.
    void validate() const;
};

enum class CancelVerdict { TopologyChanging, TopologyPreserving, Forbidden };

// The verdict by cusp flavors alone: same first / opposite second ->
// TopologyChanging; opposite first / same second -> TopologyPreserving
// (dove-tail); same/same and opposite/opposite -> Forbidden.
CancelVerdict cancel_verdict(const DiagCusp& a, const DiagCusp& b);

// Same, but checks the two cusps are consecutive along one curve
// (no event between them); throws Error("NotConsecutive") otherwise.
CancelVerdict cusp_cancel_rule(const FoldDiagram& d, int cusp_a, int cusp_b);

// Serialization used by the CLI `diagram` command and the tests.
FoldDiagram diagram_from_json(const std::string& text);
std::string diagram_to_json(const FoldDiagram& d);

// Skew-symmetric signed crossing matrix between curves.
std::vector<std::vector<int>> psi_form(const FoldDiagram& d);
std::pair<int, int> polarized_counts(const FoldDiagram& d);   // (#oplus, #ominus)
int degree_h(const FoldDiagram& d);                           // (#d3+ - #d3-) / 2

} // namespace gradspine
