#pragma once

#include "gradspine/geom.hpp"

#include <array>
#include <string>
#include <vector>

namespace gradspine {

// Abstract marked spine: a singular graph whose edges carry three pages
// (triple lines), Q-vertices of valency 4 with TN-marker patterns, free ends
// where a landing curve stops (two flavors), and artificial joints that let
// vertexless circles participate in circuit tracing.
//
// Page bookkeeping: the three pages of an edge are indexed 0..2 and carry a
// class letter ('T' vertical leg, 'N' preferred side, 'U' unmarked). Classes
// are constant along the edge; only the T class is required to be continuous
// through vertices (the N completion at a vertex is a convention, so N/U may
// swap from one end of an edge to the other).

// The twelve admissible vertex patterns, parameterized by the apex slot u and
// its partner a: the T-marked sector at slot x is {x, u} for x != u and
// {u, a} at the apex. The N completion is the fixed convention below.
struct MarkerPattern {
    int apex = 0;
    int partner = 1;

    bool valid() const {
        return apex >= 0 && apex < 4 && partner >= 0 && partner < 4 && apex != partner;
    }
    // Sector partner of the T marker at slot s.
    int t_target(int s) const { return s == apex ? partner : apex; }
    // Conventional N completion: N at a b-slot points to the partner; N at the
    // apex and at the partner points to the smaller-indexed b-slot.
    int n_target(int s) const;
    // Class letter of the sector {s, t} as seen from slot s.
    char sector_class(int s, int t) const {
        return t == t_target(s) ? 'T' : (t == n_target(s) ? 'N' : 'U');
    }
};

std::array<MarkerPattern, 12> admissible_patterns();

// A raw local marking assigns to each slot an ordered (T-target, N-target)
// pair of distinct other slots: 6^4 = 1296 raw markings. Exactly the 12
// pattern-induced ones are admissible.
bool raw_marking_admissible(const std::array<std::array<int, 2>, 4>& tn);

enum class VertexKind : char { Q, FreeO, FreeP, Joint };

struct SpineVertex {
    VertexKind kind = VertexKind::Q;
    MarkerPattern pattern;   // Q vertices only
};

// One end of an edge. For a Q end, attach[p] is the other slot of the sector
// page p occupies (a bijection onto the three other slots). For a Joint end,
// attach[p] is the page index it continues into on the joint's other edge
// end. For a free end, attach is an involution on {0,1,2} with exactly one
// fixed page: entering page p returns along page attach[p]; the fixed page
// turns around on itself.
//   FreeO (cusp on the fold): curtain pairs with the shadow-side ground.
//   FreeP (free trajectory landing): the two grounds pair, curtain is fixed.
struct SpineEnd {
    int vertex = -1;
    int slot = 0;
    std::array<int, 3> attach{0, 1, 2};
};

struct SpineEdge {
    SpineEnd a, b;
    std::array<char, 3> page_class{'T', 'N', 'U'};
};

// Boundary circuit of the beam neighborhood: a cyclic run of directed pages.
struct CircuitStep {
    int edge = 0;
    int page = 0;
    int dir = +1;    // +1 travels end a -> end b
};

struct TracedCircuit {
    std::vector<CircuitStep> steps;
    bool self_mirror = false;   // traverses some page in both directions
};

// A 2-cell capping one or more circuits. Besides the capped circuits the cell
// may carry free boundary circles ("punctures"): boundary that lies on no
// edge of the singular graph (the fold boundary of a ground piece). Its
// Euler characteristic is 2 - 2*genus - circuits.size() - punctures.
struct SpineCell {
    std::vector<int> circuits;
    int genus = 0;
    int punctures = 0;
    int orient = +1;
};

struct MarkedSpine {
    std::vector<SpineVertex> vertices;
    std::vector<SpineEdge> edges;
    std::vector<SpineCell> cells;

    int complexity() const;   // number of Q vertices
};

// Deterministic circuit enumeration (mirror pairs merged).
std::vector<TracedCircuit> trace_circuits(const MarkedSpine& s);

struct MarkerVerdict {
    bool ok = true;
    std::vector<std::string> diagnostics;   // per-vertex/per-edge findings
};

// Accepts iff every Q pattern is one of the twelve, attach arrays are
// consistent bijections, the T page is continuous through every vertex, free
// end pairings match their kind, and every traced circuit is capped by
// exactly one cell. Diagnostic codes: InvalidPattern, MarkerDiscontinuity,
// BadAttach, UncappedCircuit.
MarkerVerdict validate_markers(const MarkedSpine& s);
void require_valid(const MarkedSpine& s);   // throws on the first finding

struct ResolvedComponent {
    int chi = 0;
    bool orientable = true;
};

struct ResolvedSurface {
    std::vector<ResolvedComponent> components;
    int total_chi() const;
    bool orientable() const;
};

// Cuts every T page loose and glues the N/U page pair of each edge into a
// surface; the spine is an abstract gradient spine iff the result orients.
ResolvedSurface resolve_T(const MarkedSpine& s);

struct BranchVerdict {
    bool ok = true;
    std::vector<int> edge_multiplicity;   // |boundary chain coefficient| per edge
};

// Checks that with the given per-cell orientation signs every edge appears in
// the boundary 2-chain with coefficient +-1 (never +-3).
BranchVerdict check_branching(const MarkedSpine& s, const std::vector<int>& orients);

std::string canonical_form(const MarkedSpine& s);
bool is_isomorphic(const MarkedSpine& a, const MarkedSpine& b);

// Reverses the orientation of one disk cell and recomputes the T markers
// along its boundary so the branching stays valid. Involution.
// Error("NotADiskCell") if the cell is not a disk or touches a free end.
MarkedSpine mushroom_flip(const MarkedSpine& s, int cell);

std::string to_dot(const MarkedSpine& s);

} // namespace gradspine
