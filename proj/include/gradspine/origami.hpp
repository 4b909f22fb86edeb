#pragma once

#include "gradspine/geom.hpp"

#include <string>
#include <vector>

namespace gradspine {

// Origami encoding: polygons (pieces of the plus boundary region / waterfall
// sheets) whose boundary arcs are glued in pairs. Arc kinds:
//   shared   - trajectory shared by two sheets, a generator
//   free     - free trajectory, a generator (one per two-free-arc polygon is
//              eliminated, lowest label first)
//   attached - arc lying on the plus boundary region, ignored in relators
struct OrigamiArc {
    std::string name;
    std::string from, to;    // vertex labels
    std::string kind;        // "shared" | "free" | "attached"
};

struct BoundaryStep {
    int arc = 0;
    bool reversed = false;
};

struct OrigamiPolygon {
    std::vector<BoundaryStep> boundary;   // cyclic, in the cell's preferred orientation
};

struct OrigamiIdent {
    int arc_a = 0, arc_b = 0;
    bool reversed = false;   // glue a to b reversing orientation
};

struct OrigamiCode {
    std::vector<std::string> vertices;
    std::vector<OrigamiArc> arcs;
    std::vector<OrigamiPolygon> polygons;
    std::vector<OrigamiIdent> idents;
};

// JSON: {"surface": "...", "vertices": [...], "arcs": [{name, from, to,
// kind}], "polygons": [{"boundary": [{"arc": name, "reversed": bool}]}],
// "identifications": [{"a": name, "b": name, "reversed": bool}]}
OrigamiCode parse_origami(const std::string& json_text);

// Gluing map must be at most 2-to-1 on arc interiors and at most 3-to-1 on
// vertices, and identified arcs must have matching endpoints under their
// orientation. Error("PatternViolation") / Error("MultiplicityViolation").
void validate_origami(const OrigamiCode& code);

// Letters are +-(generator index + 1); negative means inverse.
struct Presentation {
    std::vector<std::string> generators;
    std::vector<std::vector<int>> relators;
};

Presentation presentation(const OrigamiCode& code);

// Tietze-safe only: drops a generator occurring exactly once in exactly one
// relator together with that relator, erases length-2 identifications and
// length-1 relators by substitution, and free/cyclically reduces.
Presentation simplify(Presentation p);

int presentation_complexity(const Presentation& p);

std::string relator_to_string(const Presentation& p, const std::vector<int>& relator);
std::string presentation_to_string(const Presentation& p);

// Abelianization invariants: the diagonal of the Smith normal form of the
// relator exponent matrix, nonnegative, trailing zeros = free rank. Used as
// the independent oracle that simplify preserves the group's abelianization.
std::vector<long long> abelianization(const Presentation& p);

} // namespace gradspine
