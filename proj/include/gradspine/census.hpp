#pragma once

#include "gradspine/spine.hpp"

#include <string>
#include <vector>

namespace gradspine {

// Connected 4-valent multigraph on c vertices given as a perfect matching of
// the 4c half-edges (half-edge 4*v + slot).
struct Graph4 {
    std::vector<int> mate;
    int vertex_count() const { return static_cast<int>(mate.size()) / 4; }
};

// All connected 4-valent multigraphs with exactly c vertices, up to
// isomorphism, deterministically ordered. Error("ScaleExceeded") for c < 1
// or c > 4.
std::vector<Graph4> enum_4valent_graphs(int c);

// Number with exactly c vertices, and the cumulative count for <= c.
int g4_count(int c);
int gamma4(int c);

struct CensusRow {
    int c = 0;
    int graph_id = 0;
    std::vector<MarkerPattern> patterns;
    bool orientable = false;
    int res_chi = 0;
    std::string code;
};

// Marked spines of complexity 1..c up to isomorphism: every graph with every
// 12^k pattern assignment, beams attached class-to-class, each circuit capped
// by a disk, deduplicated by canonical code.
std::vector<CensusRow> enum_marked_spines(int c);

// Asserts per complexity k <= c: distinct codes and count <= g4_count(k)*12^k.
bool bound_check(int c);

// Builds the marked spine for one census item.
MarkedSpine census_spine(const Graph4& g, const std::vector<MarkerPattern>& patterns);

std::string census_csv(const std::vector<CensusRow>& rows);

} // namespace gradspine
