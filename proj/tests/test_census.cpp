#include <doctest.h>

#include "gradspine/census.hpp"

#include <functional>
#include <set>

using namespace gradspine;

namespace {

// Independent oracle: count connected 4-regular multigraphs on c vertices by
// enumerating adjacency data directly (loop pairs on the diagonal, edge
// multiplicities off it) instead of half-edge matchings.
int count_by_adjacency(int c) {
    std::vector<std::vector<int>> found;
    std::vector<int> flat(c * c, 0);
    std::function<int(const std::vector<int>&, int, int)> deg =
        [&](const std::vector<int>& m, int v, int n) {
            int d = 2 * m[v * n + v];
            for (int w = 0; w < n; ++w)
                if (w != v) d += m[v * n + w];
            return d;
        };
    // enumerate symmetric matrices entry by entry
    std::vector<std::pair<int, int>> cells;
    for (int i = 0; i < c; ++i)
        for (int j = i; j < c; ++j) cells.push_back({i, j});
    std::set<std::vector<int>> canon;
    std::function<void(size_t)> rec = [&](size_t k) {
        if (k == cells.size()) {
            for (int v = 0; v < c; ++v)
                if (deg(flat, v, c) != 4) return;
            // connectivity
            std::vector<bool> seen(c, false);
            std::vector<int> stack{0};
            seen[0] = true;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                for (int w = 0; w < c; ++w)
                    if (w != v && flat[v * c + w] > 0 && !seen[w]) {
                        seen[w] = true;
                        stack.push_back(w);
                    }
            }
            for (bool b : seen)
                if (!b) return;
            // canonical representative over vertex relabelings
            std::vector<int> perm(c);
            for (int i = 0; i < c; ++i) perm[i] = i;
            std::vector<int> best;
            do {
                std::vector<int> img(c * c);
                for (int i = 0; i < c; ++i)
                    for (int j = 0; j < c; ++j)
                        img[i * c + j] = flat[perm[i] * c + perm[j]];
                if (best.empty() || img < best) best = img;
            } while (std::next_permutation(perm.begin(), perm.end()));
            canon.insert(best);
            return;
        }
        auto [i, j] = cells[k];
        int cap = i == j ? 2 : 4;
        for (int m = 0; m <= cap; ++m) {
            flat[i * c + j] = m;
            flat[j * c + i] = m;
            rec(k + 1);
        }
        flat[i * c + j] = 0;
        flat[j * c + i] = 0;
    };
    rec(0);
    return static_cast<int>(canon.size());
}

} // namespace

TEST_CASE("four-valent graph counts match the adjacency oracle") {
    CHECK(g4_count(1) == 1);
    CHECK(g4_count(2) == 2);
    CHECK(g4_count(1) == count_by_adjacency(1));
    CHECK(g4_count(2) == count_by_adjacency(2));
    CHECK(g4_count(3) == count_by_adjacency(3));
    CHECK(gamma4(2) == g4_count(1) + g4_count(2));
    CHECK(gamma4(3) == gamma4(2) + g4_count(3));
}

TEST_CASE("graph enumeration yields connected fixed-point-free matchings") {
    for (int c = 1; c <= 3; ++c) {
        auto graphs = enum_4valent_graphs(c);
        CHECK(!graphs.empty());
        for (const Graph4& g : graphs) {
            CHECK(g.vertex_count() == c);
            for (int h = 0; h < 4 * c; ++h) {
                CHECK(g.mate[h] != h);
                CHECK(g.mate[g.mate[h]] == h);
            }
        }
    }
    try {
        enum_4valent_graphs(0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == "ScaleExceeded");
    }
    try {
        enum_4valent_graphs(5);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == "ScaleExceeded");
    }
}

TEST_CASE("census spines validate and carry class-to-class beams") {
    auto graphs = enum_4valent_graphs(1);
    auto pats = admissible_patterns();
    std::set<std::string> codes;
    for (const MarkerPattern& p : pats) {
        MarkedSpine s = census_spine(graphs[0], {p});
        CHECK(s.complexity() == 1);
        CHECK(validate_markers(s).ok);
        codes.insert(canonical_form(s));
    }
    CHECK(codes.size() <= 12);
    CHECK(codes.size() >= 1);
}

TEST_CASE("marked spine census respects the counting bound") {
    auto rows = enum_marked_spines(2);
    std::set<std::string> codes;
    int c1 = 0, c2 = 0;
    for (const CensusRow& r : rows) {
        CHECK(codes.insert(r.code).second);   // all codes distinct
        (r.c == 1 ? c1 : c2)++;
    }
    CHECK(c1 >= 1);
    CHECK(c1 <= g4_count(1) * 12);
    CHECK(c2 <= g4_count(2) * 12 * 12);
    CHECK(bound_check(2));
    std::string csv = census_csv(rows);
    CHECK(csv.find("complexity,graph,patterns,orientable,res_chi") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') ==
          static_cast<long>(rows.size()) + 1);
}
