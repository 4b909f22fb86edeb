#include "gradspine/census.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace gradspine {

namespace {

bool connected(const Graph4& g) {
    int c = g.vertex_count();
    if (c == 0) return false;
    std::vector<bool> seen(c, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int s = 0; s < 4; ++s) {
            int w = g.mate[4 * v + s] / 4;
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

// canonical code of the underlying multigraph: minimal adjacency matrix
// (loop pairs on the diagonal) over all vertex relabelings
std::string multigraph_code(const Graph4& g) {
    int c = g.vertex_count();
    std::vector<std::vector<int>> adj(c, std::vector<int>(c, 0));
    for (int h = 0; h < 4 * c; ++h) {
        int m = g.mate[h];
        if (m <= h) continue;
        int v = h / 4, w = m / 4;
        adj[v][w]++;
        if (v != w) adj[w][v]++;
    }
    std::vector<int> perm(c);
    std::iota(perm.begin(), perm.end(), 0);
    std::string best;
    do {
        std::string code;
        for (int i = 0; i < c; ++i)
            for (int j = 0; j < c; ++j)
                code += static_cast<char>('0' + adj[perm[i]][perm[j]]);
        if (best.empty() || code < best) best = code;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

void enumerate_matchings(std::vector<int>& mate, int n,
                         const std::function<void(const Graph4&)>& emit) {
    int h = 0;
    while (h < n && mate[h] >= 0) ++h;
    if (h == n) {
        emit(Graph4{mate});
        return;
    }
    for (int h2 = h + 1; h2 < n; ++h2) {
        if (mate[h2] >= 0) continue;
        mate[h] = h2;
        mate[h2] = h;
        enumerate_matchings(mate, n, emit);
        mate[h] = -1;
        mate[h2] = -1;
    }
}

} // namespace

std::vector<Graph4> enum_4valent_graphs(int c) {
    if (c < 1 || c > 4)
        throw Error("ScaleExceeded",
                    "graph enumeration supports 1 to 4 vertices");
    std::vector<Graph4> out;
    std::set<std::string> seen;
    std::vector<int> mate(4 * c, -1);
    enumerate_matchings(mate, 4 * c, [&](const Graph4& g) {
        if (!connected(g)) return;
        std::string code = multigraph_code(g);
        if (seen.insert(code).second) out.push_back(g);
    });
    return out;
}

int g4_count(int c) { return static_cast<int>(enum_4valent_graphs(c).size()); }

int gamma4(int c) {
    int total = 0;
    for (int k = 1; k <= c; ++k) total += g4_count(k);
    return total;
}

MarkedSpine census_spine(const Graph4& g,
                         const std::vector<MarkerPattern>& patterns) {
    int c = g.vertex_count();
    if (static_cast<int>(patterns.size()) != c)
        throw Error("BadParams", "one pattern per vertex required");
    MarkedSpine s;
    for (int v = 0; v < c; ++v) {
        if (!patterns[v].valid())
            throw Error("InvalidPattern",
                        "vertex " + std::to_string(v) + " pattern invalid");
        s.vertices.push_back({VertexKind::Q, patterns[v]});
    }
    auto make_end = [&](int half) {
        SpineEnd e;
        e.vertex = half / 4;
        e.slot = half % 4;
        const MarkerPattern& p = patterns[e.vertex];
        int t = p.t_target(e.slot), n = p.n_target(e.slot);
        e.attach = {t, n, 0 + 1 + 2 + 3 - e.slot - t - n};
        return e;
    };
    for (int h = 0; h < 4 * c; ++h) {
        if (g.mate[h] <= h) continue;
        SpineEdge e;
        e.a = make_end(h);
        e.b = make_end(g.mate[h]);
        e.page_class = {'T', 'N', 'U'};
        s.edges.push_back(e);
    }
    for (size_t i = 0; i < trace_circuits(s).size(); ++i)
        s.cells.push_back({{static_cast<int>(i)}, 0, +1});
    return s;
}

std::vector<CensusRow> enum_marked_spines(int c) {
    if (c < 1 || c > 4)
        throw Error("ScaleExceeded",
                    "census enumeration supports complexity 1 to 4");
    auto pats = admissible_patterns();
    std::vector<CensusRow> out;
    for (int k = 1; k <= c; ++k) {
        std::vector<Graph4> graphs = enum_4valent_graphs(k);
        std::set<std::string> seen;
        for (size_t gi = 0; gi < graphs.size(); ++gi) {
            std::vector<int> idx(k, 0);
            while (true) {
                std::vector<MarkerPattern> assign(k);
                for (int v = 0; v < k; ++v) assign[v] = pats[idx[v]];
                MarkedSpine s = census_spine(graphs[gi], assign);
                std::string code = canonical_form(s);
                if (seen.insert(code).second) {
                    ResolvedSurface r = resolve_T(s);
                    CensusRow row;
                    row.c = k;
                    row.graph_id = static_cast<int>(gi);
                    row.patterns = assign;
                    row.orientable = r.orientable();
                    row.res_chi = r.total_chi();
                    row.code = code;
                    out.push_back(std::move(row));
                }
                int d = k - 1;
                while (d >= 0 && ++idx[d] == 12) idx[d--] = 0;
                if (d < 0) break;
            }
        }
    }
    return out;
}

bool bound_check(int c) {
    std::vector<CensusRow> rows = enum_marked_spines(c);
    for (int k = 1; k <= c; ++k) {
        std::set<std::string> codes;
        long count = 0;
        for (const CensusRow& r : rows)
            if (r.c == k) {
                ++count;
                codes.insert(r.code);
            }
        long bound = g4_count(k);
        for (int i = 0; i < k; ++i) bound *= 12;
        if (count > bound) return false;
        if (static_cast<long>(codes.size()) != count) return false;
    }
    return true;
}

std::string census_csv(const std::vector<CensusRow>& rows) {
    std::ostringstream os;
    os << "complexity,graph,patterns,orientable,res_chi\n";
    for (const CensusRow& r : rows) {
        os << r.c << "," << r.graph_id << ",";
        for (size_t i = 0; i < r.patterns.size(); ++i) {
            if (i) os << ";";
            os << r.patterns[i].apex << "-" << r.patterns[i].partner;
        }
        os << "," << (r.orientable ? 1 : 0) << "," << r.res_chi << "\n";
    }
    return os.str();
}

} // namespace gradspine
