#include "gradspine/spine.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace gradspine {

// ---------------------------------------------------------------------------
// marker patterns

int MarkerPattern::n_target(int s) const {
    int b1 = -1;
    for (int x = 0; x < 4; ++x)
        if (x != apex && x != partner) {
            b1 = x;
            break;
        }
    if (s == apex || s == partner) return b1;
    return partner;
}

std::array<MarkerPattern, 12> admissible_patterns() {
    std::array<MarkerPattern, 12> out{};
    int k = 0;
    for (int u = 0; u < 4; ++u)
        for (int a = 0; a < 4; ++a)
            if (a != u) out[k++] = MarkerPattern{u, a};
    return out;
}

bool raw_marking_admissible(const std::array<std::array<int, 2>, 4>& tn) {
    for (const MarkerPattern& p : admissible_patterns()) {
        bool match = true;
        for (int s = 0; s < 4 && match; ++s)
            match = tn[s][0] == p.t_target(s) && tn[s][1] == p.n_target(s);
        if (match) return true;
    }
    return false;
}

int MarkedSpine::complexity() const {
    int n = 0;
    for (const auto& v : vertices)
        if (v.kind == VertexKind::Q) ++n;
    return n;
}

// ---------------------------------------------------------------------------
// structural maps

namespace {

struct EndRef {
    int edge = -1;
    int side = 0;   // 0 = end a, 1 = end b
    bool operator<(const EndRef& o) const {
        return edge != o.edge ? edge < o.edge : side < o.side;
    }
    bool operator==(const EndRef& o) const {
        return edge == o.edge && side == o.side;
    }
};

const SpineEnd& end_of(const MarkedSpine& s, const EndRef& r) {
    return r.side == 0 ? s.edges[r.edge].a : s.edges[r.edge].b;
}

// (vertex, slot) -> edge end; empty diagnostic on success
std::string build_slot_map(const MarkedSpine& s,
                           std::map<std::pair<int, int>, EndRef>& out) {
    for (size_t e = 0; e < s.edges.size(); ++e)
        for (int side = 0; side < 2; ++side) {
            const SpineEnd& end = end_of(s, {static_cast<int>(e), side});
            if (end.vertex < 0 ||
                end.vertex >= static_cast<int>(s.vertices.size()))
                return "BadAttach: edge " + std::to_string(e) +
                       " end vertex out of range";
            auto key = std::make_pair(end.vertex, end.slot);
            if (out.count(key))
                return "BadAttach: vertex " + std::to_string(end.vertex) +
                       " slot " + std::to_string(end.slot) + " used twice";
            out[key] = {static_cast<int>(e), side};
        }
    for (size_t v = 0; v < s.vertices.size(); ++v) {
        int need = s.vertices[v].kind == VertexKind::Q       ? 4
                   : s.vertices[v].kind == VertexKind::Joint ? 2
                                                             : 1;
        for (int slot = 0; slot < need; ++slot)
            if (!out.count({static_cast<int>(v), slot}))
                return "BadAttach: vertex " + std::to_string(v) + " slot " +
                       std::to_string(slot) + " unoccupied";
        for (int slot = need; slot < 4; ++slot)
            if (out.count({static_cast<int>(v), slot}))
                return "BadAttach: vertex " + std::to_string(v) +
                       " has too many edge ends";
    }
    return "";
}

int page_of_class(const SpineEdge& e, char c) {
    for (int p = 0; p < 3; ++p)
        if (e.page_class[p] == c) return p;
    return -1;
}

// directed page index
int dp_index(int edge, int page, int dir) {
    return (edge * 3 + page) * 2 + (dir > 0 ? 0 : 1);
}

struct Tracer {
    const MarkedSpine& s;
    std::map<std::pair<int, int>, EndRef> slot_map;

    explicit Tracer(const MarkedSpine& sp) : s(sp) {
        std::string diag = build_slot_map(s, slot_map);
        if (!diag.empty()) throw Error("BadAttach", diag);
    }

    CircuitStep successor(const CircuitStep& st) const {
        EndRef arrive{st.edge, st.dir > 0 ? 1 : 0};
        const SpineEnd& end = end_of(s, arrive);
        const SpineVertex& v = s.vertices[end.vertex];
        if (v.kind == VertexKind::Q) {
            int t = end.attach[st.page];
            EndRef next = slot_map.at({end.vertex, t});
            const SpineEnd& nend = end_of(s, next);
            for (int q = 0; q < 3; ++q)
                if (nend.attach[q] == end.slot)
                    return {next.edge, q, next.side == 0 ? +1 : -1};
            throw Error("BadAttach", "no page returns to slot " +
                                         std::to_string(end.slot));
        }
        if (v.kind == VertexKind::Joint) {
            EndRef next = slot_map.at({end.vertex, 1 - end.slot});
            return {next.edge, end.attach[st.page], next.side == 0 ? +1 : -1};
        }
        // free end: turn around on the same edge
        return {st.edge, end.attach[st.page], -st.dir};
    }
};

} // namespace

std::vector<TracedCircuit> trace_circuits(const MarkedSpine& s) {
    Tracer tr(s);
    int ne = static_cast<int>(s.edges.size());
    std::vector<bool> visited(ne * 6, false);
    std::vector<TracedCircuit> out;
    for (int e = 0; e < ne; ++e)
        for (int p = 0; p < 3; ++p)
            for (int dir : {+1, -1}) {
                if (visited[dp_index(e, p, dir)]) continue;
                TracedCircuit c;
                CircuitStep st{e, p, dir};
                do {
                    visited[dp_index(st.edge, st.page, st.dir)] = true;
                    c.steps.push_back(st);
                    st = tr.successor(st);
                } while (!visited[dp_index(st.edge, st.page, st.dir)]);
                // merge the mirror circuit: mark its directed pages visited
                std::set<int> own;
                for (const CircuitStep& cs : c.steps)
                    own.insert(dp_index(cs.edge, cs.page, cs.dir));
                for (const CircuitStep& cs : c.steps) {
                    int rev = dp_index(cs.edge, cs.page, -cs.dir);
                    if (own.count(rev)) c.self_mirror = true;
                    visited[rev] = true;
                }
                out.push_back(std::move(c));
            }
    return out;
}

// ---------------------------------------------------------------------------
// validation

MarkerVerdict validate_markers(const MarkedSpine& s) {
    MarkerVerdict v;
    auto bad = [&](const std::string& msg) {
        v.ok = false;
        v.diagnostics.push_back(msg);
    };
    for (size_t i = 0; i < s.vertices.size(); ++i)
        if (s.vertices[i].kind == VertexKind::Q &&
            !s.vertices[i].pattern.valid())
            bad("InvalidPattern: vertex " + std::to_string(i));
    std::map<std::pair<int, int>, EndRef> slot_map;
    std::string diag = build_slot_map(s, slot_map);
    if (!diag.empty()) {
        bad(diag);
        return v;   // structure too broken to trace
    }
    for (size_t e = 0; e < s.edges.size(); ++e) {
        std::array<char, 3> cls = s.edges[e].page_class;
        std::sort(cls.begin(), cls.end());
        if (cls != std::array<char, 3>{'N', 'T', 'U'}) {
            bad("MarkerDiscontinuity: edge " + std::to_string(e) +
                " pages are not one T, one N, one U");
            continue;
        }
        for (int side = 0; side < 2; ++side) {
            const SpineEnd& end = end_of(s, {static_cast<int>(e), side});
            const SpineVertex& vx = s.vertices[end.vertex];
            const std::string where = "edge " + std::to_string(e) +
                                      (side == 0 ? " end a" : " end b");
            if (vx.kind == VertexKind::Q) {
                std::set<int> targets(end.attach.begin(), end.attach.end());
                bool ok_attach = targets.size() == 3 && !targets.count(end.slot);
                for (int t : targets)
                    if (t < 0 || t > 3) ok_attach = false;
                if (!ok_attach) {
                    bad("BadAttach: " + where + " is not a sector bijection");
                    continue;
                }
                if (!vx.pattern.valid()) continue;
                for (int p = 0; p < 3; ++p) {
                    bool is_t = s.edges[e].page_class[p] == 'T';
                    bool to_t = end.attach[p] == vx.pattern.t_target(end.slot);
                    if (is_t != to_t)
                        bad("MarkerDiscontinuity: " + where +
                            " vertical leg leaves its sector");
                }
            } else if (vx.kind == VertexKind::Joint) {
                bool perm = std::set<int>(end.attach.begin(), end.attach.end()) ==
                            std::set<int>{0, 1, 2};
                EndRef other = slot_map.at({end.vertex, 1 - end.slot});
                const SpineEnd& oend = end_of(s, other);
                bool inv = perm;
                for (int p = 0; p < 3 && inv; ++p)
                    inv = oend.attach[end.attach[p]] == p;
                if (!perm || !inv) {
                    bad("BadAttach: " + where + " joint pages are inconsistent");
                    continue;
                }
                for (int p = 0; p < 3; ++p) {
                    bool is_t = s.edges[e].page_class[p] == 'T';
                    bool to_t = s.edges[other.edge]
                                    .page_class[end.attach[p]] == 'T';
                    if (is_t != to_t)
                        bad("MarkerDiscontinuity: " + where +
                            " vertical leg breaks at a joint");
                }
            } else {
                int fixed = -1, nfixed = 0;
                bool inv = true;
                for (int p = 0; p < 3; ++p) {
                    int q = end.attach[p];
                    if (q < 0 || q > 2 || end.attach[q] != p) inv = false;
                    if (q == p) {
                        fixed = p;
                        ++nfixed;
                    }
                }
                if (!inv || nfixed != 1) {
                    bad("BadAttach: " + where +
                        " free end is not an involution with one fixed page");
                    continue;
                }
                char fixed_class = s.edges[e].page_class[fixed];
                if (vx.kind == VertexKind::FreeP) {
                    // grounds pair, curtain fixed
                    if (fixed_class != 'T')
                        bad("MarkerDiscontinuity: " + where +
                            " landing end must fix the vertical leg");
                } else {
                    // FreeO: the curtain and the preferred-side ground close
                    // up around the end; the far ground's rim stays free
                    int tpage = page_of_class(s.edges[e], 'T');
                    if (fixed_class != 'U' ||
                        s.edges[e].page_class[end.attach[tpage]] != 'N')
                        bad("MarkerDiscontinuity: " + where +
                            " fold end must pair curtain with preferred "
                            "ground");
                }
            }
        }
    }
    if (!v.ok) return v;
    std::vector<TracedCircuit> circuits = trace_circuits(s);
    std::vector<int> capped(circuits.size(), 0);
    for (size_t i = 0; i < s.cells.size(); ++i) {
        const SpineCell& c = s.cells[i];
        if (c.genus < 0 || c.punctures < 0 || (c.orient != 1 && c.orient != -1))
            bad("UncappedCircuit: cell " + std::to_string(i) + " malformed");
        for (int ci : c.circuits) {
            if (ci < 0 || ci >= static_cast<int>(circuits.size())) {
                bad("UncappedCircuit: cell " + std::to_string(i) +
                    " references a missing circuit");
                continue;
            }
            capped[ci]++;
        }
    }
    for (size_t i = 0; i < circuits.size(); ++i)
        if (capped[i] != 1)
            bad("UncappedCircuit: circuit " + std::to_string(i) + " capped " +
                std::to_string(capped[i]) + " times");
    return v;
}

void require_valid(const MarkedSpine& s) {
    MarkerVerdict v = validate_markers(s);
    if (v.ok) return;
    const std::string& msg = v.diagnostics.front();
    std::string code = msg.substr(0, msg.find(':'));
    throw Error(code, msg);
}

// ---------------------------------------------------------------------------
// resolution

namespace {

// union-find with orientation parity on faces
struct ParityUF {
    std::vector<int> parent;
    std::vector<int> rel;   // parity to parent: 0 same, 1 opposite
    std::vector<bool> conflict;
    explicit ParityUF(int n) : parent(n), rel(n, 0), conflict(n, false) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::pair<int, int> find(int x) {
        if (parent[x] == x) return {x, 0};
        auto [r, p] = find(parent[x]);
        parent[x] = r;
        rel[x] ^= p;
        return {r, rel[x]};
    }
    // parity 0: same orientation; 1: opposite
    void unite(int a, int b, int parity) {
        auto [ra, pa] = find(a);
        auto [rb, pb] = find(b);
        if (ra == rb) {
            if ((pa ^ pb) != parity)
                conflict[ra] = true;
            return;
        }
        parent[rb] = ra;
        rel[rb] = pa ^ pb ^ parity;
        conflict[ra] = conflict[ra] || conflict[rb];
    }
};

struct PlainUF {
    std::vector<int> parent;
    explicit PlainUF(int n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) { parent[find(b)] = find(a); }
};

} // namespace

int ResolvedSurface::total_chi() const {
    int t = 0;
    for (const auto& c : components) t += c.chi;
    return t;
}

bool ResolvedSurface::orientable() const {
    for (const auto& c : components)
        if (!c.orientable) return false;
    return true;
}

ResolvedSurface resolve_T(const MarkedSpine& s) {
    require_valid(s);
    Tracer tr(s);
    std::vector<TracedCircuit> circuits = trace_circuits(s);
    std::vector<int> cell_of(circuits.size(), -1);
    for (size_t i = 0; i < s.cells.size(); ++i)
        for (int ci : s.cells[i].circuits) cell_of[ci] = static_cast<int>(i);

    int ne = static_cast<int>(s.edges.size());
    int npages = 3 * ne;
    int nfaces = npages + static_cast<int>(s.cells.size());
    // per page: corners 0 Ea, 1 Eb, 2 Ra, 3 Rb; sides 0 E, 1 R, 2 Va, 3 Vb
    PlainUF corners(4 * npages), sides(4 * npages);
    ParityUF faces(nfaces);
    auto cid = [](int page, int c) { return 4 * page + c; };
    auto sid = [](int page, int sd) { return 4 * page + sd; };

    // glue the two ground pages of every edge along the singular line;
    // the vertical leg keeps a free line (it is cut loose)
    for (int e = 0; e < ne; ++e) {
        int pn = e * 3 + page_of_class(s.edges[e], 'N');
        int pu = e * 3 + page_of_class(s.edges[e], 'U');
        sides.unite(sid(pn, 0), sid(pu, 0));
        corners.unite(cid(pn, 0), cid(pu, 0));
        corners.unite(cid(pn, 1), cid(pu, 1));
        faces.unite(pn, pu, 1);   // both run the line a->b: opposite orients
    }
    // sheet continuations at vertices (sectors, joints, free-end wraps)
    std::set<std::tuple<int, int, int>> done;   // (edge, side, page)
    for (int e = 0; e < ne; ++e)
        for (int side = 0; side < 2; ++side) {
            const SpineEnd& end = end_of(s, {e, side});
            const SpineVertex& vx = s.vertices[end.vertex];
            for (int p = 0; p < 3; ++p) {
                if (done.count({e, side, p})) continue;
                int e2 = -1, side2 = 0, q = -1;
                if (vx.kind == VertexKind::Q) {
                    EndRef next = tr.slot_map.at({end.vertex, end.attach[p]});
                    const SpineEnd& nend = end_of(s, next);
                    e2 = next.edge;
                    side2 = next.side;
                    for (int r = 0; r < 3; ++r)
                        if (nend.attach[r] == end.slot) q = r;
                } else if (vx.kind == VertexKind::Joint) {
                    EndRef next = tr.slot_map.at({end.vertex, 1 - end.slot});
                    e2 = next.edge;
                    side2 = next.side;
                    q = end.attach[p];
                } else {
                    if (end.attach[p] == p) {
                        done.insert({e, side, p});
                        continue;   // folded wrap: free line, no constraint
                    }
                    e2 = e;
                    side2 = side;
                    q = end.attach[p];
                }
                done.insert({e, side, p});
                done.insert({e2, side2, q});
                int p1 = e * 3 + p, p2 = e2 * 3 + q;
                // V side indices: Va = 2, Vb = 3; corners (E, R) per side
                int s1 = side == 0 ? 2 : 3, s2 = side2 == 0 ? 2 : 3;
                int ec1 = side == 0 ? 0 : 1, ec2 = side2 == 0 ? 0 : 1;
                int rc1 = side == 0 ? 2 : 3, rc2 = side2 == 0 ? 2 : 3;
                sides.unite(sid(p1, s1), sid(p2, s2));
                corners.unite(cid(p1, ec1), cid(p2, ec2));
                corners.unite(cid(p1, rc1), cid(p2, rc2));
                // same-type V sides run the same way (R->E at a, E->R at b)
                faces.unite(p1, p2, side == side2 ? 1 : 0);
            }
        }
    // cells: orientation constraints along rims. The first traversal of a
    // page glues the cap to it; a second, reversed traversal is a fold: the
    // cap rim leaves the singular graph there and returns along a free
    // boundary arc, so each maximal folded run costs one edge of the complex.
    std::vector<int> fold_runs(s.cells.size(), 0);
    for (size_t ci = 0; ci < circuits.size(); ++ci) {
        int cell = cell_of[ci];
        if (cell < 0) continue;
        std::set<std::pair<int, int>> seen;
        std::vector<bool> folded(circuits[ci].steps.size(), false);
        for (size_t k = 0; k < circuits[ci].steps.size(); ++k) {
            const CircuitStep& st = circuits[ci].steps[k];
            if (!seen.insert({st.edge, st.page}).second) {
                folded[k] = true;
                continue;
            }
            int page = st.edge * 3 + st.page;
            faces.unite(npages + cell, page, st.dir > 0 ? 0 : 1);
        }
        int n = static_cast<int>(folded.size());
        for (int k = 0; k < n; ++k)
            if (folded[k] && !folded[(k - 1 + n) % n]) fold_runs[cell] += 1;
    }
    // stitch up: per-component tallies
    std::map<int, ResolvedComponent> comp;
    auto root_of_page = [&](int page) { return faces.find(page).first; };
    for (int p = 0; p < npages; ++p) comp[root_of_page(p)];   // ensure entry
    for (size_t i = 0; i < s.cells.size(); ++i)
        comp[faces.find(npages + static_cast<int>(i)).first];
    // faces
    for (int p = 0; p < npages; ++p) comp[root_of_page(p)].chi += 1;
    for (size_t i = 0; i < s.cells.size(); ++i) {
        const SpineCell& c = s.cells[i];
        comp[faces.find(npages + static_cast<int>(i)).first].chi +=
            2 - 2 * c.genus - static_cast<int>(c.circuits.size()) - c.punctures -
            fold_runs[i];
    }
    // corner and side orbits belong to their representative's page component
    std::set<int> corner_seen, side_seen;
    for (int p = 0; p < npages; ++p)
        for (int k = 0; k < 4; ++k) {
            int cr = corners.find(cid(p, k));
            if (corner_seen.insert(cr).second) comp[root_of_page(p)].chi += 1;
            int sr = sides.find(sid(p, k));
            if (side_seen.insert(sr).second) comp[root_of_page(p)].chi -= 1;
        }
    ResolvedSurface out;
    for (auto& [root, rc] : comp) {
        rc.orientable = !faces.conflict[faces.find(root).first];
        out.components.push_back(rc);
    }
    std::sort(out.components.begin(), out.components.end(),
              [](const ResolvedComponent& a, const ResolvedComponent& b) {
                  return a.chi != b.chi ? a.chi < b.chi
                                        : a.orientable < b.orientable;
              });
    return out;
}

// ---------------------------------------------------------------------------
// boundary chain branching

BranchVerdict check_branching(const MarkedSpine& s,
                              const std::vector<int>& orients) {
    std::vector<TracedCircuit> circuits = trace_circuits(s);
    std::vector<int> cell_of(circuits.size(), -1);
    for (size_t i = 0; i < s.cells.size(); ++i)
        for (int ci : s.cells[i].circuits) cell_of[ci] = static_cast<int>(i);
    BranchVerdict v;
    std::vector<int> coef(s.edges.size(), 0);
    for (size_t ci = 0; ci < circuits.size(); ++ci) {
        int cell = cell_of[ci];
        int o = (cell >= 0 && cell < static_cast<int>(orients.size()))
                    ? orients[cell]
                    : 0;
        for (const CircuitStep& st : circuits[ci].steps)
            coef[st.edge] += o * st.dir;
    }
    v.edge_multiplicity.resize(coef.size());
    for (size_t e = 0; e < coef.size(); ++e) {
        v.edge_multiplicity[e] = std::abs(coef[e]);
        if (v.edge_multiplicity[e] != 1) v.ok = false;
    }
    return v;
}

// ---------------------------------------------------------------------------
// canonical form

namespace {

// Apply a relabeling: vperm[v] = new vertex id, eperm[e] = new edge id,
// eflip[e] swaps ends, slot_perm[v] remaps slots, page_perm[e][p] = new page.
MarkedSpine relabel(const MarkedSpine& s, const std::vector<int>& vperm,
                    const std::vector<int>& eperm,
                    const std::vector<bool>& eflip,
                    const std::vector<std::array<int, 4>>& slot_perm,
                    const std::vector<std::array<int, 3>>& page_perm) {
    MarkedSpine out;
    out.vertices.resize(s.vertices.size());
    for (size_t v = 0; v < s.vertices.size(); ++v) {
        SpineVertex nv = s.vertices[v];
        if (nv.kind == VertexKind::Q) {
            nv.pattern.apex = slot_perm[v][nv.pattern.apex];
            nv.pattern.partner = slot_perm[v][nv.pattern.partner];
        }
        out.vertices[vperm[v]] = nv;
    }
    out.edges.resize(s.edges.size());
    for (size_t e = 0; e < s.edges.size(); ++e) {
        const SpineEdge& oe = s.edges[e];
        SpineEdge ne;
        auto remap_end = [&](const SpineEnd& end, int other_edge) {
            SpineEnd r;
            r.vertex = vperm[end.vertex];
            const SpineVertex& vx = s.vertices[end.vertex];
            r.slot = vx.kind == VertexKind::FreeO || vx.kind == VertexKind::FreeP
                         ? end.slot
                         : slot_perm[end.vertex][end.slot];
            for (int p = 0; p < 3; ++p) {
                int np = page_perm[e][p];
                if (vx.kind == VertexKind::Q)
                    r.attach[np] = slot_perm[end.vertex][end.attach[p]];
                else if (vx.kind == VertexKind::Joint)
                    r.attach[np] = page_perm[other_edge][end.attach[p]];
                else
                    r.attach[np] = page_perm[e][end.attach[p]];
            }
            return r;
        };
        // joints: the partner edge for page remapping
        auto partner_edge = [&](const SpineEnd& end) {
            if (s.vertices[end.vertex].kind != VertexKind::Joint)
                return static_cast<int>(e);
            for (size_t e2 = 0; e2 < s.edges.size(); ++e2)
                for (int side = 0; side < 2; ++side) {
                    const SpineEnd& cand =
                        side == 0 ? s.edges[e2].a : s.edges[e2].b;
                    if (cand.vertex == end.vertex && cand.slot == 1 - end.slot)
                        return static_cast<int>(e2);
                }
            return static_cast<int>(e);
        };
        ne.a = remap_end(oe.a, partner_edge(oe.a));
        ne.b = remap_end(oe.b, partner_edge(oe.b));
        for (int p = 0; p < 3; ++p)
            ne.page_class[page_perm[e][p]] = oe.page_class[p];
        if (eflip[e]) std::swap(ne.a, ne.b);
        out.edges[eperm[e]] = ne;
    }
    // cells follow circuits; retrace on the relabeled spine afterwards
    out.cells = s.cells;
    return out;
}

std::string encode(const MarkedSpine& s) {
    std::ostringstream os;
    for (const auto& v : s.vertices) {
        os << "v" << static_cast<int>(v.kind);
        if (v.kind == VertexKind::Q)
            os << "p" << v.pattern.apex << v.pattern.partner;
        os << ";";
    }
    for (const auto& e : s.edges) {
        os << "e";
        for (const SpineEnd* end : {&e.a, &e.b}) {
            os << end->vertex << "." << end->slot << ".";
            for (int p = 0; p < 3; ++p) os << end->attach[p];
            os << "/";
        }
        for (char c : e.page_class) os << c;
        os << ";";
    }
    // cells encoded against the deterministic circuit order
    std::vector<TracedCircuit> circuits;
    bool traced = true;
    try {
        circuits = trace_circuits(s);
    } catch (const Error&) {
        traced = false;
    }
    if (traced) {
        std::vector<int> cell_of(circuits.size(), -1);
        for (size_t i = 0; i < s.cells.size(); ++i)
            for (int ci : s.cells[i].circuits)
                if (ci >= 0 && ci < static_cast<int>(circuits.size()))
                    cell_of[ci] = static_cast<int>(i);
        // group label: the smallest circuit index in the same cell
        for (size_t ci = 0; ci < circuits.size(); ++ci) {
            int cell = cell_of[ci];
            int group = -1, genus = -1, punct = -1, orient = 0;
            if (cell >= 0) {
                group = *std::min_element(s.cells[cell].circuits.begin(),
                                          s.cells[cell].circuits.end());
                genus = s.cells[cell].genus;
                punct = s.cells[cell].punctures;
                orient = s.cells[cell].orient;
            }
            os << "c" << group << "." << genus << "." << punct << "." << orient
               << ";";
        }
        // closed cells with no circuits
        std::vector<std::array<int, 3>> closed;
        for (const auto& c : s.cells)
            if (c.circuits.empty())
                closed.push_back({c.genus, c.punctures, c.orient});
        std::sort(closed.begin(), closed.end());
        for (auto& [g, p, o] : closed)
            os << "C" << g << "." << p << "." << o << ";";
    }
    return os.str();
}

// canonical slot order entering a Q vertex through slot s
std::array<int, 4> q_slot_order(const MarkerPattern& pat, int s) {
    std::array<int, 4> perm{-1, -1, -1, -1};
    perm[s] = 0;
    perm[pat.t_target(s)] = 1;
    int n = pat.n_target(s);
    if (perm[n] == -1)
        perm[n] = 2;
    for (int x = 0; x < 4; ++x)
        if (perm[x] == -1) perm[x] = perm[n] == 2 ? 3 : 2;
    // if n_target coincided with t_target (impossible: targets distinct)
    return perm;
}

} // namespace

std::string canonical_form(const MarkedSpine& s) {
    int nv = static_cast<int>(s.vertices.size());
    int ne = static_cast<int>(s.edges.size());
    if (ne == 0) return encode(s);
    std::string best;
    // one candidate labeling per starting directed edge (flag)
    for (int e0 = 0; e0 < ne; ++e0)
        for (int side0 = 0; side0 < 2; ++side0) {
            std::vector<int> vperm(nv, -1), eperm(ne, -1);
            std::vector<bool> eflip(ne, false);
            std::vector<std::array<int, 4>> slot_perm(
                nv, {0, 1, 2, 3});
            std::vector<std::array<int, 3>> page_perm(ne);
            for (int e = 0; e < ne; ++e) {
                // pages canonically ordered T, N, U
                int t = page_of_class(s.edges[e], 'T');
                int n = page_of_class(s.edges[e], 'N');
                int u = page_of_class(s.edges[e], 'U');
                if (t < 0 || n < 0 || u < 0) return encode(s);   // degenerate
                page_perm[e][t] = 0;
                page_perm[e][n] = 1;
                page_perm[e][u] = 2;
            }
            int next_v = 0, next_e = 0;
            std::vector<std::pair<int, int>> queue;   // (edge, entering side)
            auto discover_vertex = [&](int v, int via_slot) {
                if (vperm[v] != -1) return;
                vperm[v] = next_v++;
                const SpineVertex& vx = s.vertices[v];
                if (vx.kind == VertexKind::Q)
                    slot_perm[v] = q_slot_order(vx.pattern, via_slot);
                else if (vx.kind == VertexKind::Joint)
                    slot_perm[v] = via_slot == 0
                                       ? std::array<int, 4>{0, 1, 2, 3}
                                       : std::array<int, 4>{1, 0, 2, 3};
            };
            auto discover_edge = [&](int e, int entering_side) {
                if (eperm[e] != -1) return;
                eperm[e] = next_e++;
                eflip[e] = entering_side != 0;
                queue.push_back({e, entering_side});
            };
            const SpineEnd& start = end_of(s, {e0, side0});
            discover_vertex(start.vertex, start.slot);
            discover_edge(e0, side0);
            for (size_t qi = 0; qi < queue.size(); ++qi) {
                auto [e, in_side] = queue[qi];
                // walk to the far end, discover that vertex, then enqueue
                // the other edges around both endpoint vertices in canonical
                // slot order
                for (int side : {in_side, 1 - in_side}) {
                    const SpineEnd& end = end_of(s, {e, side});
                    discover_vertex(end.vertex, end.slot);
                    // enumerate this vertex's edge ends by relabeled slot
                    const SpineVertex& vx = s.vertices[end.vertex];
                    int nslots = vx.kind == VertexKind::Q       ? 4
                                 : vx.kind == VertexKind::Joint ? 2
                                                                : 1;
                    std::vector<std::pair<int, std::pair<int, int>>> order;
                    for (size_t e2 = 0; e2 < s.edges.size(); ++e2)
                        for (int sd = 0; sd < 2; ++sd) {
                            const SpineEnd& c = end_of(
                                s, {static_cast<int>(e2), sd});
                            if (c.vertex == end.vertex && c.slot < nslots)
                                order.push_back(
                                    {slot_perm[end.vertex][c.slot],
                                     {static_cast<int>(e2), sd}});
                        }
                    std::sort(order.begin(), order.end());
                    for (auto& [lbl, er] : order)
                        discover_edge(er.first, er.second);
                }
            }
            if (next_e != ne || next_v != nv) continue;   // disconnected
            MarkedSpine r =
                relabel(s, vperm, eperm, eflip, slot_perm, page_perm);
            // remap cell circuit indices: retrace on the relabeled spine and
            // match circuits by their directed page content
            std::string cand;
            try {
                std::vector<TracedCircuit> oldc = trace_circuits(s);
                std::vector<TracedCircuit> newc = trace_circuits(r);
                // a circuit maps to the new circuit containing the image of
                // its first step's page (either direction)
                auto find_new = [&](const CircuitStep& st) {
                    int e2 = eperm[st.edge];
                    int p2 = page_perm[st.edge][st.page];
                    for (size_t k = 0; k < newc.size(); ++k)
                        for (const CircuitStep& ns : newc[k].steps)
                            if (ns.edge == e2 && ns.page == p2)
                                return static_cast<int>(k);
                    return -1;
                };
                for (auto& cell : r.cells)
                    for (int& ci : cell.circuits)
                        ci = find_new(oldc[ci].steps.front());
                cand = encode(r);
            } catch (const Error&) {
                cand = encode(r);
            }
            if (best.empty() || cand < best) best = cand;
        }
    return best.empty() ? encode(s) : best;
}

bool is_isomorphic(const MarkedSpine& a, const MarkedSpine& b) {
    return canonical_form(a) == canonical_form(b);
}

// ---------------------------------------------------------------------------
// mushroom flip

MarkedSpine mushroom_flip(const MarkedSpine& s, int cell) {
    if (cell < 0 || cell >= static_cast<int>(s.cells.size()))
        throw Error("BadParams", "cell index out of range");
    const SpineCell& c = s.cells[cell];
    if (c.genus != 0 || c.punctures != 0 || c.circuits.size() != 1)
        throw Error("NotADiskCell", "cell " + std::to_string(cell) +
                                        " is not a disk");
    std::vector<TracedCircuit> circuits = trace_circuits(s);
    int ci = c.circuits.front();
    if (ci < 0 || ci >= static_cast<int>(circuits.size()))
        throw Error("NotADiskCell", "cell has no traced boundary");
    std::set<int> edges_on;
    for (const CircuitStep& st : circuits[ci].steps) {
        edges_on.insert(st.edge);
        EndRef arrive{st.edge, st.dir > 0 ? 1 : 0};
        const SpineEnd& end = end_of(s, arrive);
        VertexKind k = s.vertices[end.vertex].kind;
        if (k == VertexKind::FreeO || k == VertexKind::FreeP)
            throw Error("NotADiskCell",
                        "cell boundary touches a free end");
    }
    MarkedSpine out = s;
    out.cells[cell].orient = -out.cells[cell].orient;
    // the cap reversal swaps the preferred and unmarked sides along its rim
    for (int e : edges_on)
        for (char& cls : out.edges[e].page_class) {
            if (cls == 'N')
                cls = 'U';
            else if (cls == 'U')
                cls = 'N';
        }
    require_valid(out);
    return out;
}

// ---------------------------------------------------------------------------
// dot output

std::string to_dot(const MarkedSpine& s) {
    std::ostringstream os;
    os << "graph spine {\n";
    for (size_t v = 0; v < s.vertices.size(); ++v) {
        const SpineVertex& vx = s.vertices[v];
        os << "  v" << v << " [label=\"";
        switch (vx.kind) {
            case VertexKind::Q:
                os << "Q(" << vx.pattern.apex << "," << vx.pattern.partner
                   << ")";
                break;
            case VertexKind::FreeO: os << "freeO"; break;
            case VertexKind::FreeP: os << "freeP"; break;
            case VertexKind::Joint: os << "joint"; break;
        }
        os << "\"];\n";
    }
    for (size_t e = 0; e < s.edges.size(); ++e) {
        const SpineEdge& ed = s.edges[e];
        os << "  v" << ed.a.vertex << " -- v" << ed.b.vertex << " [label=\"e"
           << e << ":" << ed.page_class[0] << ed.page_class[1]
           << ed.page_class[2] << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace gradspine
