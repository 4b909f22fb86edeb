#include "gradspine/origami.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace gradspine {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

OrigamiCode parse_origami(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("invalid json: ") + e.what(), true);
    }
    OrigamiCode code;
    try {
        std::map<std::string, int> vid, aid;
        for (const auto& v : j.at("vertices")) {
            std::string name = v.get<std::string>();
            if (vid.count(name)) throw Error("ParseError", "duplicate vertex " + name, true);
            vid[name] = static_cast<int>(code.vertices.size());
            code.vertices.push_back(name);
        }
        auto vertex = [&](const std::string& n) {
            auto it = vid.find(n);
            if (it == vid.end()) throw Error("ParseError", "unknown vertex " + n, true);
            return it->second;
        };
        for (const auto& a : j.at("arcs")) {
            OrigamiArc arc;
            arc.name = a.at("name").get<std::string>();
            arc.from = a.at("from").get<std::string>();
            arc.to = a.at("to").get<std::string>();
            arc.kind = a.at("kind").get<std::string>();
            vertex(arc.from);
            vertex(arc.to);
            if (arc.kind != "shared" && arc.kind != "free" && arc.kind != "attached")
                throw Error("ParseError", "unknown arc kind " + arc.kind, true);
            if (aid.count(arc.name))
                throw Error("ParseError", "duplicate arc " + arc.name, true);
            aid[arc.name] = static_cast<int>(code.arcs.size());
            code.arcs.push_back(arc);
        }
        auto arc_index = [&](const std::string& n) {
            auto it = aid.find(n);
            if (it == aid.end()) throw Error("ParseError", "unknown arc " + n, true);
            return it->second;
        };
        for (const auto& p : j.at("polygons")) {
            OrigamiPolygon poly;
            for (const auto& s : p.at("boundary")) {
                BoundaryStep step;
                step.arc = arc_index(s.at("arc").get<std::string>());
                step.reversed = s.value("reversed", false);
                poly.boundary.push_back(step);
            }
            if (poly.boundary.empty())
                throw Error("ParseError", "empty polygon boundary", true);
            code.polygons.push_back(poly);
        }
        if (j.contains("identifications"))
            for (const auto& s : j.at("identifications")) {
                OrigamiIdent id;
                id.arc_a = arc_index(s.at("a").get<std::string>());
                id.arc_b = arc_index(s.at("b").get<std::string>());
                id.reversed = s.value("reversed", false);
                code.idents.push_back(id);
            }
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("bad origami fields: ") + e.what(), true);
    }
    return code;
}

namespace {

int find_vertex(const OrigamiCode& code, const std::string& name) {
    for (int i = 0; i < static_cast<int>(code.vertices.size()); ++i)
        if (code.vertices[i] == name) return i;
    throw Error("ParseError", "unknown vertex " + name, true);
}

UnionFind merged_vertices(const OrigamiCode& code) {
    UnionFind uf(static_cast<int>(code.vertices.size()));
    for (const auto& id : code.idents) {
        const auto& a = code.arcs[id.arc_a];
        const auto& b = code.arcs[id.arc_b];
        int af = find_vertex(code, a.from), at = find_vertex(code, a.to);
        int bf = find_vertex(code, b.from), bt = find_vertex(code, b.to);
        if (!id.reversed) {
            uf.unite(af, bf);
            uf.unite(at, bt);
        } else {
            uf.unite(af, bt);
            uf.unite(at, bf);
        }
    }
    return uf;
}

UnionFind merged_arcs(const OrigamiCode& code) {
    UnionFind uf(static_cast<int>(code.arcs.size()));
    for (const auto& id : code.idents) uf.unite(id.arc_a, id.arc_b);
    return uf;
}

} // namespace

void validate_origami(const OrigamiCode& code) {
    for (const auto& id : code.idents) {
        if (id.arc_a == id.arc_b)
            throw Error("PatternViolation", "arc identified with itself");
        if (code.arcs[id.arc_a].kind != code.arcs[id.arc_b].kind)
            throw Error("PatternViolation", "identified arcs of different kinds");
    }
    UnionFind vu = merged_vertices(code);
    UnionFind au = merged_arcs(code);

    // polygon boundaries must chain through merged vertices
    for (const auto& p : code.polygons) {
        int m = static_cast<int>(p.boundary.size());
        for (int i = 0; i < m; ++i) {
            const auto& cur = p.boundary[i];
            const auto& nxt = p.boundary[(i + 1) % m];
            const auto& ca = code.arcs[cur.arc];
            const auto& na = code.arcs[nxt.arc];
            int end = find_vertex(code, cur.reversed ? ca.from : ca.to);
            int start = find_vertex(code, nxt.reversed ? na.to : na.from);
            if (vu.find(end) != vu.find(start))
                throw Error("PatternViolation", "polygon boundary does not chain");
        }
    }

    // the complex must be a surface: each source arc bounds at most 2 sheets
    std::map<int, int> arc_steps;
    for (const auto& p : code.polygons)
        for (const auto& s : p.boundary) arc_steps[s.arc]++;
    for (const auto& [arc, n] : arc_steps)
        if (n > 2)
            throw Error("PatternViolation",
                        "arc " + code.arcs[arc].name + " bounds " + std::to_string(n) +
                            " sheets");

    // folding map multiplicity: at most 2 source arcs per image arc
    std::map<int, int> arc_class_size;
    for (int i = 0; i < static_cast<int>(code.arcs.size()); ++i)
        arc_class_size[au.find(i)]++;
    for (const auto& [cls, n] : arc_class_size)
        if (n > 2)
            throw Error("MultiplicityViolation",
                        "arc " + code.arcs[cls].name + " folds " + std::to_string(n) +
                            " arcs together (max 2)");

    // and at most 3 source vertices per image vertex
    std::map<int, int> vertex_class_size;
    for (int i = 0; i < static_cast<int>(code.vertices.size()); ++i)
        vertex_class_size[vu.find(i)]++;
    for (const auto& [cls, n] : vertex_class_size)
        if (n > 3)
            throw Error("MultiplicityViolation",
                        "vertex " + code.vertices[cls] + " folds " + std::to_string(n) +
                            " vertices together (max 3)");
}

Presentation presentation(const OrigamiCode& code) {
    validate_origami(code);
    UnionFind au = merged_arcs(code);

    // orientation of each arc relative to its class representative
    std::vector<int> rel_sign(code.arcs.size(), 1);
    for (const auto& id : code.idents)
        if (id.reversed) {
            // b keeps its sign; flip a relative to b's class representative
            rel_sign[id.arc_a] = -rel_sign[id.arc_b];
        } else {
            rel_sign[id.arc_a] = rel_sign[id.arc_b];
        }

    // generators: shared and free arc classes, in arc order
    std::map<int, int> gen_of_class;
    Presentation p;
    for (int i = 0; i < static_cast<int>(code.arcs.size()); ++i) {
        if (code.arcs[i].kind == "attached") continue;
        int cls = au.find(i);
        if (gen_of_class.count(cls)) continue;
        gen_of_class[cls] = static_cast<int>(p.generators.size());
        p.generators.push_back(code.arcs[cls].name);
    }

    std::vector<std::vector<int>> free_gens_per_poly;
    for (const auto& poly : code.polygons) {
        std::vector<int> rel;
        std::vector<int> frees;
        for (const auto& s : poly.boundary) {
            const auto& arc = code.arcs[s.arc];
            if (arc.kind == "attached") continue;
            int cls = au.find(s.arc);
            int g = gen_of_class.at(cls);
            int sign = (s.reversed ? -1 : 1) * rel_sign[s.arc];
            rel.push_back(sign * (g + 1));
            if (arc.kind == "free") frees.push_back(g);
        }
        p.relators.push_back(rel);
        free_gens_per_poly.push_back(frees);
    }

    // a sheet bounded by two free trajectories is removed together with the
    // lower-labelled one; repeating this peels independent free flaps
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t pi = 0; pi < p.relators.size() && !changed; ++pi) {
            if (free_gens_per_poly[pi].size() != 2) continue;
            int victim = *std::min_element(free_gens_per_poly[pi].begin(),
                                           free_gens_per_poly[pi].end());
            // only safe when the generator appears nowhere else
            int uses = 0;
            for (size_t q = 0; q < p.relators.size(); ++q)
                for (int letter : p.relators[q])
                    if (std::abs(letter) - 1 == victim) uses++;
            int in_this = 0;
            for (int letter : p.relators[pi])
                if (std::abs(letter) - 1 == victim) in_this++;
            if (uses != in_this || in_this == 0) continue;
            // drop relator pi and generator victim, shifting labels
            p.relators.erase(p.relators.begin() + pi);
            free_gens_per_poly.erase(free_gens_per_poly.begin() + pi);
            p.generators.erase(p.generators.begin() + victim);
            for (auto& rel : p.relators)
                for (auto& letter : rel) {
                    int g = std::abs(letter) - 1;
                    if (g > victim) letter += letter > 0 ? -1 : 1;
                }
            for (auto& fg : free_gens_per_poly)
                for (auto& g : fg)
                    if (g > victim) g--;
            changed = true;
        }
    }
    return p;
}

namespace {

std::vector<int> reduce_word(const std::vector<int>& w) {
    std::vector<int> out;
    for (int letter : w) {
        if (!out.empty() && out.back() == -letter) out.pop_back();
        else out.push_back(letter);
    }
    // cyclic reduction
    while (out.size() >= 2 && out.front() == -out.back()) {
        out.erase(out.begin());
        out.pop_back();
    }
    return out;
}

void drop_generator(Presentation& p, int gen) {
    p.generators.erase(p.generators.begin() + gen);
    for (auto& rel : p.relators)
        for (auto& letter : rel) {
            int g = std::abs(letter) - 1;
            if (g > gen) letter += letter > 0 ? -1 : 1;
        }
}

// replace generator `gen` by the word `sub` (in terms of other generators)
void substitute(Presentation& p, int gen, const std::vector<int>& sub) {
    std::vector<int> inv(sub.rbegin(), sub.rend());
    for (auto& letter : inv) letter = -letter;
    for (auto& rel : p.relators) {
        std::vector<int> out;
        for (int letter : rel) {
            int g = std::abs(letter) - 1;
            if (g != gen) {
                out.push_back(letter);
            } else {
                const auto& w = letter > 0 ? sub : inv;
                out.insert(out.end(), w.begin(), w.end());
            }
        }
        rel = out;
    }
    drop_generator(p, gen);
}

} // namespace

Presentation simplify(Presentation p) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& rel : p.relators) {
            auto red = reduce_word(rel);
            if (red != rel) {
                rel = red;
                changed = true;
            }
        }
        for (size_t i = 0; i < p.relators.size(); ++i)
            if (p.relators[i].empty()) {
                p.relators.erase(p.relators.begin() + i);
                changed = true;
                --i;
            }

        // length-1 relator: the generator is trivial
        for (size_t i = 0; i < p.relators.size() && !changed; ++i)
            if (p.relators[i].size() == 1) {
                int gen = std::abs(p.relators[i][0]) - 1;
                p.relators.erase(p.relators.begin() + i);
                substitute(p, gen, {});
                changed = true;
            }

        // length-2 relator: one generator equals (an inverse of) another
        for (size_t i = 0; i < p.relators.size() && !changed; ++i) {
            if (p.relators[i].size() != 2) continue;
            int a = p.relators[i][0], b = p.relators[i][1];
            int ga = std::abs(a) - 1, gb = std::abs(b) - 1;
            if (ga == gb) continue;   // a^2 type, not a substitution
            p.relators.erase(p.relators.begin() + i);
            // a b = 1  =>  ga = sign-adjusted gb (pre-drop letter indexing;
            // the substitution shifts labels itself)
            int target = (a > 0) ? -b : b;
            substitute(p, ga, {target});
            changed = true;
        }

        // generator used exactly once in exactly one relator: drop both
        for (int g = 0; g < static_cast<int>(p.generators.size()) && !changed; ++g) {
            int uses = 0;
            size_t host = 0;
            for (size_t i = 0; i < p.relators.size(); ++i)
                for (int letter : p.relators[i])
                    if (std::abs(letter) - 1 == g) {
                        uses++;
                        host = i;
                    }
            if (uses != 1) continue;
            p.relators.erase(p.relators.begin() + host);
            drop_generator(p, g);
            changed = true;
        }
    }
    return p;
}

int presentation_complexity(const Presentation& p) {
    int n = 0;
    for (const auto& rel : p.relators) n += static_cast<int>(rel.size());
    return n;
}

std::string relator_to_string(const Presentation& p, const std::vector<int>& relator) {
    std::string out;
    for (int letter : relator) {
        if (!out.empty()) out += " ";
        out += p.generators[std::abs(letter) - 1];
        if (letter < 0) out += "^-1";
    }
    return out.empty() ? "1" : out;
}

std::string presentation_to_string(const Presentation& p) {
    std::ostringstream os;
    os << "<";
    for (size_t i = 0; i < p.generators.size(); ++i)
        os << (i ? ", " : " ") << p.generators[i];
    os << " |";
    for (size_t i = 0; i < p.relators.size(); ++i)
        os << (i ? ", " : " ") << relator_to_string(p, p.relators[i]);
    os << " >";
    return os.str();
}

std::vector<long long> abelianization(const Presentation& p) {
    int n = static_cast<int>(p.generators.size());
    int m = static_cast<int>(p.relators.size());
    std::vector<std::vector<long long>> a(m, std::vector<long long>(n, 0));
    for (int i = 0; i < m; ++i)
        for (int letter : p.relators[i]) a[i][std::abs(letter) - 1] += letter > 0 ? 1 : -1;

    // Smith normal form diagonal by repeated gcd pivoting
    std::vector<long long> diag;
    int r = 0, c = 0;
    while (r < m && c < n) {
        // find a nonzero pivot in the remaining block
        int pr = -1, pc = -1;
        for (int i = r; i < m && pr < 0; ++i)
            for (int j = c; j < n; ++j)
                if (a[i][j] != 0) {
                    pr = i;
                    pc = j;
                    break;
                }
        if (pr < 0) break;
        std::swap(a[r], a[pr]);
        for (int i = 0; i < m; ++i) std::swap(a[i][c], a[i][pc]);
        bool clean = false;
        while (!clean) {
            clean = true;
            for (int i = r + 1; i < m; ++i)
                while (a[i][c] != 0) {
                    long long q = a[r][c] != 0 ? a[i][c] / a[r][c] : 0;
                    for (int j = c; j < n; ++j) a[i][j] -= q * a[r][j];
                    if (a[i][c] != 0) {
                        std::swap(a[r], a[i]);
                        clean = false;
                    }
                }
            for (int j = c + 1; j < n; ++j)
                while (a[r][j] != 0) {
                    long long q = a[r][c] != 0 ? a[r][j] / a[r][c] : 0;
                    for (int i = r; i < m; ++i) a[i][j] -= q * a[i][c];
                    if (a[r][j] != 0) {
                        for (int i = 0; i < m; ++i) std::swap(a[i][c], a[i][j]);
                        clean = false;
                    }
                }
        }
        diag.push_back(std::llabs(a[r][c]));
        ++r;
        ++c;
    }
    // divisibility chain
    for (size_t i = 0; i + 1 < diag.size(); ++i)
        for (size_t j = i + 1; j < diag.size(); ++j)
            if (diag[j] % diag[i] != 0) {
                long long g = std::gcd(diag[i], diag[j]);
                long long l = diag[i] / g * diag[j];
                diag[i] = g;
                diag[j] = l;
            }
    // pad with zeros for the free part
    while (static_cast<int>(diag.size()) < n) diag.push_back(0);
    return diag;
}

} // namespace gradspine
