#include "gradspine/diagram_moves.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace gradspine {

namespace {

struct End {
    int curve = -1;
    int pos = -1;
    bool upper = false;
};

std::pair<End, End> crossing_ends(const FoldDiagram& d, int id) {
    std::vector<End> ends;
    for (size_t c = 0; c < d.curves.size(); ++c)
        for (size_t k = 0; k < d.curves[c].size(); ++k) {
            const DiagEvent& e = d.curves[c][k];
            if (e.kind == DiagEvent::Kind::Crossing && e.id == id)
                ends.push_back({static_cast<int>(c), static_cast<int>(k), e.upper});
        }
    if (ends.size() != 2)
        throw Error("InvalidDiagram", "crossing " + std::to_string(id) +
                                          " does not have two ends");
    return {ends[0], ends[1]};
}

// Insert events before position `gap` of a curve; signs_after[i] labels the
// arc following the i-th inserted event.
void insert_at(FoldDiagram& d, int curve, int gap,
               const std::vector<DiagEvent>& evs,
               const std::vector<int>& signs_after) {
    auto& ev = d.curves.at(curve);
    auto& sg = d.seg_sign.at(curve);
    if (ev.empty()) {
        ev = evs;
        sg = signs_after;
        return;
    }
    ev.insert(ev.begin() + gap, evs.begin(), evs.end());
    sg.insert(sg.begin() + gap, signs_after.begin(), signs_after.end());
}

// Remove the listed (curve, pos) events, dropping their arc-label slots, then
// renumber crossing and cusp ids to stay contiguous.
FoldDiagram remove_events(const FoldDiagram& d,
                          const std::set<std::pair<int, int>>& gone) {
    FoldDiagram out;
    out.crossings = d.crossings;
    out.cusps = d.cusps;
    for (size_t c = 0; c < d.curves.size(); ++c) {
        std::vector<DiagEvent> ev;
        std::vector<int> sg;
        for (size_t k = 0; k < d.curves[c].size(); ++k) {
            if (gone.count({static_cast<int>(c), static_cast<int>(k)})) continue;
            ev.push_back(d.curves[c][k]);
            sg.push_back(d.seg_sign[c][k]);
        }
        if (ev.empty()) {
            // the surviving arc carries the label of the arc entering the
            // first removed event
            int n = static_cast<int>(d.curves[c].size());
            int first = 0;
            while (first < n &&
                   !gone.count({static_cast<int>(c), first}))
                ++first;
            sg = {n == 0 ? d.seg_sign[c][0]
                         : d.seg_sign[c][(first - 1 + n) % n]};
        }
        out.curves.push_back(std::move(ev));
        out.seg_sign.push_back(std::move(sg));
    }
    // drop unreferenced crossings/cusps and remap ids
    std::set<int> used_cross, used_cusp;
    for (const auto& cv : out.curves)
        for (const auto& e : cv)
            (e.kind == DiagEvent::Kind::Crossing ? used_cross : used_cusp)
                .insert(e.id);
    std::map<int, int> cross_map, cusp_map;
    std::vector<DiagCrossing> nc;
    for (int i = 0; i < out.crossing_count(); ++i)
        if (used_cross.count(i)) {
            cross_map[i] = static_cast<int>(nc.size());
            nc.push_back(out.crossings[i]);
        }
    std::vector<DiagCusp> nu;
    for (int i = 0; i < out.cusp_count(); ++i)
        if (used_cusp.count(i)) {
            cusp_map[i] = static_cast<int>(nu.size());
            nu.push_back(out.cusps[i]);
        }
    out.crossings = std::move(nc);
    out.cusps = std::move(nu);
    for (auto& cv : out.curves)
        for (auto& e : cv)
            e.id = (e.kind == DiagEvent::Kind::Crossing ? cross_map : cusp_map)
                       .at(e.id);
    return out;
}

bool adjacent_positions(int n, int p, int q) {
    return n >= 2 && ((p + 1) % n == q || (q + 1) % n == p);
}

} // namespace

FoldDiagram alpha_move(const FoldDiagram& d, const ArcSite& a, const ArcSite& b) {
    if (d.site_sign(a) != 1 || d.site_sign(b) != 1)
        throw Error("SiteObstructed", "both sites of the over-push must lie on plus arcs");
    FoldDiagram out = d;
    int c1 = out.crossing_count();
    int c2 = c1 + 1;
    out.crossings.push_back({+1});
    out.crossings.push_back({-1});
    std::vector<DiagEvent> over = {{DiagEvent::Kind::Crossing, c1, true},
                                   {DiagEvent::Kind::Crossing, c2, true}};
    std::vector<DiagEvent> under = {{DiagEvent::Kind::Crossing, c1, false},
                                    {DiagEvent::Kind::Crossing, c2, false}};
    std::vector<int> plus2 = {1, 1};
    if (a.curve == b.curve) {
        // insert at the larger gap first so the smaller index stays valid
        if (a.gap >= b.gap) {
            insert_at(out, a.curve, a.gap, over, plus2);
            insert_at(out, b.curve, b.gap, under, plus2);
        } else {
            insert_at(out, b.curve, b.gap, under, plus2);
            insert_at(out, a.curve, a.gap, over, plus2);
        }
    } else {
        insert_at(out, a.curve, a.gap, over, plus2);
        insert_at(out, b.curve, b.gap, under, plus2);
    }
    out.validate();
    return out;
}

FoldDiagram alpha_inverse(const FoldDiagram& d, int crossing_a, int crossing_b) {
    if (crossing_a < 0 || crossing_a >= d.crossing_count() || crossing_b < 0 ||
        crossing_b >= d.crossing_count() || crossing_a == crossing_b)
        throw Error("BadParams", "invalid crossing indices");
    if (d.crossings[crossing_a].polarity + d.crossings[crossing_b].polarity != 0)
        throw Error("SiteObstructed", "bigon crossings must have opposite polarity");
    auto [a0, a1] = crossing_ends(d, crossing_a);
    auto [b0, b1] = crossing_ends(d, crossing_b);
    End au = a0.upper ? a0 : a1, al = a0.upper ? a1 : a0;
    End bu = b0.upper ? b0 : b1, bl = b0.upper ? b1 : b0;
    int nu = static_cast<int>(d.curves[au.curve].size());
    int nl = static_cast<int>(d.curves[al.curve].size());
    bool bigon = au.curve == bu.curve && al.curve == bl.curve &&
                 adjacent_positions(nu, au.pos, bu.pos) &&
                 adjacent_positions(nl, al.pos, bl.pos);
    if (!bigon)
        throw Error("SiteObstructed",
                    "crossings do not bound an empty same-over bigon");
    FoldDiagram out = remove_events(
        d, {{au.curve, au.pos}, {bu.curve, bu.pos}, {al.curve, al.pos},
            {bl.curve, bl.pos}});
    out.validate();
    return out;
}

FoldDiagram beta_move(const FoldDiagram& d, int c0, int c1, int c2) {
    int ids[3] = {c0, c1, c2};
    for (int id : ids)
        if (id < 0 || id >= d.crossing_count())
            throw Error("BadParams", "invalid crossing index");
    if (c0 == c1 || c1 == c2 || c0 == c2)
        throw Error("BadParams", "triangle crossings must be distinct");
    std::pair<End, End> ends[3] = {crossing_ends(d, c0), crossing_ends(d, c1),
                                   crossing_ends(d, c2)};
    // Each pair of triangle crossings must have one end apiece sitting on
    // consecutive positions of one curve: that shared passage is a triangle
    // side. Every end is used by exactly one side.
    struct Side {
        int curve = -1;
        int i = -1, j = -1;       // crossing indices 0..2
        End ei, ej;               // the two adjacent ends, ei before ej
    };
    std::vector<Side> sides;
    bool used[3][2] = {{false, false}, {false, false}, {false, false}};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            bool found = false;
            for (int ai = 0; ai < 2 && !found; ++ai)
                for (int aj = 0; aj < 2 && !found; ++aj) {
                    End ei = ai ? ends[i].second : ends[i].first;
                    End ej = aj ? ends[j].second : ends[j].first;
                    if (used[i][ai] || used[j][aj]) continue;
                    if (ei.curve != ej.curve) continue;
                    int n = static_cast<int>(d.curves[ei.curve].size());
                    if (!adjacent_positions(n, ei.pos, ej.pos)) continue;
                    if ((ej.pos + 1) % n == ei.pos) std::swap(ei, ej);
                    sides.push_back({ei.curve, i, j, ei, ej});
                    used[i][ai] = used[j][aj] = true;
                    found = true;
                }
            if (!found)
                throw Error("IncompatibleOrder",
                            "crossings do not bound an empty triangle");
        }
    // Height order of the three passages from the upper bits: at the crossing
    // shared by sides s and t, the side whose end is upper passes over.
    int above[3][3] = {};            // above[s][t] = 1 when side s is over side t
    for (int k = 0; k < 3; ++k) {
        // crossing k joins the two sides not containing... each crossing
        // belongs to exactly two sides (its two ends).
        int s0 = -1, s1 = -1;
        for (int s = 0; s < 3; ++s)
            if (sides[s].i == k || sides[s].j == k) (s0 < 0 ? s0 : s1) = s;
        const Side& A = sides[s0];
        // the end of side s0 that belongs to crossing k
        End ea = (d.curves[A.curve][A.ei.pos].id == k) ? A.ei : A.ej;
        if (ea.upper)
            above[s0][s1] = 1;
        else
            above[s1][s0] = 1;
    }
    // consistent strand order = acyclic relation: one side over both, one under both
    int top = -1, bot = -1;
    for (int s = 0; s < 3; ++s) {
        int over = above[s][0] + above[s][1] + above[s][2];
        if (over == 2) top = s;
        if (over == 0) bot = s;
    }
    if (top < 0 || bot < 0)
        throw Error("IncompatibleOrder",
                    "triangle strands have a cyclic over/under order");
    FoldDiagram out = d;
    // flip the triangle: swap the two adjacent events on every side
    for (const Side& s : sides)
        std::swap(out.curves[s.curve][s.ei.pos], out.curves[s.curve][s.ej.pos]);
    // the move's complexity jump: one extra oplus crossing between the top and
    // bottom strands, just past the flipped triangle
    int nc = out.crossing_count();
    out.crossings.push_back({+1});
    int gap_top = sides[top].ej.pos + 1;
    int gap_bot = sides[bot].ej.pos + 1;
    std::vector<DiagEvent> et = {{DiagEvent::Kind::Crossing, nc, true}};
    std::vector<DiagEvent> eb = {{DiagEvent::Kind::Crossing, nc, false}};
    if (sides[top].curve == sides[bot].curve && gap_top < gap_bot) {
        insert_at(out, sides[bot].curve, gap_bot, eb, {1});
        insert_at(out, sides[top].curve, gap_top, et, {1});
    } else {
        insert_at(out, sides[top].curve, gap_top, et, {1});
        if (sides[top].curve == sides[bot].curve && gap_bot >= gap_top)
            gap_bot += 1;
        insert_at(out, sides[bot].curve, gap_bot, eb, {1});
    }
    out.validate();
    return out;
}

FoldDiagram cancel_cusps(const FoldDiagram& d, int cusp_a, int cusp_b) {
    CancelVerdict v = cusp_cancel_rule(d, cusp_a, cusp_b);   // NotConsecutive here
    if (v == CancelVerdict::Forbidden)
        throw Error("ForbiddenPair", "cusp flavors forbid cancellation");
    std::set<std::pair<int, int>> gone;
    for (size_t c = 0; c < d.curves.size(); ++c)
        for (size_t k = 0; k < d.curves[c].size(); ++k) {
            const DiagEvent& e = d.curves[c][k];
            if (e.kind == DiagEvent::Kind::Cusp &&
                (e.id == cusp_a || e.id == cusp_b))
                gone.insert({static_cast<int>(c), static_cast<int>(k)});
        }
    FoldDiagram out = remove_events(d, gone);
    out.validate();
    return out;
}

FoldDiagram insert_cusp_pair(const FoldDiagram& d, const ArcSite& site,
                             const DiagCusp& fa, const DiagCusp& fb) {
    if (d.site_sign(site) != 1)
        throw Error("SiteObstructed", "cusp pairs insert into plus arcs only");
    if (cancel_verdict(fa, fb) == CancelVerdict::Forbidden)
        throw Error("ForbiddenPair", "cusp pair flavors are forbidden");
    FoldDiagram out = d;
    int ia = out.cusp_count();
    out.cusps.push_back(fa);
    out.cusps.push_back(fb);
    insert_at(out, site.curve, site.gap,
              {{DiagEvent::Kind::Cusp, ia, false},
               {DiagEvent::Kind::Cusp, ia + 1, false}},
              {-1, 1});
    try {
        out.validate();
    } catch (const Error&) {
        throw Error("ForbiddenPair",
                    "insertion breaks the one-polarity rule for a plus arc");
    }
    return out;
}

namespace {

// Consecutive cusp pair whose flavors allow cancellation; the arc between
// consecutive events is automatically crossing-free.
bool find_cancellable(const FoldDiagram& d, int& id_a, int& id_b) {
    for (size_t c = 0; c < d.curves.size(); ++c) {
        const auto& ev = d.curves[c];
        int n = static_cast<int>(ev.size());
        for (int k = 0; k < n; ++k) {
            const DiagEvent& e0 = ev[k];
            const DiagEvent& e1 = ev[(k + 1) % n];
            if (n < 2 || e0.kind != DiagEvent::Kind::Cusp ||
                e1.kind != DiagEvent::Kind::Cusp)
                continue;
            if (cancel_verdict(d.cusps[e0.id], d.cusps[e1.id]) !=
                CancelVerdict::Forbidden) {
                id_a = e0.id;
                id_b = e1.id;
                return true;
            }
        }
    }
    return false;
}

const DiagCusp kFlavors[4] = {{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}};

} // namespace

EliminationResult eliminate_cusps(const FoldDiagram& d) {
    d.validate();
    EliminationResult res;
    res.diagram = d;
    int cap = std::max(16, 10 * d.cusp_count());
    int steps = 0;
    while (res.diagram.cusp_count() > 0) {
        if (steps >= cap)
            throw Error("NonTerminating",
                        "cusp elimination exceeded " + std::to_string(cap) +
                            " steps");
        int a = -1, b = -1;
        if (find_cancellable(res.diagram, a, b)) {
            res.log.push_back("cancel cusps " + std::to_string(a) + "," +
                              std::to_string(b));
            res.diagram = cancel_cusps(res.diagram, a, b);
            ++steps;
            continue;
        }
        // blocked: try a dove-tail insertion adjacent to some cusp that
        // creates a cancellable consecutive pair
        bool unlocked = false;
        for (size_t c = 0; c < res.diagram.curves.size() && !unlocked; ++c) {
            int n = static_cast<int>(res.diagram.curves[c].size());
            for (int k = 0; k < n && !unlocked; ++k) {
                if (res.diagram.curves[c][k].kind != DiagEvent::Kind::Cusp)
                    continue;
                for (int gap : {k, k + 1}) {
                    ArcSite site{static_cast<int>(c), gap % std::max(1, n)};
                    if (res.diagram.site_sign(site) != 1) continue;
                    for (const DiagCusp& fa : kFlavors)
                        for (const DiagCusp& fb : kFlavors) {
                            try {
                                FoldDiagram t =
                                    insert_cusp_pair(res.diagram, site, fa, fb);
                                int ta, tb;
                                if (find_cancellable(t, ta, tb)) {
                                    res.log.push_back("insert dove-tail pair");
                                    res.diagram = std::move(t);
                                    ++steps;
                                    unlocked = true;
                                }
                            } catch (const Error&) {
                            }
                            if (unlocked) break;
                        }
                    if (unlocked) break;
                }
            }
        }
        if (!unlocked)
            throw Error("NonTerminating",
                        "no admissible cancellation or unlocking insertion");
    }
    return res;
}

FoldDiagram random_diagram(Rng& rng, int n_curves, int n_steps) {
    if (n_curves < 1) throw Error("BadParams", "need at least one curve");
    FoldDiagram d;
    d.curves.assign(n_curves, {});
    d.seg_sign.assign(n_curves, {1});
    auto plus_sites = [&]() {
        std::vector<ArcSite> sites;
        for (size_t c = 0; c < d.curves.size(); ++c) {
            int n = static_cast<int>(d.curves[c].size());
            for (int g = 0; g < std::max(1, n); ++g) {
                ArcSite s{static_cast<int>(c), g};
                if (d.site_sign(s) == 1) sites.push_back(s);
            }
        }
        return sites;
    };
    auto neighbors = [](const DiagCusp& f) {
        return std::array<DiagCusp, 2>{DiagCusp{-f.first, f.second},
                                       DiagCusp{f.first, -f.second}};
    };
    for (int step = 0; step < n_steps; ++step) {
        int op = static_cast<int>(rng.next() % 4);
        if (op == 0) {
            auto sites = plus_sites();
            if (sites.empty()) continue;
            ArcSite a = sites[rng.next() % sites.size()];
            ArcSite b = sites[rng.next() % sites.size()];
            d = alpha_move(d, a, b);
        } else if (op == 3) {
            int a, b;
            if (find_cancellable(d, a, b)) d = cancel_cusps(d, a, b);
        } else {
            auto sites = plus_sites();
            if (sites.empty()) continue;
            ArcSite s = sites[rng.next() % sites.size()];
            // bounding cusps of the host plus arc; flavors must keep every
            // new plus arc's ends one polarity apart
            const auto& ev = d.curves[s.curve];
            int n = static_cast<int>(ev.size());
            DiagCusp x{+1, +1}, y{+1, +1};
            bool bounded = false;
            for (int back = 1; back <= n; ++back) {
                const DiagEvent& e = ev[((s.gap - back) % n + n) % n];
                if (e.kind == DiagEvent::Kind::Cusp) {
                    x = d.cusps[e.id];
                    bounded = true;
                    break;
                }
            }
            for (int fwd = 0; fwd < n; ++fwd) {
                const DiagEvent& e = ev[(s.gap + fwd) % n];
                if (e.kind == DiagEvent::Kind::Cusp) {
                    y = d.cusps[e.id];
                    break;
                }
            }
            DiagCusp fa, fb;
            if (!bounded) {
                fa = kFlavors[rng.next() % 4];
                fb = fa;   // the pair also bounds the wrap-around plus arc
                fb = neighbors(fa)[rng.next() % 2];
                // keep d(fb, fa) == 1 for the wrap-around arc: already true
            } else {
                auto nx = neighbors(x);
                fa = nx[rng.next() % 2];
                auto nf = neighbors(fa);
                std::vector<DiagCusp> ok;
                for (const DiagCusp& cand : nf)
                    if ((cand.first != y.first) + (cand.second != y.second) == 1)
                        ok.push_back(cand);
                if (ok.empty()) continue;
                fb = ok[rng.next() % ok.size()];
            }
            d = insert_cusp_pair(d, s, fa, fb);
        }
    }
    d.validate();
    return d;
}

} // namespace gradspine
