#include "gradspine/fold_diagram.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>

namespace gradspine {

int FoldDiagram::site_sign(const ArcSite& s) const {
    const auto& ev = curves.at(s.curve);
    const auto& sg = seg_sign.at(s.curve);
    if (ev.empty()) return sg.at(0);
    int n = static_cast<int>(ev.size());
    // the arc just before event `gap` is the arc following event gap-1
    return sg.at(((s.gap - 1) % n + n) % n);
}

void FoldDiagram::validate() const {
    if (curves.size() != seg_sign.size())
        throw Error("InvalidDiagram", "curve/label array size mismatch");
    std::map<int, int> cross_ends, cross_upper, cusp_ends;
    for (size_t c = 0; c < curves.size(); ++c) {
        const auto& ev = curves[c];
        const auto& sg = seg_sign[c];
        size_t expect = ev.empty() ? 1 : ev.size();
        if (sg.size() != expect)
            throw Error("InvalidDiagram", "bad label count on curve " +
                                              std::to_string(c));
        for (int s : sg)
            if (s != 1 && s != -1)
                throw Error("InvalidDiagram", "labels must be +1 or -1");
        int n = static_cast<int>(ev.size());
        for (int k = 0; k < n; ++k) {
            const DiagEvent& e = ev[k];
            int before = sg[(k - 1 + n) % n];
            int after = sg[k];
            if (e.kind == DiagEvent::Kind::Cusp) {
                if (e.id < 0 || e.id >= cusp_count())
                    throw Error("InvalidDiagram", "cusp id out of range");
                cusp_ends[e.id]++;
                if (before == after)
                    throw Error("InvalidDiagram", "label does not flip at a cusp");
            } else {
                if (e.id < 0 || e.id >= crossing_count())
                    throw Error("InvalidDiagram", "crossing id out of range");
                cross_ends[e.id]++;
                if (e.upper) cross_upper[e.id]++;
                if (before != after)
                    throw Error("InvalidDiagram", "label flips at a crossing");
                if (after != 1)
                    throw Error("InvalidDiagram", "crossing on a minus arc");
            }
        }
    }
    for (int i = 0; i < crossing_count(); ++i) {
        if (cross_ends[i] != 2)
            throw Error("InvalidDiagram",
                        "crossing " + std::to_string(i) + " must have two ends");
        if (cross_upper[i] != 1)
            throw Error("InvalidDiagram",
                        "crossing " + std::to_string(i) + " needs one upper end");
        if (crossings[i].polarity != 1 && crossings[i].polarity != -1)
            throw Error("InvalidDiagram", "crossing polarity must be +1 or -1");
    }
    for (int i = 0; i < cusp_count(); ++i) {
        if (cusp_ends[i] != 1)
            throw Error("InvalidDiagram",
                        "cusp " + std::to_string(i) + " must appear exactly once");
        if (std::abs(cusps[i].first) != 1 || std::abs(cusps[i].second) != 1)
            throw Error("InvalidDiagram", "cusp polarities must be +1 or -1");
    }
    // bounding cusps of every plus arc differ in exactly one polarity
    for (size_t c = 0; c < curves.size(); ++c) {
        const auto& ev = curves[c];
        int n = static_cast<int>(ev.size());
        for (int k = 0; k < n; ++k) {
            if (ev[k].kind != DiagEvent::Kind::Cusp) continue;
            if (seg_sign[c][k] != 1) continue;   // the arc leaving this cusp
            // walk to the cusp that ends this plus arc
            int j = (k + 1) % n;
            while (ev[j].kind != DiagEvent::Kind::Cusp) j = (j + 1) % n;
            const DiagCusp& a = cusps[ev[k].id];
            const DiagCusp& b = cusps[ev[j].id];
            int diff = (a.first != b.first) + (a.second != b.second);
            if (diff != 1)
                throw Error("InvalidDiagram",
                            "plus arc bounded by cusps differing in " +
                                std::to_string(diff) + " polarities");
        }
    }
}

CancelVerdict cancel_verdict(const DiagCusp& a, const DiagCusp& b) {
    bool same_first = a.first == b.first;
    bool same_second = a.second == b.second;
    if (same_first && !same_second) return CancelVerdict::TopologyChanging;
    if (!same_first && same_second) return CancelVerdict::TopologyPreserving;
    return CancelVerdict::Forbidden;
}

namespace {

struct EventPos {
    int curve = -1, pos = -1;
};

EventPos find_cusp_event(const FoldDiagram& d, int cusp) {
    for (size_t c = 0; c < d.curves.size(); ++c)
        for (size_t k = 0; k < d.curves[c].size(); ++k)
            if (d.curves[c][k].kind == DiagEvent::Kind::Cusp &&
                d.curves[c][k].id == cusp)
                return {static_cast<int>(c), static_cast<int>(k)};
    throw Error("InvalidDiagram", "cusp " + std::to_string(cusp) + " not found");
}

} // namespace

CancelVerdict cusp_cancel_rule(const FoldDiagram& d, int cusp_a, int cusp_b) {
    if (cusp_a < 0 || cusp_a >= d.cusp_count() || cusp_b < 0 ||
        cusp_b >= d.cusp_count() || cusp_a == cusp_b)
        throw Error("BadParams", "invalid cusp indices");
    EventPos a = find_cusp_event(d, cusp_a);
    EventPos b = find_cusp_event(d, cusp_b);
    int n = static_cast<int>(d.curves[a.curve].size());
    bool adjacent = a.curve == b.curve &&
                    ((a.pos + 1) % n == b.pos || (b.pos + 1) % n == a.pos);
    if (!adjacent)
        throw Error("NotConsecutive", "cusps are not consecutive on a curve");
    return cancel_verdict(d.cusps[cusp_a], d.cusps[cusp_b]);
}

FoldDiagram diagram_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("invalid json: ") + e.what(), true);
    }
    FoldDiagram d;
    try {
        for (const auto& cr : j.value("crossings", nlohmann::json::array()))
            d.crossings.push_back({cr.at("polarity").get<int>()});
        for (const auto& cu : j.value("cusps", nlohmann::json::array()))
            d.cusps.push_back(
                {cu.at("first").get<int>(), cu.at("second").get<int>()});
        for (const auto& c : j.at("curves")) {
            std::vector<DiagEvent> ev;
            for (const auto& e : c.value("events", nlohmann::json::array())) {
                DiagEvent de;
                std::string kind = e.at("kind").get<std::string>();
                if (kind == "crossing") de.kind = DiagEvent::Kind::Crossing;
                else if (kind == "cusp") de.kind = DiagEvent::Kind::Cusp;
                else throw Error("ParseError", "unknown event kind " + kind, true);
                de.id = e.at("id").get<int>();
                de.upper = e.value("upper", false);
                ev.push_back(de);
            }
            std::vector<int> sg;
            for (const auto& s : c.at("signs")) sg.push_back(s.get<int>());
            d.curves.push_back(std::move(ev));
            d.seg_sign.push_back(std::move(sg));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("bad diagram fields: ") + e.what(), true);
    }
    d.validate();
    return d;
}

std::string diagram_to_json(const FoldDiagram& d) {
    nlohmann::json j;
    j["crossings"] = nlohmann::json::array();
    for (const auto& c : d.crossings) j["crossings"].push_back({{"polarity", c.polarity}});
    j["cusps"] = nlohmann::json::array();
    for (const auto& c : d.cusps)
        j["cusps"].push_back({{"first", c.first}, {"second", c.second}});
    j["curves"] = nlohmann::json::array();
    for (size_t c = 0; c < d.curves.size(); ++c) {
        nlohmann::json curve;
        curve["events"] = nlohmann::json::array();
        for (const auto& e : d.curves[c]) {
            nlohmann::json ev;
            ev["kind"] = e.kind == DiagEvent::Kind::Crossing ? "crossing" : "cusp";
            ev["id"] = e.id;
            if (e.kind == DiagEvent::Kind::Crossing) ev["upper"] = e.upper;
            curve["events"].push_back(ev);
        }
        curve["signs"] = d.seg_sign[c];
        j["curves"].push_back(curve);
    }
    return j.dump(2);
}

std::vector<std::vector<int>> psi_form(const FoldDiagram& d) {
    int n = static_cast<int>(d.curves.size());
    std::vector<std::vector<int>> psi(n, std::vector<int>(n, 0));
    // find the upper and lower curve of each crossing
    std::vector<int> up(d.crossing_count(), -1), lo(d.crossing_count(), -1);
    for (int c = 0; c < n; ++c)
        for (const auto& e : d.curves[c])
            if (e.kind == DiagEvent::Kind::Crossing)
                (e.upper ? up : lo)[e.id] = c;
    for (int i = 0; i < d.crossing_count(); ++i) {
        if (up[i] == lo[i]) continue;   // self-crossings cancel in the form
        psi[up[i]][lo[i]] += d.crossings[i].polarity;
        psi[lo[i]][up[i]] -= d.crossings[i].polarity;
    }
    return psi;
}

std::pair<int, int> polarized_counts(const FoldDiagram& d) {
    int plus = 0, minus = 0;
    for (const auto& c : d.crossings) (c.polarity > 0 ? plus : minus)++;
    return {plus, minus};
}

int degree_h(const FoldDiagram& d) {
    int p = 0, m = 0;
    for (const auto& c : d.cusps) (c.first > 0 ? p : m)++;
    return (p - m) / 2;
}

} // namespace gradspine
