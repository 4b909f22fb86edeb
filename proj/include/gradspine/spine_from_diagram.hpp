#pragma once

#include "gradspine/fold_diagram.hpp"
#include "gradspine/spine.hpp"
#include "gradspine/tangle.hpp"

namespace gradspine {

// The combinatorial fold diagram of a mesh/direction pair: each plus arc or
// loop becomes a curve whose events are the tangle crossings ordered along
// it, bounded by its cusps; crossings carry the tangle polarities.
// Error("ProjectionMiss") when a fold point's downward ray exits through the
// minus region.
FoldDiagram build_fold_diagram(const TriMesh& mesh, const RegionLabeling& lab,
                               const std::vector<FoldCurve>& folds,
                               const std::vector<Cusp>& cusps, const Tangle& tangle);

// The derived spine: the plus region together with one curtain per plus arc,
// hanging down to its landing curve. Q vertices at crossings, FreeO/FreeP
// ends at cusps, joints on event-free landing circles; 2-cells grouped
// geometrically (plus-region pieces flood-filled between landing curves,
// curtain pieces, merged across fold creases).
//
// When the plus region has no plus folds at all (convex-like inputs) the
// spine has an empty singular graph and one cell per plus component whose
// punctures record the component's fold boundary circles; resolve_T then
// returns the plus region itself.
MarkedSpine spine_from_strata(const TriMesh& mesh, const RegionLabeling& lab,
                              const std::vector<FoldCurve>& folds,
                              const std::vector<Cusp>& cusps, const Tangle& tangle);

} // namespace gradspine
