#pragma once

#include <vector>

#include "rwp/interval.hpp"
#include "rwp/plant.hpp"
#include "rwp/region.hpp"
#include "rwp/stl.hpp"

namespace rwp {

/// Interval-bound propagation of a state box through the closed loop
/// (observation -> network -> action scaling -> dynamics) for T steps.
/// Returns T+1 boxes; box_t encloses every state reachable at step t from
/// box0. Throws DivergenceError if any bound exceeds 1e6 in magnitude.
std::vector<IntervalBox> propagate_box(const Plant& plant, const MlpParams& theta,
                                       const IntervalBox& box0, int T);

/// Sound-but-incomplete region check. Supported formula templates:
/// G[t1,t2](body) with body a boolean combination of affine predicates
/// (safety), or F[t1,t2](body) (reach, via the sufficient condition that
/// every trajectory's enclosure crosses at the same step). Returns 1 only
/// if every sub-box at the given uniform refinement depth passes; a return
/// of 0 implies nothing. `margin` adds a safety slack to every predicate.
int verify_region(const Plant& plant, const Formula& check, const MlpParams& theta,
                  const Region& region, int refine_depth, double margin = 0.0);

struct VerifyRecord {
  int region_id = 0;
  int result = 0;
  int refine_depth = 0;
  double seconds = 0.0;
};

/// Verifies all regions on a work pool; records are returned in region
/// order regardless of scheduling.
std::vector<VerifyRecord> verify_regions(const Plant& plant, const Formula& check,
                                         const MlpParams& theta, const std::vector<Region>& regions,
                                         int refine_depth, int threads, double margin = 0.0);

}  // namespace rwp
