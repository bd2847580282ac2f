#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rwp/common.hpp"

namespace rwp {

/// Axis-aligned cell of the initial-state partition, over the free
/// initial-state coordinates.
struct Region {
  int id = 0;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// Grid partition of [lo, hi] with the given per-dimension steps. Cells are
/// ordered lexicographically by grid index; a step that does not divide the
/// extent leaves a truncated final cell at the boundary.
std::vector<Region> partition(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                              const Eigen::VectorXd& steps);

/// K i.i.d. uniform points strictly inside the region, from a deterministic
/// generator keyed by (seed, region id).
std::vector<Eigen::VectorXd> sample_region(const Region& r, int K, std::uint64_t seed);

enum class RegionClass { Verified, Unknown, Failed };

const char* region_class_name(RegionClass c);
RegionClass region_class_from_name(const std::string& name);

/// Three-way bookkeeping over regions: protected (verified), unknown
/// (unverified, no sampled failure) and failed (some sampled failure).
struct PartitionState {
  std::vector<Region> regions;
  std::vector<std::vector<Eigen::VectorXd>> samples;  // per region, size K each
  std::vector<std::vector<double>> rob;               // per region per sample
  std::vector<int> verified;                          // 0/1 flags
  std::vector<RegionClass> cls;
  /// Failed region indices, sorted by decreasing sum of sampled robustness
  /// (ties broken by region id ascending).
  std::vector<int> failed_order;

  int count(RegionClass c) const;
};

/// Assigns the three-way classification from verification flags and sampled
/// robustness. Throws VerifierInconsistencyError if a verified region holds
/// a negative sample (the verifier would be unsound).
PartitionState classify(std::vector<Region> regions,
                        std::vector<std::vector<Eigen::VectorXd>> samples,
                        std::vector<int> verified_flags, std::vector<std::vector<double>> rob);

}  // namespace rwp
