#include "rwp/region.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace rwp {

std::vector<Region> partition(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                              const Eigen::VectorXd& steps) {
  const Eigen::Index d = lo.size();
  if (hi.size() != d || steps.size() != d) throw DimensionError("partition bounds/steps mismatch");
  if (d == 0) throw Error("empty box");
  std::vector<int> counts(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    if (steps[i] <= 0.0) throw Error("partition step must be positive");
    double extent = hi[i] - lo[i];
    if (extent <= 0.0) throw Error("empty box");
    // snap near-integer cell counts so 0.1-sized steps tile [12, 22] exactly
    double cells = extent / steps[i];
    counts[static_cast<std::size_t>(i)] =
        (std::abs(cells - std::round(cells)) < 1e-9) ? static_cast<int>(std::round(cells))
                                                     : static_cast<int>(std::ceil(cells));
  }

  std::vector<Region> out;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  int id = 0;
  for (;;) {
    Region r;
    r.id = id++;
    r.lower.resize(d);
    r.upper.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      int k = idx[static_cast<std::size_t>(i)];
      r.lower[i] = lo[i] + k * steps[i];
      // the last cell ends exactly at the box bound so the grid tiles it
      r.upper[i] = (k + 1 == counts[static_cast<std::size_t>(i)])
                       ? hi[i]
                       : std::min(lo[i] + (k + 1) * steps[i], hi[i]);
    }
    out.push_back(std::move(r));
    // lexicographic advance, last dimension fastest
    Eigen::Index i = d - 1;
    for (;;) {
      if (++idx[static_cast<std::size_t>(i)] < counts[static_cast<std::size_t>(i)]) break;
      idx[static_cast<std::size_t>(i)] = 0;
      if (i-- == 0) return out;
    }
  }
}

std::vector<Eigen::VectorXd> sample_region(const Region& r, int K, std::uint64_t seed) {
  if (K < 1) throw Error("sample count K must be >= 1");
  std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r.id)));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd p(r.lower.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      double u = unif(rng);
      while (u == 0.0) u = unif(rng);  // keep points strictly inside
      p[i] = r.lower[i] + u * (r.upper[i] - r.lower[i]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

const char* region_class_name(RegionClass c) {
  switch (c) {
    case RegionClass::Verified: return "verified";
    case RegionClass::Unknown: return "unknown";
    case RegionClass::Failed: return "failed";
  }
  return "?";
}

RegionClass region_class_from_name(const std::string& name) {
  if (name == "verified") return RegionClass::Verified;
  if (name == "unknown") return RegionClass::Unknown;
  if (name == "failed") return RegionClass::Failed;
  throw Error("unknown region class '" + name + "'");
}

int PartitionState::count(RegionClass c) const {
  int n = 0;
  for (RegionClass x : cls) n += (x == c) ? 1 : 0;
  return n;
}

PartitionState classify(std::vector<Region> regions,
                        std::vector<std::vector<Eigen::VectorXd>> samples,
                        std::vector<int> verified_flags, std::vector<std::vector<double>> rob) {
  const std::size_t m = regions.size();
  if (samples.size() != m || verified_flags.size() != m || rob.size() != m) {
    throw DimensionError("classification inputs incomplete");
  }
  PartitionState st;
  st.regions = std::move(regions);
  st.samples = std::move(samples);
  st.verified = std::move(verified_flags);
  st.rob = std::move(rob);
  st.cls.resize(m);

  for (std::size_t i = 0; i < m; ++i) {
    bool any_neg = std::any_of(st.rob[i].begin(), st.rob[i].end(), [](double r) { return r < 0.0; });
    if (st.verified[i] != 0 && any_neg) {
      throw VerifierInconsistencyError(
          "region " + std::to_string(st.regions[i].id) +
          " is verified but holds a failing sample; verifier unsound, aborting");
    }
    st.cls[i] = any_neg               ? RegionClass::Failed
                : st.verified[i] != 0 ? RegionClass::Verified
                                      : RegionClass::Unknown;
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (st.cls[i] == RegionClass::Failed) st.failed_order.push_back(static_cast<int>(i));
  }
  auto rob_sum = [&](int i) {
    return std::accumulate(st.rob[static_cast<std::size_t>(i)].begin(),
                           st.rob[static_cast<std::size_t>(i)].end(), 0.0);
  };
  std::stable_sort(st.failed_order.begin(), st.failed_order.end(), [&](int a, int b) {
    double sa = rob_sum(a), sb = rob_sum(b);
    if (sa != sb) return sa > sb;
    return st.regions[static_cast<std::size_t>(a)].id < st.regions[static_cast<std::size_t>(b)].id;
  });
  return st;
}

}  // namespace rwp
