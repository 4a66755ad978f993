#pragma once

// Comparison of finite metric measure spaces and the exit-time estimate.
//
// Balls are open, B(x, d) = {y : R(x,y) < d}, both for min_ball_measure and
// for the covers counted by covering_number.

#include <cstdint>
#include <vector>

#include "resnet/mm_space.hpp"
#include "resnet/network.hpp"
#include "resnet/resolvent.hpp"

namespace resnet {

using PointSet = std::vector<std::size_t>;

double hausdorff_distance(const FiniteMMSpace& space, const PointSet& a, const PointSet& b);

inline constexpr std::size_t kMaxProhorovPoints = 20;

// Prohorov distance between two measures on the points of `space`:
// inf{eps : mu(A) <= nu(A^eps) + eps and nu(A) <= mu(A^eps) + eps for all A},
// by enumerating subsets. Throws CapacityError above kMaxProhorovPoints.
double prohorov_distance(const FiniteMMSpace& space, const std::vector<double>& mu, const std::vector<double>& nu);

// Rooted Gromov-Hausdorff-Prohorov distance, correspondence form:
//
//   min over correspondences C containing (root1, root2) of
//     max( dis(C) / 2 , max(|mu1|, |mu2|) - F(C) )
//
// where dis(C) = max |d1(x,x') - d2(y,y')| over pairs in C and F(C) is the
// largest mass that can be moved from mu1 to mu2 along pairs of C (a maximum
// flow). For probability measures the second term is the smallest mass a
// coupling puts off C. Exact; the search enumerates maximal correspondences
// at each candidate distortion, so the product of the sizes is capped.
inline constexpr std::size_t kMaxGhpPairs = 64;
double ghp_distance(const FiniteMMSpace& s1, const FiniteMMSpace& s2);

struct CoveringNumber {
  std::size_t count = 0;
  bool exact = false;  // false: greedy upper bound only
};

inline constexpr std::size_t kMaxExactCoverPoints = 20;

// Fewest open eps-balls centred at points of the space that cover it. Exact up
// to kMaxExactCoverPoints points, greedy above.
CoveringNumber covering_number(const FiniteMMSpace& space, double eps);

// inf_x mu(B(x, delta)).
double min_ball_measure(const FiniteMMSpace& space, double delta);

// (32 N(F, eps/4) / eps) * (delta + t / inf_x mu(B(x, delta))).
double exit_time_bound(const FiniteMMSpace& space, double eps, double delta, double t);

struct ExitBound {
  double bound = 0.0;
  double delta = 0.0;
};
// Smallest bound over the given deltas.
ExitBound best_exit_time_bound(const FiniteMMSpace& space, double eps, double t, const std::vector<double>& deltas);
// `count` log-spaced deltas from half the smallest positive distance to the
// diameter.
std::vector<double> delta_grid(const FiniteMMSpace& space, std::size_t count = 20);

struct ExitProbability {
  MCEstimate sup;  // the start with the largest estimate
  VertexId argmax = 0;
  std::vector<MCEstimate> per_start;
};

// Estimates P_x(sup_{s <= t} R(x, X_s) >= eps) for every start x with n walks
// each, and reports the maximum. Start x uses seeds derive_seed(seed', i) with
// seed' = derive_seed(seed, x).
ExitProbability mc_exit_prob(const Network& net, const VertexMeasure& mu, const ResistanceMatrix& r, double eps,
                             double t, std::size_t n, std::uint64_t seed);

}  // namespace resnet
