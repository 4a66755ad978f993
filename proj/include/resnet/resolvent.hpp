#pragma once

// Green kernels of the walk killed on hitting a point or a set, computed from
// resistances, plus Monte Carlo estimators of the same quantities.

#include <cstdint>
#include <vector>

#include "resnet/network.hpp"

namespace resnet {

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::size_t aborted = 0;  // replicates dropped at the safety jump cap
};

// Plain sample mean and standard error (n-1 variance); SE is 0 for one sample.
// Throws DomainError on an empty sample.
MCEstimate summarize(const std::vector<double>& samples, std::size_t aborted = 0);

// Safety cap on jumps per killed-walk replicate.
inline constexpr std::uint64_t kDefaultMaxJumps = 1'000'000;

// g_x(y, z) = (R(x,y) + R(x,z) - R(y,z)) / 2.
double resolvent_kernel(const ResistanceMatrix& r, VertexId x, VertexId y, VertexId z);

// g_A(y, z) = (R(y,A) + R(z,A) - R_A(y,z)) / 2.
double shorted_kernel(const Network& net, const VertexSet& a, VertexId y, VertexId z);

// G_x f(y) = sum_z g_x(y, z) f(z) mu(z).
double resolvent_apply(const ResistanceMatrix& r, const VertexMeasure& mu, VertexId x, const PotentialFunction& f,
                       VertexId y);

// Estimates E_y int_0^{sigma_x} f(X_s) ds over n walks started at y.
MCEstimate mc_resolvent(const Network& net, const VertexMeasure& mu, VertexId x, const PotentialFunction& f,
                        VertexId y, std::size_t n, std::uint64_t seed, std::uint64_t max_jumps = kDefaultMaxJumps);

// Estimates E_y L_{sigma_A}(z) over n walks started at y.
MCEstimate mc_local_time(const Network& net, const VertexMeasure& mu, const VertexSet& a, VertexId y, VertexId z,
                         std::size_t n, std::uint64_t seed, std::uint64_t max_jumps = kDefaultMaxJumps);

}  // namespace resnet
