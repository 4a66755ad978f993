#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace resnet {

// Finite rooted metric measure space (F, R, mu, rho).
class FiniteMMSpace {
 public:
  // Checks a symmetric zero-diagonal metric with positive off-diagonal entries,
  // positive weights and a valid root. The triangle inequality is checked to a
  // relative 1e-9 of the diameter.
  FiniteMMSpace(std::vector<std::string> points, Eigen::MatrixXd metric, std::vector<double> measure,
                std::size_t root);

  std::size_t size() const { return points_.size(); }
  const std::vector<std::string>& points() const { return points_; }
  const Eigen::MatrixXd& metric() const { return metric_; }
  double distance(std::size_t a, std::size_t b) const { return metric_(a, b); }
  const std::vector<double>& measure() const { return measure_; }
  std::size_t root() const { return root_; }
  double diameter() const;
  double total_mass() const;

  // Sub-space on the given points (in the given order) with the restricted
  // measure. The root must be among them.
  FiniteMMSpace restrict_to(const std::vector<std::size_t>& subset) const;
  FiniteMMSpace with_measure(std::vector<double> measure) const;

 private:
  std::vector<std::string> points_;
  Eigen::MatrixXd metric_;
  std::vector<double> measure_;
  std::size_t root_;
};

}  // namespace resnet
