#pragma once

// Quad precision for the resistance <-> network correspondence.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include "resnet/network.hpp"

namespace resnet {

using Quad = boost::multiprecision::float128;
using QuadMatrix = Eigen::Matrix<Quad, Eigen::Dynamic, Eigen::Dynamic>;

struct ResistanceMatrix::Extended {
  QuadMatrix values;
};

}  // namespace resnet
