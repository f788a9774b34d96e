#pragma once

#include <Eigen/Dense>

namespace fasim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace fasim
