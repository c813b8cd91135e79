#pragma once

#include <Eigen/Dense>

namespace tsmc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
/// Particle storage: one particle per row, contiguous.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace tsmc
