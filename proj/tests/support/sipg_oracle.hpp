#pragma once

#include <Eigen/Dense>

namespace tcfem::testing {

/// Dense SIPG matrix on [0,1]^dim with 2^level cells per axis and degree k <= 3,
/// assembled cell by cell and face by face. Shares no code with the library;
/// only the DoF numbering (cell-major, x fastest) is the same.
Eigen::MatrixXd assemble_sipg_dense(int dim, int level, int k);

}  // namespace tcfem::testing
