#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tcfem/tensor.hpp"

namespace tcfem {

/// Contracts `u` with `m` along `axis`:
/// out[..., i, ...] = sum_k m(i, k) * u[..., k, ...].
/// Throws ContractViolation on a size mismatch and std::invalid_argument when
/// the axis is out of range.
TensorField contract_dir(const Matrix1D& m, const TensorField& u, int axis);

/// Sum over terms of the Kronecker product applied by successive directional
/// contractions (axis 0, 1, 2). The N^d x N^d matrix is never formed.
TensorField apply_separable(const SeparableOperator& op, const TensorField& u);

/// Gradient components at the tensor quadrature points:
/// (S⊗S⊗D)u, (S⊗D⊗S)u, (D⊗S⊗S)u for a 3D tensor u.
std::array<TensorField, 3> evaluate_gradient_at_quadrature(const Matrix1D& s, const Matrix1D& d, const TensorField& u);

/// Face-gradient components on the face normal to `face_axis`. The 1 x N
/// matrices `s_face` and `d_face` replace S and D along the normal axis in the
/// gradient block, so the output has extent 1 along `face_axis`. Component a is
/// the derivative along axis a.
std::array<TensorField, 3> evaluate_face_trace(const Matrix1D& s_face, const Matrix1D& d_face, const Matrix1D& s,
                                               const Matrix1D& d, const TensorField& u, int face_axis);

/// Test oracle: the explicit matrix sum_t ⊗_a factor_t[a] in row-major order,
/// indexed by the lexicographic tensor index. Refuses (std::length_error) when
/// the input or output size exceeds 10^4.
Matrix1D dense_kronecker_oracle(const SeparableOperator& op);

enum class FlopVariant { base, error_corrected };
enum class EvaluationKind { cell, patch };

/// Arithmetic cost of one sum-factorized application.
struct FlopReport {
  std::uint64_t total_flops = 0;
  std::uint64_t dofs = 0;
  double flops_per_dof = 0.0;
  struct Breakdown {
    std::uint64_t contractions = 0;     // 2*m*n*p per directional contraction (x3 with error correction)
    std::uint64_t ec_extra = 0;         // residual splitting of the input tensor plus the correction combine
    std::uint64_t scaling = 0;          // term accumulation
    std::uint64_t patch_multiplicity = 1;  // patch evaluations touching a DoF in one tiled operator application
  } breakdown;
};

/// Counts flops of apply_separable's schedule. For `patch` evaluation the DoF
/// count is the number of unique patch DoFs and `patch_multiplicity` records
/// how many patch passes the tiled operator makes over each DoF (1 + dim).
FlopReport count_flops(const SeparableOperator& op, FlopVariant variant, EvaluationKind evaluation);

}  // namespace tcfem
