#include "tcfem/tensor_kernel.hpp"

#include <stdexcept>
#include <string>

#include "tcfem/simd/kernels.hpp"

namespace tcfem {

namespace {

void check_axis(int axis, int dim) {
  if (axis < 0 || axis >= dim)
    throw std::invalid_argument("axis " + std::to_string(axis) + " out of range for a " + std::to_string(dim) +
                                "-dimensional tensor");
}

}  // namespace

TensorField contract_dir(const Matrix1D& m, const TensorField& u, int axis) {
  check_axis(axis, u.dim());
  if (m.cols() != u.extent(axis))
    throw ContractViolation("contract_dir: matrix has " + std::to_string(m.cols()) + " columns but axis " +
                            std::to_string(axis) + " has extent " + std::to_string(u.extent(axis)));
  const Extents in = u.extents();
  TensorField out(in.with(axis, m.rows()));
  simd::active_kernels().contract_f64(m.entries().data(), m.rows(), m.cols(), u.values().data(), in.pre(axis),
                                      in.post(axis), out.values().data());
  return out;
}

TensorField apply_separable(const SeparableOperator& op, const TensorField& u) {
  if (op.dim() != u.dim() || op.input_extents() != u.extents())
    throw ContractViolation("apply_separable: operator input extents " + to_string(op.input_extents()) +
                            " do not match tensor extents " + to_string(u.extents()));
  TensorField result;
  bool first = true;
  for (const auto& term : op.terms()) {
    TensorField t = contract_dir(term[0], u, 0);
    for (int a = 1; a < op.dim(); ++a) t = contract_dir(term[static_cast<std::size_t>(a)], t, a);
    if (first) {
      result = std::move(t);
      first = false;
    } else {
      auto r = result.values();
      auto v = t.values();
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += v[i];
    }
  }
  return result;
}

std::array<TensorField, 3> evaluate_gradient_at_quadrature(const Matrix1D& s, const Matrix1D& d, const TensorField& u) {
  if (u.dim() != 3) throw ContractViolation("evaluate_gradient_at_quadrature: expects a 3D tensor");
  if (s.rows() != d.rows() || s.cols() != d.cols())
    throw ContractViolation("evaluate_gradient_at_quadrature: S and D must have the same shape");
  std::array<TensorField, 3> grad;
  for (int c = 0; c < 3; ++c) {
    std::vector<Matrix1D> factors;
    for (int a = 0; a < 3; ++a) factors.push_back(a == c ? d : s);
    grad[static_cast<std::size_t>(c)] = apply_separable(SeparableOperator(3, {factors}), u);
  }
  return grad;
}

std::array<TensorField, 3> evaluate_face_trace(const Matrix1D& s_face, const Matrix1D& d_face, const Matrix1D& s,
                                               const Matrix1D& d, const TensorField& u, int face_axis) {
  if (u.dim() != 3) throw ContractViolation("evaluate_face_trace: expects a 3D tensor");
  check_axis(face_axis, 3);
  if (s_face.rows() != 1 || d_face.rows() != 1 || s_face.cols() != d_face.cols())
    throw ContractViolation("evaluate_face_trace: face matrices must be 1 x N");
  std::array<TensorField, 3> grad;
  for (int c = 0; c < 3; ++c) {
    std::vector<Matrix1D> factors;
    for (int a = 0; a < 3; ++a) {
      if (a == face_axis)
        factors.push_back(a == c ? d_face : s_face);
      else
        factors.push_back(a == c ? d : s);
    }
    grad[static_cast<std::size_t>(c)] = apply_separable(SeparableOperator(3, {factors}), u);
  }
  return grad;
}

Matrix1D dense_kronecker_oracle(const SeparableOperator& op) {
  constexpr std::size_t kMaxSize = 10000;
  const Extents in = op.input_extents();
  const Extents out = op.output_extents();
  if (in.size() > kMaxSize || out.size() > kMaxSize)
    throw std::length_error("dense_kronecker_oracle: operator of size " + std::to_string(out.size()) + " x " +
                            std::to_string(in.size()) + " exceeds the 10^4 guard");
  const int dim = op.dim();
  Matrix1D dense(out.size(), in.size());
  for (const auto& term : op.terms()) {
    for (std::size_t row = 0; row < out.size(); ++row) {
      std::array<std::size_t, 3> ri{0, 0, 0};
      std::size_t rem = row;
      for (int a = 0; a < dim; ++a) {
        ri[static_cast<std::size_t>(a)] = rem % out[a];
        rem /= out[a];
      }
      for (std::size_t col = 0; col < in.size(); ++col) {
        std::size_t crem = col;
        double v = 1.0;
        for (int a = 0; a < dim; ++a) {
          const std::size_t ci = crem % in[a];
          crem /= in[a];
          v *= term[static_cast<std::size_t>(a)](ri[static_cast<std::size_t>(a)], ci);
        }
        dense(row, col) += v;
      }
    }
  }
  return dense;
}

FlopReport count_flops(const SeparableOperator& op, FlopVariant variant, EvaluationKind evaluation) {
  FlopReport r;
  const int dim = op.dim();
  const bool ec = variant == FlopVariant::error_corrected;
  for (const auto& term : op.terms()) {
    Extents cur = op.input_extents();
    for (int a = 0; a < dim; ++a) {
      const Matrix1D& f = term[static_cast<std::size_t>(a)];
      const std::uint64_t other = cur.size() / cur[a];
      const std::uint64_t mm = 2ull * f.rows() * f.cols() * other;
      const std::uint64_t in_size = cur.size();
      cur = cur.with(a, f.rows());
      if (ec) {
        r.breakdown.contractions += 3 * mm;
        // Split of the input tensor (subtract, scale) and combine of the
        // correction (add the two correction products, scale, add to main).
        r.breakdown.ec_extra += 2 * in_size + 3 * cur.size();
      } else {
        r.breakdown.contractions += mm;
      }
    }
  }
  r.breakdown.scaling = (op.terms().size() - 1) * op.output_extents().size();
  r.breakdown.patch_multiplicity = evaluation == EvaluationKind::patch ? static_cast<std::uint64_t>(1 + dim) : 1;
  r.total_flops = r.breakdown.contractions + r.breakdown.ec_extra + r.breakdown.scaling;
  r.dofs = op.input_extents().size();
  r.flops_per_dof = static_cast<double>(r.total_flops) / static_cast<double>(r.dofs);
  return r;
}

}  // namespace tcfem
