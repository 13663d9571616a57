#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcfem/binary16.hpp"
#include "tcfem/tensor.hpp"

namespace tcfem {

/// Arithmetic used by contractions. fp64 accumulates in binary64; every other
/// mode stores vectors in binary32 and accumulates in binary32. fp16 rounds
/// both contraction operands to binary16; fp16_ec additionally carries the
/// scaled binary16 residuals and adds the correction products.
enum class PrecisionMode { fp64, fp32, fp16, fp16_ec };

std::string_view to_string(PrecisionMode mode);
/// Accepts fp64, fp32, fp16, fp16_ec and fp16ec. Throws std::invalid_argument otherwise.
PrecisionMode parse_precision(std::string_view name);

constexpr bool uses_binary32_storage(PrecisionMode mode) { return mode != PrecisionMode::fp64; }

/// Index 0, 1, 2 of fp32, fp16, fp16_ec for per-mode tables of binary32
/// operators. Throws std::invalid_argument for fp64.
std::size_t binary32_slot(PrecisionMode mode);

/// A Matrix1D demoted once for a given precision mode.
class PreparedMatrix {
 public:
  PreparedMatrix() = default;
  PreparedMatrix(const Matrix1D& m, PrecisionMode mode, EcSides sides = EcSides::both);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  PrecisionMode mode() const { return mode_; }
  EcSides sides() const { return sides_; }

  const double* f64() const { return f64_.data(); }
  /// Binary32 entries (fp32) or the binary16 main part widened to binary32 (fp16 modes).
  const float* main() const { return main_.data(); }
  /// Scaled binary16 residual part, fp16_ec only.
  const float* residual() const { return residual_.data(); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  PrecisionMode mode_ = PrecisionMode::fp64;
  EcSides sides_ = EcSides::both;
  std::vector<double> f64_;
  std::vector<float> main_;
  std::vector<float> residual_;
};

/// Scratch buffers reused across contractions; one per thread.
template <class Real>
struct ContractionWorkspace {
  std::vector<Real> ping, pong, term;
  std::vector<float> half_in, residual_in, corr_a, corr_b;
};

/// out = m contracted with `in` along `axis`, in the arithmetic of m.mode().
/// Binary64 storage is only valid for fp64; binary32 storage for the rest.
void contract_prepared(const PreparedMatrix& m, std::span<const double> in, const Extents& extents, int axis,
                       std::span<double> out, ContractionWorkspace<double>& ws);
void contract_prepared(const PreparedMatrix& m, std::span<const float> in, const Extents& extents, int axis,
                       std::span<float> out, ContractionWorkspace<float>& ws);

/// Precision-aware separable operator with storage type Real.
template <class Real>
class PreparedSeparable {
 public:
  PreparedSeparable() = default;
  PreparedSeparable(const SeparableOperator& op, PrecisionMode mode, EcSides sides = EcSides::both);

  const Extents& input_extents() const { return in_; }
  const Extents& output_extents() const { return out_; }
  PrecisionMode mode() const { return mode_; }

  /// out = op * in. `out` must not alias `in`.
  void apply(std::span<const Real> in, std::span<Real> out, ContractionWorkspace<Real>& ws) const;

 private:
  int dim_ = 0;
  PrecisionMode mode_ = PrecisionMode::fp64;
  Extents in_, out_;
  std::vector<std::vector<PreparedMatrix>> terms_;
};

/// Directional contraction executed in `mode`. fp64 is bitwise identical to
/// contract_dir; other modes round the result to binary32.
TensorField contract_dir_prec(const Matrix1D& m, const TensorField& u, int axis, PrecisionMode mode,
                              EcSides sides = EcSides::both);

/// apply_separable executed in `mode`.
TensorField apply_separable_prec(const SeparableOperator& op, const TensorField& u, PrecisionMode mode,
                                 EcSides sides = EcSides::both);

/// ||v_low - v_ref||_2 / ||v_ref||_2. Throws std::domain_error for a zero
/// reference and ContractViolation for a length mismatch.
double relative_error(std::span<const double> v_low, std::span<const double> v_ref);

}  // namespace tcfem
