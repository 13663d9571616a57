#include "tcfem/precision.hpp"

#include <cmath>
#include <stdexcept>

#include "tcfem/simd/kernels.hpp"

namespace tcfem {

std::string_view to_string(PrecisionMode mode) {
  switch (mode) {
    case PrecisionMode::fp64: return "fp64";
    case PrecisionMode::fp32: return "fp32";
    case PrecisionMode::fp16: return "fp16";
    case PrecisionMode::fp16_ec: return "fp16_ec";
  }
  return "unknown";
}

PrecisionMode parse_precision(std::string_view name) {
  if (name == "fp64") return PrecisionMode::fp64;
  if (name == "fp32") return PrecisionMode::fp32;
  if (name == "fp16") return PrecisionMode::fp16;
  if (name == "fp16_ec" || name == "fp16ec") return PrecisionMode::fp16_ec;
  throw std::invalid_argument("unknown precision mode '" + std::string(name) + "'");
}

std::size_t binary32_slot(PrecisionMode mode) {
  switch (mode) {
    case PrecisionMode::fp32: return 0;
    case PrecisionMode::fp16: return 1;
    case PrecisionMode::fp16_ec: return 2;
    case PrecisionMode::fp64: break;
  }
  throw std::invalid_argument("binary32 storage does not support fp64 mode");
}

PreparedMatrix::PreparedMatrix(const Matrix1D& m, PrecisionMode mode, EcSides sides)
    : rows_(m.rows()), cols_(m.cols()), mode_(mode), sides_(sides) {
  const auto e = m.entries();
  switch (mode) {
    case PrecisionMode::fp64: f64_.assign(e.begin(), e.end()); break;
    case PrecisionMode::fp32:
      main_.resize(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) main_[i] = static_cast<float>(e[i]);
      break;
    case PrecisionMode::fp16:
      main_.resize(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) main_[i] = from_half(to_half(static_cast<float>(e[i])));
      break;
    case PrecisionMode::fp16_ec:
      main_.resize(e.size());
      residual_.resize(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) {
        const EcPair p = ec_split(static_cast<float>(e[i]));
        main_[i] = from_half(p.main);
        residual_[i] = from_half(p.residual);
      }
      break;
  }
}

namespace {

void check_contraction(const PreparedMatrix& m, std::size_t in_size, const Extents& extents, int axis,
                       std::size_t out_size) {
  if (axis < 0 || axis >= extents.dim) throw std::invalid_argument("contraction axis out of range");
  if (m.cols() != extents[axis]) throw ContractViolation("contraction: matrix columns do not match the axis extent");
  if (in_size != extents.size()) throw ContractViolation("contraction: input size does not match extents");
  if (out_size != extents.with(axis, m.rows()).size())
    throw ContractViolation("contraction: output size does not match the contracted extents");
}

}  // namespace

void contract_prepared(const PreparedMatrix& m, std::span<const double> in, const Extents& extents, int axis,
                       std::span<double> out, ContractionWorkspace<double>&) {
  check_contraction(m, in.size(), extents, axis, out.size());
  if (m.mode() != PrecisionMode::fp64) throw std::invalid_argument("binary64 storage requires fp64 mode");
  simd::active_kernels().contract_f64(m.f64(), m.rows(), m.cols(), in.data(), extents.pre(axis), extents.post(axis),
                                      out.data());
}

void contract_prepared(const PreparedMatrix& m, std::span<const float> in, const Extents& extents, int axis,
                       std::span<float> out, ContractionWorkspace<float>& ws) {
  check_contraction(m, in.size(), extents, axis, out.size());
  const auto& k = simd::active_kernels();
  const std::size_t pre = extents.pre(axis), post = extents.post(axis);
  switch (m.mode()) {
    case PrecisionMode::fp64: throw std::invalid_argument("fp64 mode requires binary64 storage");
    case PrecisionMode::fp32: k.contract_f32(m.main(), m.rows(), m.cols(), in.data(), pre, post, out.data()); return;
    case PrecisionMode::fp16:
      ws.half_in.resize(in.size());
      k.round_to_half(in.data(), ws.half_in.data(), in.size());
      k.contract_f32(m.main(), m.rows(), m.cols(), ws.half_in.data(), pre, post, out.data());
      return;
    case PrecisionMode::fp16_ec: {
      ws.half_in.resize(in.size());
      ws.residual_in.resize(in.size());
      k.round_to_half(in.data(), ws.half_in.data(), in.size());
      for (std::size_t i = 0; i < in.size(); ++i) ws.residual_in[i] = (in[i] - ws.half_in[i]) * EcPair::scale;
      k.round_to_half(ws.residual_in.data(), ws.residual_in.data(), in.size());

      ws.corr_a.resize(out.size());
      k.contract_f32(m.main(), m.rows(), m.cols(), ws.half_in.data(), pre, post, out.data());
      k.contract_f32(m.residual(), m.rows(), m.cols(), ws.half_in.data(), pre, post, ws.corr_a.data());
      if (m.sides() == EcSides::both) {
        ws.corr_b.resize(out.size());
        k.contract_f32(m.main(), m.rows(), m.cols(), ws.residual_in.data(), pre, post, ws.corr_b.data());
        for (std::size_t i = 0; i < out.size(); ++i) ws.corr_a[i] += ws.corr_b[i];
      }
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += ws.corr_a[i] / EcPair::scale;
      return;
    }
  }
}

template <class Real>
PreparedSeparable<Real>::PreparedSeparable(const SeparableOperator& op, PrecisionMode mode, EcSides sides)
    : dim_(op.dim()), mode_(mode), in_(op.input_extents()), out_(op.output_extents()) {
  if (uses_binary32_storage(mode) != (sizeof(Real) == 4))
    throw std::invalid_argument("PreparedSeparable: storage type does not match precision mode");
  for (const auto& term : op.terms()) {
    std::vector<PreparedMatrix> t;
    for (const auto& f : term) t.emplace_back(f, mode, sides);
    terms_.push_back(std::move(t));
  }
}

template <class Real>
void PreparedSeparable<Real>::apply(std::span<const Real> in, std::span<Real> out, ContractionWorkspace<Real>& ws) const {
  if (in.size() != in_.size() || out.size() != out_.size())
    throw ContractViolation("PreparedSeparable::apply: vector sizes do not match the operator");
  bool first = true;
  for (const auto& term : terms_) {
    Extents cur = in_;
    std::span<const Real> src = in;
    for (int a = 0; a < dim_; ++a) {
      const PreparedMatrix& f = term[static_cast<std::size_t>(a)];
      const Extents next = cur.with(a, f.rows());
      const bool last = a + 1 == dim_;
      std::vector<Real>& buf = last ? ws.term : (a % 2 == 0 ? ws.ping : ws.pong);
      buf.resize(next.size());
      contract_prepared(f, src, cur, a, std::span<Real>(buf), ws);
      src = buf;
      cur = next;
    }
    if (first) {
      std::copy(ws.term.begin(), ws.term.end(), out.begin());
      first = false;
    } else {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += ws.term[i];
    }
  }
}

template class PreparedSeparable<double>;
template class PreparedSeparable<float>;

TensorField contract_dir_prec(const Matrix1D& m, const TensorField& u, int axis, PrecisionMode mode, EcSides sides) {
  if (axis < 0 || axis >= u.dim()) throw std::invalid_argument("contract_dir_prec: axis out of range");
  if (m.cols() != u.extent(axis)) throw ContractViolation("contract_dir_prec: matrix columns do not match the axis extent");
  const PreparedMatrix pm(m, mode, sides);
  const Extents out_ext = u.extents().with(axis, m.rows());
  TensorField out(out_ext);
  if (mode == PrecisionMode::fp64) {
    ContractionWorkspace<double> ws;
    contract_prepared(pm, u.values(), u.extents(), axis, out.values(), ws);
    return out;
  }
  ContractionWorkspace<float> ws;
  std::vector<float> in(u.size()), res(out_ext.size());
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = static_cast<float>(u[i]);
  contract_prepared(pm, in, u.extents(), axis, res, ws);
  for (std::size_t i = 0; i < res.size(); ++i) out[i] = res[i];
  return out;
}

TensorField apply_separable_prec(const SeparableOperator& op, const TensorField& u, PrecisionMode mode, EcSides sides) {
  if (op.input_extents() != u.extents()) throw ContractViolation("apply_separable_prec: extents mismatch");
  TensorField out(op.output_extents());
  if (mode == PrecisionMode::fp64) {
    ContractionWorkspace<double> ws;
    PreparedSeparable<double>(op, mode, sides).apply(u.values(), out.values(), ws);
    return out;
  }
  ContractionWorkspace<float> ws;
  std::vector<float> in(u.size()), res(out.size());
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = static_cast<float>(u[i]);
  PreparedSeparable<float>(op, mode, sides).apply(in, res, ws);
  for (std::size_t i = 0; i < res.size(); ++i) out[i] = res[i];
  return out;
}

double relative_error(std::span<const double> v_low, std::span<const double> v_ref) {
  if (v_low.size() != v_ref.size()) throw ContractViolation("relative_error: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v_ref.size(); ++i) {
    const double d = v_low[i] - v_ref[i];
    num += d * d;
    den += v_ref[i] * v_ref[i];
  }
  if (den == 0.0) throw std::domain_error("relative_error: reference vector has zero norm");
  return std::sqrt(num) / std::sqrt(den);
}

}  // namespace tcfem
