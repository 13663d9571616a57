#include <cstring>
#include <random>

#include "doctest.h"
#include "support/test_util.hpp"
#include "tcfem/quadrature.hpp"
#include "tcfem/simd/kernels.hpp"
#include "tcfem/tensor_kernel.hpp"

using namespace tcfem;
using tcfem::testing::random_matrix;
using tcfem::testing::random_tensor;
using tcfem::testing::random_vector;
using tcfem::testing::rel_diff;

namespace {

std::vector<double> oracle_apply(const SeparableOperator& op, const TensorField& u) {
  return tcfem::testing::matvec(dense_kronecker_oracle(op), u.values());
}

SeparableOperator single(int dim, std::vector<Matrix1D> factors) {
  return SeparableOperator(dim, {std::move(factors)});
}

}  // namespace

TEST_CASE("contract_dir with the identity leaves u unchanged") {
  std::mt19937_64 rng(1);
  const TensorField u = random_tensor(Extents(3, {3, 4, 2}), rng);
  for (int axis = 0; axis < 3; ++axis) {
    const TensorField v = contract_dir(Matrix1D::identity(u.extent(axis)), u, axis);
    CHECK(v.extents() == u.extents());
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(v[i] == u[i]);
  }
}

TEST_CASE("contract_dir along the slow axis of a 2D unit tensor picks the first column") {
  TensorField u(Extents(2, {2, 2, 1}));
  u.at(0, 0) = 1.0;
  const TensorField v = contract_dir(Matrix1D{{1, 2}, {3, 4}}, u, 1);
  CHECK(v.at(0, 0) == 1.0);
  CHECK(v.at(0, 1) == 3.0);
  CHECK(v.at(1, 0) == 0.0);
  CHECK(v.at(1, 1) == 0.0);
}

TEST_CASE("contract_dir matches the dense oracle on every axis") {
  std::mt19937_64 rng(2);
  const TensorField u = random_tensor(Extents::cube(3, 4), rng);
  for (int axis = 0; axis < 3; ++axis) {
    const Matrix1D m = random_matrix(4, 4, rng);
    std::vector<Matrix1D> f(3, Matrix1D::identity(4));
    f[static_cast<std::size_t>(axis)] = m;
    const TensorField v = contract_dir(m, u, axis);
    CHECK(rel_diff(v.values(), oracle_apply(single(3, f), u)) <= 1e-13);
  }
}

TEST_CASE("contract_dir changes the extent of the contracted axis only") {
  std::mt19937_64 rng(3);
  const TensorField u = random_tensor(Extents(3, {3, 4, 5}), rng);
  const TensorField v = contract_dir(random_matrix(2, 4, rng), u, 1);
  CHECK(v.extents() == Extents(3, {3, 2, 5}));
}

TEST_CASE("contract_dir rejects bad shapes and axes") {
  std::mt19937_64 rng(4);
  const TensorField u = random_tensor(Extents::cube(2, 3), rng);
  CHECK_THROWS_AS(contract_dir(Matrix1D::identity(4), u, 0), ContractViolation);
  CHECK_THROWS_AS(contract_dir(Matrix1D::identity(3), u, 2), std::invalid_argument);
  CHECK_THROWS_AS(contract_dir(Matrix1D::identity(3), u, -1), std::invalid_argument);
}

TEST_CASE("contracting along one axis keeps the other slices separate") {
  std::mt19937_64 rng(5);
  TensorField u = random_tensor(Extents::cube(3, 3), rng);
  // zero the slice j = 1 of axis 1; a contraction along axis 0 cannot refill it
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k) u.at(i, 1, k) = 0.0;
  const TensorField v = contract_dir(random_matrix(3, 3, rng), u, 0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k) CHECK(v.at(i, 1, k) == 0.0);
}

TEST_CASE("apply_separable: identity term and diagonal Kronecker sum") {
  std::mt19937_64 rng(6);
  const TensorField u = random_tensor(Extents::cube(3, 3), rng);
  const TensorField v = apply_separable(single(3, std::vector<Matrix1D>(3, Matrix1D::identity(3))), u);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(v[i] == u[i]);

  const std::vector<double> lambda{0.5, 2.0, 7.0, 11.0};
  std::vector<Matrix1D> mass(3, Matrix1D::identity(4)), stiff(3, Matrix1D::diagonal(lambda));
  const SeparableOperator op = kronecker_sum(mass, stiff);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 4; ++k) {
        TensorField e(Extents::cube(3, 4));
        e.at(i, j, k) = 1.0;
        const TensorField w = apply_separable(op, e);
        for (std::size_t p = 0; p < w.size(); ++p) {
          const double expect = p == i + 4 * (j + 4 * k) ? lambda[i] + lambda[j] + lambda[k] : 0.0;
          CHECK(w[p] == expect);
        }
      }
}

TEST_CASE("apply_separable matches the dense oracle on random operators") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim_d(2, 3), n_d(1, 5), t_d(1, 3);
  for (int trial = 0; trial < 120; ++trial) {
    const int dim = dim_d(rng);
    const int terms = t_d(rng);
    std::array<std::size_t, 3> in{1, 1, 1}, out{1, 1, 1};
    for (int a = 0; a < dim; ++a) {
      in[static_cast<std::size_t>(a)] = static_cast<std::size_t>(n_d(rng));
      out[static_cast<std::size_t>(a)] = static_cast<std::size_t>(n_d(rng));
    }
    std::vector<SeparableOperator::Term> t;
    for (int s = 0; s < terms; ++s) {
      SeparableOperator::Term f;
      for (int a = 0; a < dim; ++a) f.push_back(random_matrix(out[static_cast<std::size_t>(a)], in[static_cast<std::size_t>(a)], rng));
      t.push_back(std::move(f));
    }
    const SeparableOperator op(dim, std::move(t));
    const TensorField u = random_tensor(Extents(dim, in), rng);
    CHECK(rel_diff(apply_separable(op, u).values(), oracle_apply(op, u)) <= 1e-13);
  }
}

TEST_CASE("apply_separable is linear and its transpose matches the oracle transpose") {
  std::mt19937_64 rng(8);
  std::vector<Matrix1D> m, l;
  for (int a = 0; a < 3; ++a) {
    m.push_back(random_matrix(4, 3, rng));
    l.push_back(random_matrix(4, 3, rng));
  }
  const SeparableOperator op = kronecker_sum(m, l);
  const TensorField u = random_tensor(op.input_extents(), rng), w = random_tensor(op.input_extents(), rng);
  TensorField mix(op.input_extents());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.5 * u[i] - 0.75 * w[i];
  const TensorField au = apply_separable(op, u), aw = apply_separable(op, w), amix = apply_separable(op, mix);
  std::vector<double> expect(au.size());
  for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = 2.5 * au[i] - 0.75 * aw[i];
  CHECK(rel_diff(amix.values(), expect) <= 1e-14);

  const Matrix1D dense_t = dense_kronecker_oracle(op).transposed();
  const TensorField r = random_tensor(op.output_extents(), rng);
  CHECK(rel_diff(apply_separable(op.transposed(), r).values(), tcfem::testing::matvec(dense_t, r.values())) <= 1e-13);
}

TEST_CASE("apply_separable rejects a mismatched input") {
  std::mt19937_64 rng(9);
  const SeparableOperator op = single(2, {Matrix1D::identity(3), Matrix1D::identity(3)});
  CHECK_THROWS_AS(apply_separable(op, random_tensor(Extents::cube(2, 4), rng)), ContractViolation);
  CHECK_THROWS_AS(SeparableOperator(2, {{Matrix1D::identity(3), Matrix1D::identity(3)},
                                        {Matrix1D::identity(2), Matrix1D::identity(3)}}),
                  ContractViolation);
}

TEST_CASE("gradient at quadrature points") {
  const Basis1D b1(1, 2);
  SUBCASE("constants have zero gradient") {
    const Basis1D b(3, 5);
    TensorField one(Extents::cube(3, 4));
    for (std::size_t i = 0; i < one.size(); ++i) one[i] = 1.0;
    for (const auto& g : evaluate_gradient_at_quadrature(b.values, b.derivatives, one))
      for (double x : g.values()) CHECK(std::abs(x) <= 1e-13);
  }
  SUBCASE("u = x on the linear basis") {
    TensorField u(Extents::cube(3, 2));
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = static_cast<double>(i % 2);  // node x = 0 or 1
    const auto g = evaluate_gradient_at_quadrature(b1.values, b1.derivatives, u);
    for (double x : g[0].values()) CHECK(x == doctest::Approx(1.0).epsilon(1e-14));
    for (double x : g[1].values()) CHECK(std::abs(x) <= 1e-14);
    for (double x : g[2].values()) CHECK(std::abs(x) <= 1e-14);
  }
  SUBCASE("random u against the oracle") {
    std::mt19937_64 rng(10);
    const Matrix1D s = random_matrix(4, 3, rng), d = random_matrix(4, 3, rng);
    const TensorField u = random_tensor(Extents::cube(3, 3), rng);
    const auto g = evaluate_gradient_at_quadrature(s, d, u);
    CHECK(rel_diff(g[0].values(), oracle_apply(single(3, {d, s, s}), u)) <= 1e-13);
    CHECK(rel_diff(g[1].values(), oracle_apply(single(3, {s, d, s}), u)) <= 1e-13);
    CHECK(rel_diff(g[2].values(), oracle_apply(single(3, {s, s, d}), u)) <= 1e-13);
  }
  SUBCASE("shape mismatch") {
    std::mt19937_64 rng(11);
    CHECK_THROWS_AS(evaluate_gradient_at_quadrature(b1.values, b1.derivatives, random_tensor(Extents::cube(3, 3), rng)),
                    ContractViolation);
  }
}

TEST_CASE("face trace") {
  SUBCASE("constants: tangential derivatives vanish, the trace is one") {
    const Basis1D b(2, 4);
    TensorField one(Extents::cube(3, 3));
    for (std::size_t i = 0; i < one.size(); ++i) one[i] = 1.0;
    const Matrix1D sf = b.value_row(1.0), df = b.derivative_row(1.0);
    for (int face = 0; face < 3; ++face) {
      const auto g = evaluate_face_trace(sf, df, b.values, b.derivatives, one, face);
      CHECK(g[face].extent(face) == 1);
      for (int a = 0; a < 3; ++a)
        for (double x : g[a].values()) CHECK(std::abs(x) <= 1e-12);
      std::vector<Matrix1D> f(3, b.values);
      f[static_cast<std::size_t>(face)] = sf;
      const TensorField tr = apply_separable(single(3, f), one);
      for (double x : tr.values()) CHECK(x == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("u = x on the linear basis at the face x = 0") {
    const Basis1D b(1, 2);
    TensorField u(Extents::cube(3, 2));
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = static_cast<double>(i % 2);
    const auto g = evaluate_face_trace(b.value_row(0.0), b.derivative_row(0.0), b.values, b.derivatives, u, 0);
    for (double x : g[0].values()) CHECK(x == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<Matrix1D> f{b.value_row(0.0), b.values, b.values};
    const TensorField tr = apply_separable(single(3, f), u);
    for (double x : tr.values()) CHECK(std::abs(x) <= 1e-15);
  }
  SUBCASE("random u against the oracle of the row block") {
    std::mt19937_64 rng(12);
    const Matrix1D s = random_matrix(4, 3, rng), d = random_matrix(4, 3, rng);
    const Matrix1D sf = random_matrix(1, 3, rng), df = random_matrix(1, 3, rng);
    const TensorField u = random_tensor(Extents::cube(3, 3), rng);
    const auto g = evaluate_face_trace(sf, df, s, d, u, 1);
    CHECK(rel_diff(g[0].values(), oracle_apply(single(3, {d, sf, s}), u)) <= 1e-13);
    CHECK(rel_diff(g[1].values(), oracle_apply(single(3, {s, df, s}), u)) <= 1e-13);
    CHECK(rel_diff(g[2].values(), oracle_apply(single(3, {s, sf, d}), u)) <= 1e-13);
  }
}

TEST_CASE("dense Kronecker oracle") {
  CHECK(dense_kronecker_oracle(single(2, {Matrix1D::identity(2), Matrix1D::identity(3)})) == Matrix1D::identity(6));

  // axis 1 is the slow index: A (axis 1) ⊗ I (axis 0)
  const Matrix1D a{{1, 2}, {3, 4}};
  const Matrix1D k = dense_kronecker_oracle(single(2, {Matrix1D::identity(2), a}));
  for (std::size_t bi = 0; bi < 2; ++bi)
    for (std::size_t bj = 0; bj < 2; ++bj)
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(k(2 * bi + i, 2 * bj + j) == a(bi, bj) * (i == j ? 1.0 : 0.0));

  std::vector<Matrix1D> m(3, Matrix1D::identity(2)), l(3, Matrix1D{{1, -1}, {-1, 1}});
  const SeparableOperator op = kronecker_sum(m, l);
  const Matrix1D dense = dense_kronecker_oracle(op);
  for (std::size_t j = 0; j < 8; ++j) {
    TensorField e(Extents::cube(3, 2));
    e[j] = 1.0;
    const TensorField col = apply_separable(op, e);
    CHECK(dense(j, j) == 3.0);
    for (std::size_t i = 0; i < 8; ++i) CHECK(dense(i, j) == col[i]);
  }

  CHECK_THROWS_AS(dense_kronecker_oracle(single(3, std::vector<Matrix1D>(3, Matrix1D::identity(22)))),
                  std::length_error);
}

TEST_CASE("flop counts") {
  const FlopReport one = count_flops(single(1, {Matrix1D::identity(2)}), FlopVariant::base, EvaluationKind::cell);
  CHECK(one.total_flops == 8);

  std::vector<Matrix1D> m(3, Matrix1D::identity(16)), l(3, Matrix1D::identity(16));
  const SeparableOperator lap = kronecker_sum(m, l);
  const FlopReport base = count_flops(lap, FlopVariant::base, EvaluationKind::patch);
  const FlopReport ec = count_flops(lap, FlopVariant::error_corrected, EvaluationKind::patch);
  const double ratio = static_cast<double>(ec.total_flops) / static_cast<double>(base.total_flops);
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 3.3);
  CHECK(base.dofs == 4096);
  CHECK(base.breakdown.patch_multiplicity == 4);
  for (const FlopReport& f : {one, base, ec}) {
    CHECK(f.total_flops % f.dofs == 0);
    CHECK(static_cast<std::uint64_t>(f.flops_per_dof) * f.dofs == f.total_flops);
    CHECK(f.breakdown.contractions + f.breakdown.ec_extra + f.breakdown.scaling == f.total_flops);
  }
  MESSAGE("N=16 patch Laplacian flops/DoF: " << base.flops_per_dof << " (published CUDA-core fp64 figure 1738), EC "
                                              << ec.flops_per_dof << " (published 5361)");
}

TEST_CASE("vector kernels agree bit for bit with the scalar reference") {
  const simd::KernelTable* vec = simd::avx2_kernels();
  if (vec == nullptr) {
    MESSAGE("no AVX2 kernels on this machine; nothing to compare");
    return;
  }
  const simd::KernelTable& ref = simd::scalar_kernels();
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> sz(1, 19);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = sz(rng), cols = sz(rng), pre = sz(rng), post = sz(rng) % 5 + 1;
    const auto md = random_vector(rows * cols, rng), xd = random_vector(cols * pre * post, rng);
    std::vector<double> a(rows * pre * post), b(a.size());
    ref.contract_f64(md.data(), rows, cols, xd.data(), pre, post, a.data());
    vec->contract_f64(md.data(), rows, cols, xd.data(), pre, post, b.data());
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);

    std::vector<float> mf(md.begin(), md.end()), xf(xd.begin(), xd.end());
    std::vector<float> af(a.size()), bf(a.size());
    ref.contract_f32(mf.data(), rows, cols, xf.data(), pre, post, af.data());
    vec->contract_f32(mf.data(), rows, cols, xf.data(), pre, post, bf.data());
    CHECK(std::memcmp(af.data(), bf.data(), af.size() * sizeof(float)) == 0);
  }

  // every float bit pattern class through the half rounding kernel
  std::vector<float> in;
  std::uniform_int_distribution<std::uint32_t> bits;
  for (int i = 0; i < 200000; ++i) {
    const std::uint32_t u = bits(rng);
    float f;
    std::memcpy(&f, &u, 4);
    in.push_back(f);
  }
  for (float f : {0.0f, -0.0f, 65504.0f, 65520.0f, 65519.99f, 5.96e-8f, 2.98e-8f, 1.0f / 3.0f}) in.push_back(f);
  std::vector<float> ra(in.size()), rb(in.size());
  ref.round_to_half(in.data(), ra.data(), in.size());
  vec->round_to_half(in.data(), rb.data(), in.size());
  CHECK(std::memcmp(ra.data(), rb.data(), ra.size() * sizeof(float)) == 0);
}
