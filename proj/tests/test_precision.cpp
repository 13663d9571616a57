#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "support/test_util.hpp"
#include "tcfem/precision.hpp"
#include "tcfem/tensor_kernel.hpp"

using namespace tcfem;
using tcfem::testing::random_matrix;
using tcfem::testing::random_tensor;

namespace {

float f32(std::uint32_t bits) { return std::bit_cast<float>(bits); }

double frob_rel(const MatrixF32& c, const std::vector<double>& ref) {
  double d = 0, r = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    d += (c.values[i] - ref[i]) * (c.values[i] - ref[i]);
    r += ref[i] * ref[i];
  }
  return std::sqrt(d / r);
}

}  // namespace

TEST_CASE("binary16 conversion agrees with the reference file") {
  std::ifstream in(TCFEM_TEST_DATA_DIR "/binary16_reference.txt");
  REQUIRE(in.good());
  std::size_t cases = 0, mismatches = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::uint32_t src = 0, half = 0;
    ss >> std::hex >> src >> half;
    ++cases;
    if (to_half(f32(src)).bits != half) {
      if (++mismatches <= 10) MESSAGE("mismatch for " << std::hex << src << ": got " << to_half(f32(src)).bits);
    }
  }
  CHECK(cases >= 10000);
  CHECK(mismatches == 0);
}

TEST_CASE("binary16 examples") {
  CHECK(to_half(1.0f).bits == 0x3C00);
  CHECK(from_half(Binary16{0x3C00}) == 1.0f);
  CHECK(to_half(0.1f).bits == 0x2E66);
  CHECK(from_half(to_half(0.1f)) == 0.0999755859375f);
  CHECK(std::isinf(from_half(to_half(65520.0f))));
  CHECK(to_half(65520.0f).bits == 0x7C00);
  CHECK(to_half(65519.996f).bits == 0x7BFF);
  CHECK(to_half(std::nanf("")).bits == kHalfCanonicalNaN);
  CHECK(to_half(-std::nanf("7")).bits == kHalfCanonicalNaN);
  CHECK(to_half(-INFINITY).bits == 0xFC00);
  CHECK(to_half(std::ldexp(1.0f, -24)).bits == 0x0001);  // smallest subnormal
  CHECK(to_half(std::ldexp(1.0f, -25)).bits == 0x0000);  // tie to even: zero
}

TEST_CASE("binary16 properties") {
  for (int i = 0; i <= 2048; ++i) CHECK(from_half(to_half(static_cast<float>(i))) == static_cast<float>(i));
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<float> d(0.0f, 70000.0f);
  std::vector<float> xs(20000);
  for (float& x : xs) x = d(rng);
  std::sort(xs.begin(), xs.end());
  float prev = 0.0f;
  for (float x : xs) {
    const float once = from_half(to_half(x));
    CHECK(from_half(to_half(once)) == once);
    CHECK(once >= prev);
    prev = once;
  }
}

TEST_CASE("ec_split") {
  const EcPair one = ec_split(1.0f);
  CHECK(from_half(one.main) == 1.0f);
  CHECK(from_half(one.residual) == 0.0f);

  const float third = 1.0f / 3.0f;
  const EcPair t = ec_split(third);
  CHECK(from_half(t.main) == 0.333251953125f);
  // (x - main) * 2^11 is exactly 0.16668701171875 in binary32; it is a binary16
  // tie and rounds to even
  CHECK((third - from_half(t.main)) * 2048.0f == 0.16668701171875f);
  CHECK(t.residual.bits == 0x3156);
  CHECK(from_half(t.residual) == 0.166748046875f);

  CHECK_THROWS_AS(ec_split(70000.0f), std::range_error);
  CHECK_THROWS_AS(ec_split(std::nanf("")), std::range_error);
}

TEST_CASE("EC reconstruction bound on random normal-range values") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<float> e(-14.0f, 15.99f), m(1.0f, 2.0f);
  std::bernoulli_distribution sign;
  int bad = 0;
  for (int i = 0; i < 100000; ++i) {
    float x = std::min(std::exp2(std::floor(e(rng))) * m(rng), kHalfMax);
    if (sign(rng)) x = -x;
    const float r = ec_split(x).reconstruct();
    if (std::abs(static_cast<double>(r) - x) > std::ldexp(std::abs(static_cast<double>(x)), -20)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("ec_matmul") {
  std::mt19937_64 rng(23);
  SUBCASE("half-exact inputs: the correction vanishes") {
    std::vector<float> a(16), b(16);
    for (auto& x : a) x = from_half(to_half(std::uniform_real_distribution<float>(-1, 1)(rng)));
    for (auto& x : b) x = from_half(to_half(std::uniform_real_distribution<float>(-1, 1)(rng)));
    const MatrixF32 c = ec_matmul(EcMatrix::split(4, 4, a), EcMatrix::split(4, 4, b));
    const MatrixF32 p = matmul_f32({4, 4, a}, {4, 4, b});
    CHECK(c.values == p.values);
  }
  SUBCASE("a single half product is exact in binary32") {
    const float a = from_half(to_half(0.7071f)), b = from_half(to_half(-3.14159f));
    const MatrixF32 c = ec_matmul(EcMatrix::split(1, 1, std::vector<float>{a}), EcMatrix::split(1, 1, std::vector<float>{b}));
    CHECK(static_cast<double>(c.values[0]) == static_cast<double>(a) * static_cast<double>(b));
  }
  SUBCASE("error ordering against the binary64 product") {
    const std::size_t n = 8;
    std::vector<float> a(n * n), b(n * n);
    std::uniform_real_distribution<float> d(-1, 1);
    for (auto& x : a) x = d(rng);
    for (auto& x : b) x = d(rng);
    std::vector<double> ref(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) ref[i * n + j] += static_cast<double>(a[i * n + k]) * b[k * n + j];
    const EcMatrix ea = EcMatrix::split(n, n, a), eb = EcMatrix::split(n, n, b);
    const double e32 = frob_rel(matmul_f32({n, n, a}, {n, n, b}), ref);
    const double eec = frob_rel(ec_matmul(ea, eb), ref);
    const double e16 = frob_rel(matmul_f32(ea.main_part(), eb.main_part()), ref);
    CHECK(eec <= 4.0 * e32);
    CHECK(e16 >= 10.0 * e32);
  }
  SUBCASE("identity times B") {
    std::vector<float> id(16, 0.0f), b(16);
    for (int i = 0; i < 4; ++i) id[static_cast<std::size_t>(5 * i)] = 1.0f;
    for (auto& x : b) x = std::uniform_real_distribution<float>(-1, 1)(rng);
    const MatrixF32 c = ec_matmul(EcMatrix::split(4, 4, id), EcMatrix::split(4, 4, b));
    for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(c.values[i] - b[i]) <= std::ldexp(std::abs(b[i]), -20));
  }
  CHECK_THROWS_AS(ec_matmul(EcMatrix::split(2, 3, std::vector<float>(6)), EcMatrix::split(2, 2, std::vector<float>(4))),
                  ContractViolation);
}

TEST_CASE("precision-aware contraction") {
  std::mt19937_64 rng(24);
  const TensorField u = random_tensor(Extents::cube(3, 16), rng);
  const Matrix1D m = random_matrix(16, 16, rng);
  for (int axis = 0; axis < 3; ++axis) {
    const TensorField a = contract_dir(m, u, axis), b = contract_dir_prec(m, u, axis, PrecisionMode::fp64);
    CHECK(std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0);
  }

  const TensorField r = contract_dir_prec(Matrix1D::identity(16), u, 0, PrecisionMode::fp16);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(r[i] == static_cast<double>(from_half(to_half(static_cast<float>(u[i])))));

  const TensorField ref = contract_dir(m, u, 1);
  const auto err = [&](PrecisionMode mode) { return relative_error(contract_dir_prec(m, u, 1, mode).values(), ref.values()); };
  const double e32 = err(PrecisionMode::fp32), e16 = err(PrecisionMode::fp16), eec = err(PrecisionMode::fp16_ec);
  CHECK(e16 > 10.0 * e32);
  CHECK(eec <= 4.0 * e32);
}

TEST_CASE("relative_error") {
  const std::vector<double> v{1.0, -2.0, 3.0};
  CHECK(relative_error(v, v) == 0.0);
  const std::vector<double> w{1.01, -2.02, 3.03};
  CHECK(relative_error(w, v) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK_THROWS_AS(relative_error(v, std::vector<double>(3, 0.0)), std::domain_error);
  CHECK_THROWS_AS(relative_error(v, std::vector<double>(2, 1.0)), ContractViolation);
}

TEST_CASE("precision names") {
  CHECK(parse_precision("fp16ec") == PrecisionMode::fp16_ec);
  CHECK(to_string(PrecisionMode::fp16_ec) == "fp16_ec");
  CHECK_THROWS_AS(parse_precision("bf16"), std::invalid_argument);
}
