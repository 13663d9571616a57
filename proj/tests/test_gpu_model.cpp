#include <array>
#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "tcfem/gpu_model.hpp"

using namespace tcfem::gpu;

namespace {

AccessTrace one_phase(std::size_t request_bytes, std::vector<std::size_t> addresses) {
  AccessTrace t;
  t.request_bytes = request_bytes;
  t.phases.push_back(std::move(addresses));
  return t;
}

std::size_t worst(const BankReport& r) {
  std::size_t w = 0;
  for (std::size_t x : r.wavefronts) w = std::max(w, x);
  return w;
}

}  // namespace

TEST_CASE("bank counting on raw traces") {
  std::vector<std::size_t> a(32);
  SUBCASE("consecutive words") {
    for (std::size_t l = 0; l < 32; ++l) a[l] = 4 * l;
    const BankReport r = bank_trace(one_phase(4, a));
    CHECK(r.wavefronts == std::vector<std::size_t>{1});
    CHECK_FALSE(r.conflict);
  }
  SUBCASE("broadcast") {
    for (std::size_t l = 0; l < 32; ++l) a[l] = 64;
    CHECK(bank_trace(one_phase(4, a)).wavefronts[0] == 1);
  }
  SUBCASE("stride of one row of banks") {
    for (std::size_t l = 0; l < 32; ++l) a[l] = 128 * l;
    const BankReport r = bank_trace(one_phase(4, a));
    CHECK(r.wavefronts[0] == 32);
    CHECK(r.conflict);
  }
  SUBCASE("two-way conflict") {
    for (std::size_t l = 0; l < 32; ++l) a[l] = 4 * (l % 16) + 128 * (l / 16);
    CHECK(bank_trace(one_phase(4, a)).wavefronts[0] == 2);
  }
  SUBCASE("8-byte requests split into half-warp groups") {
    for (std::size_t l = 0; l < 32; ++l) a[l] = 8 * l;
    CHECK(bank_trace(one_phase(8, a)).wavefronts[0] == 1);
    // both halves hit the same banks, but they are served separately
    for (std::size_t l = 0; l < 32; ++l) a[l] = 8 * (l % 16);
    CHECK(bank_trace(one_phase(8, a)).wavefronts[0] == 1);
    for (std::size_t l = 0; l < 32; ++l) a[l] = 16 * l;
    CHECK(bank_trace(one_phase(8, a)).wavefronts[0] == 2);
  }
  SUBCASE("16-byte requests") {
    for (std::size_t l = 0; l < 32; ++l) a[l] = 16 * l;
    CHECK(bank_trace(one_phase(16, a)).wavefronts[0] == 1);
    for (std::size_t l = 0; l < 32; ++l) a[l] = 256 * l;
    CHECK(bank_trace(one_phase(16, a)).wavefronts[0] == 8);
  }
  SUBCASE("totals add over phases") {
    AccessTrace t;
    t.request_bytes = 4;
    for (std::size_t l = 0; l < 32; ++l) a[l] = 4 * l;
    t.phases.push_back(a);
    for (std::size_t l = 0; l < 32; ++l) a[l] = 128 * (l % 4);
    t.phases.push_back(a);
    const BankReport r = bank_trace(t);
    CHECK(r.wavefronts == std::vector<std::size_t>{1, 4});
    CHECK(r.total == 5);
  }
}

TEST_CASE("layouts") {
  SUBCASE("group 1 is row-major") {
    const LayoutFn l(8, 8, 8);
    for (std::size_t r = 0; r < 8; ++r)
      for (std::size_t c = 0; c < 8; ++c) CHECK(l.element_address(r, c) == r * 8 + c);
    CHECK(l.byte_address(1, 1) == 72);
    CHECK_THROWS_AS(l.element_address(8, 0), std::out_of_range);
  }
  SUBCASE("xor formula") {
    const LayoutFn l = xor_swizzle_layout(8, 8, 8, 2);
    CHECK(l.element_address(0, 0) == 0);
    CHECK(l.element_address(1, 0) == 8 + 4);
    CHECK(l.element_address(1, 5) == 8 + 1);
    CHECK(l.element_address(2, 3) == 16 + 3);
    const LayoutFn p = xor_swizzle_layout(8, 8, 8, 2, 2);
    CHECK(p.element_address(1, 0) == 8);
    CHECK(p.element_address(2, 0) == 16 + 4);
  }
  SUBCASE("every admissible swizzle is a bijection") {
    int checked = 0;
    for (const std::array<int, 3> t : {std::array{8, 8, 8}, std::array{16, 16, 2}, std::array{16, 8, 4}})
      for (std::size_t chunk : {1, 2, 8})
        for (std::size_t g = 1; g <= 16; g *= 2)
          for (std::size_t p = 1; p <= 16; p *= 2) {
            const auto rows = t[0], cols = t[1], word = t[2];
            const auto cw = static_cast<std::size_t>(cols);
            if (g > 1 && (cw % chunk != 0 || (cw / chunk) % g != 0)) continue;
            const LayoutFn l(static_cast<std::size_t>(rows), cw, static_cast<std::size_t>(word), {g, p, chunk});
            CHECK(is_bijection(l));
            ++checked;
          }
    CHECK(checked > 50);
  }
  SUBCASE("rejected parameters") {
    CHECK_THROWS_AS(LayoutFn(0, 8, 8), std::invalid_argument);
    CHECK_THROWS_AS(LayoutFn(8, 8, 3), std::invalid_argument);
    CHECK_THROWS_AS(xor_swizzle_layout(8, 8, 8, 3), std::invalid_argument);
    CHECK_THROWS_AS(xor_swizzle_layout(8, 8, 8, 16), std::invalid_argument);
    CHECK_THROWS_AS(xor_swizzle_layout(8, 6, 8, 2), std::invalid_argument);
  }
}

TEST_CASE("fragment patterns") {
  SUBCASE("fp64 8x8x4") {
    for (MmaRole role : {MmaRole::A, MmaRole::B, MmaRole::C}) {
      const AccessPattern p = mma_fragment_pattern({8, 8, 4}, MmaPrecision::fp64, role);
      CHECK(p.rows == 8);
      CHECK(p.cols == 8);
      CHECK(p.element_bytes == 8);
      CHECK(p.phases.size() == 2);
      std::set<std::pair<std::size_t, std::size_t>> seen;
      for (const auto& ph : p.phases) {
        CHECK(ph.lanes.size() == 32);
        for (const auto& l : ph.lanes) seen.insert({l.row, l.col});
      }
      CHECK(seen.size() == 64);
    }
    const AccessPattern a = mma_fragment_pattern({8, 8, 4}, MmaPrecision::fp64, MmaRole::A);
    CHECK(a.phases[1].lanes[5].row == 1);
    CHECK(a.phases[1].lanes[5].col == 5);
  }
  SUBCASE("fp16 16x8x16") {
    const AccessPattern a = mma_fragment_pattern({16, 8, 16}, MmaPrecision::fp16, MmaRole::A);
    CHECK(a.element_bytes == 2);
    CHECK(a.elements_per_request == 8);
    CHECK(a.phases.size() == 4);
    std::size_t elements = 0;
    for (const auto& ph : a.phases) elements += ph.lanes.size() * a.elements_per_request;
    CHECK(elements == 256);
    const AccessPattern c = mma_fragment_pattern({16, 8, 16}, MmaPrecision::fp16, MmaRole::C);
    CHECK(c.phases.size() == 2);
    CHECK(c.request_bytes() == 8);
  }
  CHECK_THROWS_AS(mma_fragment_pattern({16, 16, 16}, MmaPrecision::fp64, MmaRole::A), std::invalid_argument);
}

TEST_CASE("naive and swizzled fragment loads") {
  SUBCASE("fp64 A conflicts two ways until swizzled") {
    const AccessPattern a = mma_fragment_pattern({8, 8, 4}, MmaPrecision::fp64, MmaRole::A);
    CHECK(worst(bank_trace(LayoutFn(8, 8, 8), a)) == 2);
    const auto s = search_conflict_free_swizzle(a, 8, 8, 8);
    REQUIRE(s);
    CHECK(s->group > 1);
    const LayoutFn l(8, 8, 8, *s);
    CHECK(is_bijection(l));
    CHECK(bank_trace(l, a).wavefronts == std::vector<std::size_t>{1, 1});
  }
  SUBCASE("fp16 ldmatrix rows") {
    const AccessPattern a = mma_fragment_pattern({16, 8, 16}, MmaPrecision::fp16, MmaRole::A);
    CHECK(worst(bank_trace(LayoutFn(16, 16, 2), a)) == 2);
    const auto s = search_conflict_free_swizzle(a, 16, 16, 2);
    REQUIRE(s);
    CHECK(s->chunk_words == 8);
    const BankReport r = bank_trace(LayoutFn(16, 16, 2, *s), a);
    CHECK(worst(r) == 1);
    CHECK(r.total == 4);
  }
  SUBCASE("a conflict-free pattern keeps the identity") {
    const AccessPattern c = mma_fragment_pattern({8, 8, 4}, MmaPrecision::fp64, MmaRole::C);
    if (worst(bank_trace(LayoutFn(8, 8, 8), c)) == 1) {
      const auto s = search_conflict_free_swizzle(c, 8, 8, 8);
      REQUIRE(s);
      CHECK(s->group == 1);
    }
  }
  SUBCASE("mismatched element size") {
    const AccessPattern a = mma_fragment_pattern({8, 8, 4}, MmaPrecision::fp64, MmaRole::A);
    CHECK_THROWS_AS(bank_trace(LayoutFn(8, 8, 4), a), std::invalid_argument);
    CHECK_THROWS_AS(bank_trace(LayoutFn(4, 8, 8), a), std::out_of_range);
  }
}

TEST_CASE("bandwidth and rooflines") {
  CHECK(shared_bandwidth(1, 1, 4, 1) == doctest::Approx(0.004).epsilon(1e-15));
  CHECK(shared_bandwidth(108, 32, 4, 1.27) == doctest::Approx(17.55648).epsilon(1e-14));
  CHECK(shared_bandwidth(216, 32, 4, 1.27) == doctest::Approx(2 * 17.55648).epsilon(1e-14));
  CHECK_THROWS(shared_bandwidth(0, 32, 4, 1.27));
  const SharedBandwidthReport a = a100_shared_bandwidth();
  CHECK(a.tb_per_s == doctest::Approx(17.55648));
  CHECK(a.quoted_tb_per_s == 17.145);
  CHECK_FALSE(a.note.empty());

  CHECK(roofline(10.0, 100.0, 30.0, 20.0) == doctest::Approx(20.0));
  CHECK(roofline(2.0, 50.0, 50.0, 0.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(roofline(1.0, 1.0, 0.0, 0.0), std::domain_error);
  CHECK(vram_roofline(19.5e12, 2e12, 100.0) == 19.5e12);
  CHECK(vram_roofline(19.5e12, 2e12, 1.0) == 2e12);
  CHECK(vram_roofline(19.5e12, 2e12, 9.75) == doctest::Approx(19.5e12));
}

TEST_CASE("padding") {
  const std::vector<std::size_t> sizes{8, 16};
  for (std::size_t n = 10; n <= 16; ++n) CHECK(padding_cost(n, sizes).padded_n == 16);
  CHECK(padding_cost(8, sizes).op_ratio == 1.0);
  CHECK(padding_cost(12, sizes).op_ratio == doctest::Approx(std::pow(16.0 / 12.0, 4)));
  CHECK(padding_cost(12, sizes, 2).op_ratio == doctest::Approx(std::pow(16.0 / 12.0, 3)));
  double prev = INFINITY;
  for (std::size_t n = 9; n <= 16; ++n) {
    const double r = padding_cost(n, sizes).op_ratio;
    CHECK(r < prev);
    prev = r;
  }
  CHECK_THROWS_AS(padding_cost(17, sizes), std::out_of_range);
  const std::vector<std::size_t> unsorted{16, 8};
  CHECK_THROWS_AS(padding_cost(4, unsorted), std::invalid_argument);
  CHECK_THROWS_AS(padding_cost(4, std::span<const std::size_t>{}), std::invalid_argument);
}
