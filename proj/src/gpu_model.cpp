#include "tcfem/gpu_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tcfem::gpu {

namespace {

bool pow2(std::size_t x) { return x != 0 && std::has_single_bit(x); }

}  // namespace

LayoutFn::LayoutFn(std::size_t rows, std::size_t cols, std::size_t word_bytes, SwizzleParams swizzle)
    : rows_(rows), cols_(cols), word_bytes_(word_bytes), swizzle_(swizzle) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("LayoutFn: empty tile");
  if (word_bytes != 2 && word_bytes != 4 && word_bytes != 8) throw std::invalid_argument("LayoutFn: word size must be 2, 4 or 8");
  if (!pow2(swizzle.group) || !pow2(swizzle.period) || swizzle.chunk_words == 0)
    throw std::invalid_argument("LayoutFn: group and period must be powers of two");
  if (swizzle.group > 1) {
    if (cols % swizzle.chunk_words != 0) throw std::invalid_argument("LayoutFn: cols must be a multiple of the chunk");
    const std::size_t chunks = cols / swizzle.chunk_words;
    if (!pow2(chunks) || chunks % swizzle.group != 0)
      throw std::invalid_argument("LayoutFn: chunks per row must be a power of two divisible by the group");
  }
}

std::size_t LayoutFn::element_address(std::size_t row, std::size_t col) const {
  if (row >= rows_ || col >= cols_) throw std::out_of_range("LayoutFn: element outside the tile");
  if (swizzle_.group == 1) return row * cols_ + col;
  const std::size_t chunk = swizzle_.chunk_words;
  const std::size_t chunks = cols_ / chunk;
  const std::size_t base = ((row / swizzle_.period) % swizzle_.group) * (chunks / swizzle_.group);
  return row * cols_ + ((col / chunk) ^ base) * chunk + col % chunk;
}

std::string LayoutFn::describe() const {
  std::ostringstream os;
  os << rows_ << "x" << cols_ << " x " << word_bytes_ << "B";
  if (swizzle_.group == 1)
    os << " row-major";
  else
    os << " xor(G=" << swizzle_.group << ",P=" << swizzle_.period << ",chunk=" << swizzle_.chunk_words << ")";
  return os.str();
}

LayoutFn xor_swizzle_layout(std::size_t rows, std::size_t cols, std::size_t word_bytes, std::size_t group,
                            std::size_t period, std::size_t chunk_words) {
  return LayoutFn(rows, cols, word_bytes, SwizzleParams{group, period, chunk_words});
}

bool is_bijection(const LayoutFn& layout) {
  std::vector<bool> seen(layout.rows() * layout.cols(), false);
  for (std::size_t r = 0; r < layout.rows(); ++r)
    for (std::size_t c = 0; c < layout.cols(); ++c) {
      const std::size_t a = layout.element_address(r, c);
      if (a >= seen.size() || seen[a]) return false;
      seen[a] = true;
    }
  return true;
}

BankReport bank_trace(const AccessTrace& trace) {
  if (trace.request_bytes == 0 || kTransactionBytes % trace.request_bytes != 0 || trace.request_bytes > 16)
    throw std::invalid_argument("bank_trace: request size must be 1, 2, 4, 8 or 16 bytes");
  const std::size_t group_lanes = std::max<std::size_t>(1, kTransactionBytes / std::max(trace.request_bytes, kBankBytes));
  BankReport rep;
  for (const auto& phase : trace.phases) {
    if (phase.size() > 32) throw std::invalid_argument("bank_trace: a phase has more than 32 lanes");
    std::size_t worst = phase.empty() ? 0 : 1;
    for (std::size_t g = 0; g < phase.size(); g += group_lanes) {
      std::map<std::size_t, std::set<std::size_t>> words_per_bank;
      for (std::size_t l = g; l < std::min(phase.size(), g + group_lanes); ++l) {
        const std::size_t first = phase[l] / kBankBytes;
        const std::size_t last = (phase[l] + trace.request_bytes - 1) / kBankBytes;
        for (std::size_t w = first; w <= last; ++w) words_per_bank[w % kBanks].insert(w);
      }
      for (const auto& [bank, words] : words_per_bank) worst = std::max(worst, words.size());
    }
    rep.wavefronts.push_back(worst);
    rep.total += worst;
    rep.conflict = rep.conflict || worst > 1;
  }
  return rep;
}

BankReport bank_trace(const LayoutFn& layout, const AccessPattern& pattern) {
  if (layout.word_bytes() != pattern.element_bytes)
    throw std::invalid_argument("bank_trace: layout and pattern element sizes differ");
  AccessTrace trace;
  trace.request_bytes = pattern.request_bytes();
  for (const auto& phase : pattern.phases) {
    std::vector<std::size_t> addr;
    for (const auto& lane : phase.lanes) {
      if (lane.col + pattern.elements_per_request > layout.cols())
        throw std::out_of_range("bank_trace: request runs past the tile row");
      const std::size_t a = layout.byte_address(lane.row, lane.col);
      // A wide request must stay contiguous under the layout.
      if (layout.byte_address(lane.row, lane.col + pattern.elements_per_request - 1) !=
          a + (pattern.elements_per_request - 1) * pattern.element_bytes)
        throw std::invalid_argument("bank_trace: layout splits a wide request");
      addr.push_back(a);
    }
    trace.phases.push_back(std::move(addr));
  }
  return bank_trace(trace);
}

AccessPattern mma_fragment_pattern(MmaShape shape, MmaPrecision precision, MmaRole role) {
  AccessPattern p;
  const char* role_name = role == MmaRole::A ? "A" : role == MmaRole::B ? "B" : "C";
  if (precision == MmaPrecision::fp64 && shape.m == 8 && shape.n == 8 && shape.k == 4) {
    p.name = std::string("fp64 8x8x4 ") + role_name;
    p.rows = 8;
    p.cols = 8;
    p.element_bytes = 8;
    for (std::size_t ph = 0; ph < 2; ++ph) {
      AccessPhase phase;
      for (int l = 0; l < 32; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        switch (role) {
          case MmaRole::A: phase.lanes.push_back({l, ul / 4, ul % 4 + 4 * ph}); break;
          case MmaRole::B: phase.lanes.push_back({l, 4 * ph + ul % 4, ul / 4}); break;
          case MmaRole::C: phase.lanes.push_back({l, ul / 4, 2 * (ul % 4) + ph}); break;
        }
      }
      p.phases.push_back(std::move(phase));
    }
    return p;
  }
  if (precision == MmaPrecision::fp16 && shape.m == 16 && shape.n == 8 && shape.k == 16) {
    p.name = std::string("fp16 16x8x16 ") + role_name;
    if (role == MmaRole::C) {
      p.rows = 16;
      p.cols = 8;
      p.element_bytes = 4;
      p.elements_per_request = 2;
      for (std::size_t ph = 0; ph < 2; ++ph) {
        AccessPhase phase;
        for (int l = 0; l < 32; ++l) {
          const auto ul = static_cast<std::size_t>(l);
          phase.lanes.push_back({l, ul / 4 + 8 * ph, 2 * (ul % 4)});
        }
        p.phases.push_back(std::move(phase));
      }
      return p;
    }
    p.rows = 16;
    p.cols = 16;
    p.element_bytes = 2;
    p.elements_per_request = 8;
    // ldmatrix.x4: matrix q covers rows 8(q%2).. and columns 8(q/2)..; lanes
    // 8q..8q+7 supply its row addresses and the hardware serves it as one phase.
    for (std::size_t q = 0; q < 4; ++q) {
      AccessPhase phase;
      for (std::size_t r = 0; r < 8; ++r)
        phase.lanes.push_back({static_cast<int>(8 * q + r), 8 * (q % 2) + r, 8 * (q / 2)});
      p.phases.push_back(std::move(phase));
    }
    return p;
  }
  throw std::invalid_argument("mma_fragment_pattern: supported shapes are 8x8x4 fp64 and 16x8x16 fp16");
}

std::optional<SwizzleParams> search_conflict_free_swizzle(const AccessPattern& pattern, std::size_t rows,
                                                          std::size_t cols, std::size_t word_bytes) {
  const std::size_t chunk = pattern.elements_per_request;
  if (cols % chunk != 0) return std::nullopt;
  const std::size_t chunks = cols / chunk;
  const std::size_t phases = pattern.phases.size();
  {
    const LayoutFn identity(rows, cols, word_bytes);
    if (bank_trace(identity, pattern).total == phases) return SwizzleParams{1, 1, chunk};
  }
  if (!pow2(chunks)) return std::nullopt;
  for (std::size_t g = 2; g <= chunks; g *= 2)
    for (std::size_t period = 1; period <= rows; period *= 2) {
      const SwizzleParams s{g, period, chunk};
      const LayoutFn layout(rows, cols, word_bytes, s);
      if (!is_bijection(layout)) continue;
      if (bank_trace(layout, pattern).total == phases) return s;
    }
  return std::nullopt;
}

double shared_bandwidth(double sms, double banks, double word_bytes, double clock_ghz) {
  if (!(sms > 0 && banks > 0 && word_bytes > 0 && clock_ghz > 0))
    throw std::invalid_argument("shared_bandwidth: inputs must be positive");
  return sms * banks * word_bytes * clock_ghz * 1e9 / 1e12;
}

SharedBandwidthReport a100_shared_bandwidth() {
  SharedBandwidthReport r;
  r.tb_per_s = shared_bandwidth(108, 32, 4, 1.27);
  r.quoted_tb_per_s = 17.145;
  std::ostringstream os;
  os.precision(6);
  os << "108 x 32 x 4 B x 1.27 GHz = " << r.tb_per_s << " TB/s; the quoted " << r.quoted_tb_per_s
     << " TB/s for these inputs is not their product, the model uses the product";
  r.note = os.str();
  return r;
}

double roofline(double bandwidth, double flops, double bytes_read, double bytes_written) {
  const double traffic = bytes_read + bytes_written;
  if (!(traffic > 0.0)) throw std::domain_error("roofline: memory traffic must be positive");
  return bandwidth * flops / traffic;
}

double vram_roofline(double peak_flops, double bandwidth, double arithmetic_intensity) {
  return std::min(peak_flops, arithmetic_intensity * bandwidth);
}

PaddingCost padding_cost(std::size_t n, std::span<const std::size_t> supported, int dim) {
  if (supported.empty() || !std::is_sorted(supported.begin(), supported.end()))
    throw std::invalid_argument("padding_cost: supported sizes must be a non-empty ascending list");
  if (n == 0) throw std::invalid_argument("padding_cost: n must be positive");
  const auto it = std::lower_bound(supported.begin(), supported.end(), n);
  if (it == supported.end()) throw std::out_of_range("padding_cost: n exceeds the largest supported size");
  PaddingCost c;
  c.padded_n = *it;
  c.op_ratio = std::pow(static_cast<double>(c.padded_n) / static_cast<double>(n), dim + 1);
  return c;
}

}  // namespace tcfem::gpu
