#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tcfem::gpu {

inline constexpr std::size_t kBanks = 32;
inline constexpr std::size_t kBankBytes = 4;
/// Bytes one shared-memory transaction group serves: 32 lanes of 4 bytes,
/// 16 lanes of 8 bytes or 8 lanes of 16 bytes.
inline constexpr std::size_t kTransactionBytes = kBanks * kBankBytes;

/// XOR swizzle of chunk indices within a row:
/// chunk' = chunk XOR (((row / period) mod group) * (chunks_per_row / group)).
/// group = 1 is the identity.
struct SwizzleParams {
  std::size_t group = 1;
  std::size_t period = 1;
  std::size_t chunk_words = 1;  // elements moved together (one wide load)

  friend bool operator==(const SwizzleParams&, const SwizzleParams&) = default;
};

/// Row-major tile of `rows` x `cols` elements of `word_bytes` bytes each,
/// optionally permuted within rows by an XOR swizzle.
class LayoutFn {
 public:
  /// Throws std::invalid_argument for unsupported sizes or swizzle parameters.
  LayoutFn(std::size_t rows, std::size_t cols, std::size_t word_bytes, SwizzleParams swizzle = {});

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t word_bytes() const { return word_bytes_; }
  const SwizzleParams& swizzle() const { return swizzle_; }

  /// Element slot of (row, col). Throws std::out_of_range outside the tile.
  std::size_t element_address(std::size_t row, std::size_t col) const;
  std::size_t byte_address(std::size_t row, std::size_t col) const { return element_address(row, col) * word_bytes_; }
  std::string describe() const;

 private:
  std::size_t rows_, cols_, word_bytes_;
  SwizzleParams swizzle_;
};

/// xor_swizzle_layout(rows, cols, word_bytes, G) with optional period and chunk width.
LayoutFn xor_swizzle_layout(std::size_t rows, std::size_t cols, std::size_t word_bytes, std::size_t group,
                            std::size_t period = 1, std::size_t chunk_words = 1);

/// Exhaustive check that the layout maps the tile onto [0, rows*cols) one to one.
bool is_bijection(const LayoutFn& layout);

/// One lane's request, starting at (row, col); its width comes from the pattern.
struct LaneRequest {
  int lane = 0;
  std::size_t row = 0;
  std::size_t col = 0;
};

struct AccessPhase {
  std::vector<LaneRequest> lanes;  // at most 32 active lanes
};

struct AccessPattern {
  std::string name;
  std::size_t rows = 0, cols = 0;      // tile extents in elements
  std::size_t element_bytes = 0;
  std::size_t elements_per_request = 1;  // wide loads move several consecutive elements
  std::vector<AccessPhase> phases;

  std::size_t request_bytes() const { return element_bytes * elements_per_request; }
};

/// Raw byte addresses per phase; every lane reads request_bytes consecutive bytes.
struct AccessTrace {
  std::size_t request_bytes = 4;
  std::vector<std::vector<std::size_t>> phases;
};

struct BankReport {
  std::vector<std::size_t> wavefronts;  // per phase
  std::size_t total = 0;
  bool conflict = false;
};

/// Wavefront count per phase: lanes are split into transaction groups of
/// kTransactionBytes / request_bytes lanes; a group needs as many wavefronts
/// as the largest number of distinct 4-byte words any bank holds in it, and a
/// phase reports its worst group. Identical words broadcast.
BankReport bank_trace(const AccessTrace& trace);
/// Maps the pattern through the layout, then counts as above. Throws
/// std::out_of_range for requests outside the tile and std::invalid_argument
/// when element sizes disagree.
BankReport bank_trace(const LayoutFn& layout, const AccessPattern& pattern);

enum class MmaPrecision { fp64, fp16 };
enum class MmaRole { A, B, C };

struct MmaShape {
  std::size_t m = 0, n = 0, k = 0;
};

/// Warp access pattern of one fragment load or store.
///
/// fp64 8x8x4 (an 8x8 shared tile holding two k-steps): A lane l reads
/// (l/4, l%4 + 4p) in phase p; B reads (4p + l%4, l/4); C writes
/// (l/4, 2(l%4) + p). fp16 16x8x16: A and B are ldmatrix.x4 loads of a 16x16
/// half tile, four phases of eight 16-byte row segments; C stores a 16x8
/// float tile as float2 in two phases of rows (l/4 + 8p).
/// Throws std::invalid_argument for other shapes.
AccessPattern mma_fragment_pattern(MmaShape shape, MmaPrecision precision, MmaRole role);

/// First XOR swizzle (group outer, period inner, both ascending powers of two,
/// group = 1 first) under which every phase needs a single wavefront.
std::optional<SwizzleParams> search_conflict_free_swizzle(const AccessPattern& pattern, std::size_t rows,
                                                          std::size_t cols, std::size_t word_bytes);

/// sms * banks * word_bytes * clock, in TB/s.
double shared_bandwidth(double sms, double banks, double word_bytes, double clock_ghz);

struct SharedBandwidthReport {
  double tb_per_s = 0.0;
  double quoted_tb_per_s = 0.0;
  std::string note;
};

/// The A100 case (108 SMs, 32 banks, 4-byte words, 1.27 GHz) together with the
/// 17.145 TB/s figure usually quoted for it, which is not the product of these inputs.
SharedBandwidthReport a100_shared_bandwidth();

/// Shared-memory roofline B * F / (d_r + d_w). Throws std::domain_error for zero traffic.
double roofline(double bandwidth, double flops, double bytes_read, double bytes_written);
/// min(peak, arithmetic_intensity * bandwidth).
double vram_roofline(double peak_flops, double bandwidth, double arithmetic_intensity);

struct PaddingCost {
  std::size_t padded_n = 0;
  double op_ratio = 1.0;  // (padded_n / n)^(dim + 1)
};

/// Smallest supported size >= n. Throws std::invalid_argument for an empty or
/// unsorted list and std::out_of_range when n exceeds every supported size.
PaddingCost padding_cost(std::size_t n, std::span<const std::size_t> supported, int dim = 3);

}  // namespace tcfem::gpu
