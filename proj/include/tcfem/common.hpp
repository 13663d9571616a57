#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace tcfem {

/// Raised when operand shapes do not satisfy an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised by direct solvers when a factorization hits a zero pivot.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-axis sizes of a tensor with 1 to 3 axes. Axis 0 has stride 1.
struct Extents {
  int dim = 0;
  std::array<std::size_t, 3> n{1, 1, 1};

  Extents() = default;
  Extents(int d, std::array<std::size_t, 3> sizes);

  static Extents cube(int d, std::size_t size);

  std::size_t operator[](int axis) const { return n[static_cast<std::size_t>(axis)]; }
  std::size_t size() const { return n[0] * n[1] * n[2]; }
  std::size_t stride(int axis) const;
  /// Product of the extents below `axis`.
  std::size_t pre(int axis) const { return stride(axis); }
  /// Product of the extents above `axis`.
  std::size_t post(int axis) const;
  Extents with(int axis, std::size_t size) const;

  friend bool operator==(const Extents&, const Extents&) = default;
};

std::string to_string(const Extents& e);

}  // namespace tcfem
