#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qww/types.hpp"

namespace qww {

enum class Boundary { periodic, windowed };

struct Axis {
  std::string name;
  std::size_t extent = 0;
  Boundary boundary = Boundary::periodic;
};

/// Extents of a stored walk: J time steps (windowed) by N periodic sites.
/// Requires N even and >= 4, J >= 3.
struct LatticeShape {
  std::size_t time_extent = 0;
  std::size_t space_extent = 0;

  void validate() const;
};

/// Complex values over one or more lattice axes, row-major in axis order.
///
/// Every entry carries a validity flag. Entries produced by a stencil that
/// would have reached past the end of a windowed axis are marked invalid
/// instead of being padded.
class LatticeField {
 public:
  LatticeField() = default;
  explicit LatticeField(std::vector<Axis> axes);
  LatticeField(std::vector<Axis> axes, std::vector<cplx> values);

  std::size_t rank() const { return axes_.size(); }
  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t axis_index(const std::string& name) const;
  std::size_t size() const { return values_.size(); }
  std::size_t stride(std::size_t axis) const { return strides_.at(axis); }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  std::span<const std::uint8_t> valid() const { return valid_; }
  bool is_valid(std::size_t flat) const { return valid_[flat] != 0; }
  void set_valid(std::size_t flat, bool v) { valid_[flat] = v ? 1 : 0; }

  cplx& operator[](std::size_t flat) { return values_[flat]; }
  const cplx& operator[](std::size_t flat) const { return values_[flat]; }

  std::size_t flat_index(std::span<const std::size_t> index) const;
  std::size_t coordinate(std::size_t flat, std::size_t axis) const {
    return (flat / strides_[axis]) % axes_[axis].extent;
  }

  bool same_shape(const LatticeField& other) const;

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::vector<cplx> values_;
  std::vector<std::uint8_t> valid_;
};

/// Central first difference (f[i+1] - f[i-1]) / 2 along `axis`.
LatticeField d1(const LatticeField& f, std::size_t axis);
LatticeField d1(const LatticeField& f, const std::string& axis);

/// Second difference (f[i+1] + f[i-1] - 2 f[i]) / 2 along `axis`.
/// Note the 1/2: d2 is not d1 composed with itself (that has stride 2).
LatticeField d2(const LatticeField& f, std::size_t axis);
LatticeField d2(const LatticeField& f, const std::string& axis);

/// result[i] = f[i + offset] along `axis`.
LatticeField shift(const LatticeField& f, std::size_t axis, long offset);
LatticeField shift(const LatticeField& f, const std::string& axis, long offset);

// Elementwise algebra; validity is the conjunction of the operands'.
LatticeField operator+(const LatticeField& a, const LatticeField& b);
LatticeField operator-(const LatticeField& a, const LatticeField& b);
LatticeField operator*(const LatticeField& a, const LatticeField& b);
LatticeField operator*(cplx s, const LatticeField& a);

/// Max |a - b| over entries valid in both.
double max_abs_diff(const LatticeField& a, const LatticeField& b);

namespace testing {
// Multiplies every d2 result; exists so sabotage tests can prove the
// identity suite detects a wrong second-difference normalisation.
void set_d2_scale(double scale);
double d2_scale();
}  // namespace testing

}  // namespace qww
