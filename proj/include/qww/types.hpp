#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace qww {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr cplx I{0.0, 1.0};

/// Raised when an input violates an operation's preconditions
/// (bad shape, window too large, unknown axis, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical audit cannot single out a consistent answer.
class AuditError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Spinor = std::array<cplx, 2>;

/// 2x2 complex matrix acting on the (L, R) spin index, row-major.
struct Mat2 {
  std::array<cplx, 4> a{};

  constexpr cplx& operator()(int r, int c) { return a[2 * r + c]; }
  constexpr const cplx& operator()(int r, int c) const { return a[2 * r + c]; }

  static constexpr Mat2 identity() { return Mat2{{1.0, 0.0, 0.0, 1.0}}; }
  static constexpr Mat2 zero() { return Mat2{}; }
};

inline Mat2 operator*(const Mat2& x, const Mat2& y) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
  return r;
}

inline Mat2 operator+(const Mat2& x, const Mat2& y) {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}

inline Mat2 operator-(const Mat2& x, const Mat2& y) {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}

inline Mat2 operator*(cplx s, const Mat2& x) {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.a[i] = s * x.a[i];
  return r;
}

inline Mat2 adjoint(const Mat2& x) {
  return Mat2{{std::conj(x(0, 0)), std::conj(x(1, 0)), std::conj(x(0, 1)), std::conj(x(1, 1))}};
}

inline cplx det(const Mat2& x) { return x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0); }

inline double max_abs(const Mat2& x) {
  double m = 0.0;
  for (const auto& v : x.a) m = std::max(m, std::abs(v));
  return m;
}

inline Spinor operator*(const Mat2& m, const Spinor& s) {
  return {m(0, 0) * s[0] + m(0, 1) * s[1], m(1, 0) * s[0] + m(1, 1) * s[1]};
}

inline Mat2 pauli_x() { return Mat2{{0.0, 1.0, 1.0, 0.0}}; }
inline Mat2 pauli_y() { return Mat2{{0.0, -I, I, 0.0}}; }
inline Mat2 pauli_z() { return Mat2{{1.0, 0.0, 0.0, -1.0}}; }

}  // namespace qww
