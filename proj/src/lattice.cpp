#include "qww/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>

namespace qww {

namespace {

std::atomic<double> g_d2_scale{1.0};

void require_same_shape(const LatticeField& a, const LatticeField& b) {
  if (!a.same_shape(b)) throw PreconditionError("lattice fields have different shapes");
}

void require_axis(const LatticeField& f, std::size_t axis) {
  if (axis >= f.rank()) throw PreconditionError("unknown axis index " + std::to_string(axis));
}

// Index of i+offset along an axis, or -1 if it leaves a windowed axis.
long neighbour(const Axis& ax, std::size_t i, long offset) {
  const long n = static_cast<long>(ax.extent);
  long j = static_cast<long>(i) + offset;
  if (ax.boundary == Boundary::periodic) return ((j % n) + n) % n;
  return (j < 0 || j >= n) ? -1 : j;
}

template <typename Stencil>
LatticeField apply_stencil(const LatticeField& f, std::size_t axis, Stencil&& stencil) {
  require_axis(f, axis);
  const Axis& ax = f.axes()[axis];
  if (ax.boundary == Boundary::windowed && ax.extent < 3)
    throw PreconditionError("windowed axis '" + ax.name + "' shorter than 3");
  LatticeField out(f.axes());
  const std::size_t st = f.stride(axis);
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    const std::size_t i = f.coordinate(flat, axis);
    const long up = neighbour(ax, i, +1);
    const long dn = neighbour(ax, i, -1);
    if (up < 0 || dn < 0) {
      out[flat] = 0.0;
      out.set_valid(flat, false);
      continue;
    }
    const std::size_t base = flat - i * st;
    const std::size_t fu = base + static_cast<std::size_t>(up) * st;
    const std::size_t fd = base + static_cast<std::size_t>(dn) * st;
    out[flat] = stencil(f[fu], f[flat], f[fd]);
    out.set_valid(flat, f.is_valid(fu) && f.is_valid(fd) && f.is_valid(flat));
  }
  return out;
}

template <typename Op>
LatticeField combine(const LatticeField& a, const LatticeField& b, Op&& op) {
  require_same_shape(a, b);
  LatticeField out(a.axes());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = op(a[i], b[i]);
    out.set_valid(i, a.is_valid(i) && b.is_valid(i));
  }
  return out;
}

}  // namespace

void LatticeShape::validate() const {
  if (space_extent < 4 || space_extent % 2 != 0)
    throw PreconditionError("space extent N must be even and >= 4 (got " +
                            std::to_string(space_extent) + ")");
  if (time_extent < 3)
    throw PreconditionError("time extent J must be >= 3 (got " + std::to_string(time_extent) + ")");
}

LatticeField::LatticeField(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw PreconditionError("lattice field needs at least one axis");
  strides_.assign(axes_.size(), 1);
  std::size_t total = 1;
  for (std::size_t k = axes_.size(); k-- > 0;) {
    if (axes_[k].extent == 0) throw PreconditionError("axis '" + axes_[k].name + "' has zero extent");
    strides_[k] = total;
    total *= axes_[k].extent;
  }
  values_.assign(total, cplx{});
  valid_.assign(total, 1);
}

LatticeField::LatticeField(std::vector<Axis> axes, std::vector<cplx> values)
    : LatticeField(std::move(axes)) {
  if (values.size() != values_.size())
    throw PreconditionError("value count does not match axis extents");
  values_ = std::move(values);
}

std::size_t LatticeField::axis_index(const std::string& name) const {
  for (std::size_t k = 0; k < axes_.size(); ++k)
    if (axes_[k].name == name) return k;
  throw PreconditionError("unknown axis '" + name + "'");
}

std::size_t LatticeField::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != axes_.size()) throw PreconditionError("index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] >= axes_[k].extent) throw PreconditionError("index out of range");
    flat += index[k] * strides_[k];
  }
  return flat;
}

bool LatticeField::same_shape(const LatticeField& other) const {
  if (axes_.size() != other.axes_.size()) return false;
  for (std::size_t k = 0; k < axes_.size(); ++k)
    if (axes_[k].extent != other.axes_[k].extent || axes_[k].boundary != other.axes_[k].boundary)
      return false;
  return true;
}

LatticeField d1(const LatticeField& f, std::size_t axis) {
  return apply_stencil(f, axis, [](cplx up, cplx, cplx dn) { return 0.5 * (up - dn); });
}

LatticeField d2(const LatticeField& f, std::size_t axis) {
  const double scale = testing::d2_scale();
  return apply_stencil(f, axis, [scale](cplx up, cplx mid, cplx dn) {
    return scale * 0.5 * (up + dn - 2.0 * mid);
  });
}

LatticeField shift(const LatticeField& f, std::size_t axis, long offset) {
  require_axis(f, axis);
  const Axis& ax = f.axes()[axis];
  if (static_cast<std::size_t>(std::labs(offset)) >= ax.extent)
    throw PreconditionError("shift offset " + std::to_string(offset) + " out of range on axis '" +
                            ax.name + "'");
  LatticeField out(f.axes());
  const std::size_t st = f.stride(axis);
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    const std::size_t i = f.coordinate(flat, axis);
    const long src = neighbour(ax, i, offset);
    if (src < 0) {
      out[flat] = 0.0;
      out.set_valid(flat, false);
      continue;
    }
    const std::size_t fs = flat - i * st + static_cast<std::size_t>(src) * st;
    out[flat] = f[fs];
    out.set_valid(flat, f.is_valid(fs));
  }
  return out;
}

LatticeField d1(const LatticeField& f, const std::string& axis) { return d1(f, f.axis_index(axis)); }
LatticeField d2(const LatticeField& f, const std::string& axis) { return d2(f, f.axis_index(axis)); }
LatticeField shift(const LatticeField& f, const std::string& axis, long offset) {
  return shift(f, f.axis_index(axis), offset);
}

LatticeField operator+(const LatticeField& a, const LatticeField& b) {
  return combine(a, b, [](cplx x, cplx y) { return x + y; });
}
LatticeField operator-(const LatticeField& a, const LatticeField& b) {
  return combine(a, b, [](cplx x, cplx y) { return x - y; });
}
LatticeField operator*(const LatticeField& a, const LatticeField& b) {
  return combine(a, b, [](cplx x, cplx y) { return x * y; });
}
LatticeField operator*(cplx s, const LatticeField& a) {
  LatticeField out = a;
  for (auto& v : out.values()) v *= s;
  return out;
}

double max_abs_diff(const LatticeField& a, const LatticeField& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.is_valid(i) && b.is_valid(i)) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

namespace testing {
void set_d2_scale(double scale) { g_d2_scale.store(scale); }
double d2_scale() { return g_d2_scale.load(); }
}  // namespace testing

}  // namespace qww
