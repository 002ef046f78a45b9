#pragma once

// Pure tropical (min, +) scalar, vector and matrix operations.
// Values encode arrival times of rising edges; infinity means "never arrives".
// Everything in this header is stateless and safe for concurrent use.

#include <cstdint>
#include <string>
#include <vector>

#include "tsm/errors.hpp"

namespace tsm {

// A nonnegative tick count on the discrete time grid, or infinity.
// Infinity is the additive identity (min) and absorbs under multiplication (+).
class TimeValue {
 public:
  constexpr TimeValue() = default;
  constexpr TimeValue(std::uint64_t ticks) : raw_(ticks) {}

  static constexpr TimeValue inf() {
    TimeValue t;
    t.raw_ = kInfRaw;
    return t;
  }

  constexpr bool is_inf() const { return raw_ == kInfRaw; }
  constexpr bool finite() const { return raw_ != kInfRaw; }

  // Only meaningful when finite().
  constexpr std::uint64_t ticks() const { return raw_; }

  friend constexpr bool operator==(TimeValue, TimeValue) = default;
  // Infinity sorts after every finite value.
  friend constexpr auto operator<=>(TimeValue a, TimeValue b) {
    return a.raw_ <=> b.raw_;
  }

  std::string str() const;

 private:
  static constexpr std::uint64_t kInfRaw = ~std::uint64_t{0};
  std::uint64_t raw_ = 0;
};

inline constexpr TimeValue kInf = TimeValue::inf();

// Fixed-length ordered list of arrival times. Length is fixed by context
// (register width, matrix dimension); operations check it.
using Wavefront = std::vector<TimeValue>;

// Square grid of arrival times. Entry (row j, column i) is the weight of the
// edge i -> j, so column i lists the outgoing edges of node i and a one-hot
// input at i selects that column under vmm.
class TropicalMatrix {
 public:
  TropicalMatrix() = default;
  explicit TropicalMatrix(std::size_t n) : n_(n), cells_(n * n, kInf) {}

  std::size_t n() const { return n_; }

  TimeValue& at(std::size_t row, std::size_t col) {
    return cells_[row * n_ + col];
  }
  TimeValue at(std::size_t row, std::size_t col) const {
    return cells_[row * n_ + col];
  }

  friend bool operator==(const TropicalMatrix&, const TropicalMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<TimeValue> cells_;
};

// A wavefront with its temporal origin divided out. If any element of shape is
// finite, the minimum element of shape is exactly 0, and
// scale(constant, shape) reproduces the original wavefront.
struct NormalizedWavefront {
  Wavefront shape;
  TimeValue constant{0};
};

enum class TieMode { STRICT_BLOCK, PASS_ON_TIE };
enum class EwOp { MIN, MAX, INHIBIT };

// Tropical addition: min(a, b). Identity: infinity.
TimeValue t_add(TimeValue a, TimeValue b);

// Tropical multiplication: a + b. Identity: 0. Infinity absorbs.
TimeValue t_mul(TimeValue a, TimeValue b);

// Last arrival: max(a, b). Infinity dominates.
TimeValue t_max(TimeValue a, TimeValue b);

// The inhibitor blocks the data signal when it arrives first.
// STRICT_BLOCK: data passes iff data < inhibitor. PASS_ON_TIE: iff data <= inhibitor.
TimeValue t_inhibit(TimeValue inhibitor, TimeValue data,
                    TieMode tie = TieMode::STRICT_BLOCK);

// [epsilon * min(a,b)] -| max(a,b): max(a, b) when |a - b| < epsilon, else inf.
// epsilon must be >= 1; the zero-window form is not defined.
TimeValue coincidence(TimeValue a, TimeValue b, std::uint64_t epsilon);

// Elementwise min / max / inhibit. For INHIBIT, u is the inhibitor.
Wavefront ew(EwOp op, const Wavefront& u, const Wavefront& v,
             TieMode tie = TieMode::STRICT_BLOCK);

// Elementwise tropical multiplication of two wavefronts.
Wavefront ew_mul(const Wavefront& u, const Wavefront& v);

// Delay every element by c.
Wavefront scale(TimeValue c, const Wavefront& x);

// Tropical matrix-vector product: y_j = min_i (A[j][i] + x_i).
Wavefront vmm(const TropicalMatrix& a, const Wavefront& x);

// One-hot at the index of the minimum element, carrying that element's value.
// Ties break toward the lowest index. All-infinity maps to all-infinity.
Wavefront argmin_onehot(const Wavefront& x);

// Elementwise max with t_max: finite elements become t_max, infinity stays.
// Every finite element must already be <= t_max.
Wavefront binarize(const Wavefront& x, TimeValue t_max);

// Divide out the minimum element. All-infinity input keeps its shape and gets
// constant 0.
NormalizedWavefront normalize(const Wavefront& x);

TimeValue min_reduce(const Wavefront& x);
TimeValue max_reduce(const Wavefront& x);

// Convenience builders used throughout the library and tests.
Wavefront make_onehot(std::size_t width, std::size_t index, TimeValue value = 0);
Wavefront make_filled(std::size_t width, TimeValue value);

}  // namespace tsm
