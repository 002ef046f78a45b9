#pragma once

// Stateful model of the temporal wavefront memory: fixed-width vector
// registers with direct and projective (normalized) write modes, a finite
// dynamic range, and matrix banks supporting column writes and row inhibits.
// The ideal clock line makes dead time a no-op, so reads return exactly what
// was stored.

#include <cstdint>
#include <string>

#include "tsm/tropical_core.hpp"

namespace tsm {

enum class OverflowPolicy { STRICT, SATURATE_TO_INFINITY };

struct RangeConfig {
  // t_max = 2^bits - 1. bits must stay in [1, 62] so t_max is finite.
  unsigned bits = 5;
  OverflowPolicy policy = OverflowPolicy::STRICT;

  TimeValue t_max() const {
    return TimeValue((std::uint64_t{1} << bits) - 1);
  }
};

// Applies the dynamic-range policy to a wavefront in place.
// Returns the number of elements saturated to infinity (always 0 under STRICT,
// which throws RangeViolation instead).
std::size_t enforce_range(Wavefront& w, const RangeConfig& rc,
                          const std::string& context);

// One named register holding a wavefront of immutable width.
// Reading a register that was never written is an error.
class VectorRegister {
 public:
  VectorRegister(std::string id, std::size_t width);

  const std::string& id() const { return id_; }
  std::size_t width() const { return width_; }
  bool initialized() const { return initialized_; }

  // Stores w verbatim after range enforcement; norm_constant becomes 0.
  // Returns the number of saturated elements.
  std::size_t write_direct(const Wavefront& w, const RangeConfig& rc);

  struct ProjectiveWrite {
    TimeValue constant{0};
    std::size_t overflow_events = 0;
  };

  // Stores normalize(w).shape and records normalize(w).constant.
  // Range enforcement applies to the normalized shape only.
  ProjectiveWrite write_projective(const Wavefront& w, const RangeConfig& rc);

  const Wavefront& read() const;
  TimeValue norm_constant() const { return norm_constant_; }

 private:
  std::string id_;
  std::size_t width_;
  Wavefront contents_;
  TimeValue norm_constant_{0};
  bool initialized_ = false;
};

// A named square bank of tropical cells. A fresh bank holds the all-infinity
// matrix (the empty graph).
class MatrixBank {
 public:
  MatrixBank(std::string id, std::size_t n);

  const std::string& id() const { return id_; }
  std::size_t n() const { return n_; }
  const TropicalMatrix& entries() const { return entries_; }

  // Replaces the whole bank. Returns the number of saturated entries.
  std::size_t program(const TropicalMatrix& a, const RangeConfig& rc);

  // Replaces the column selected by the one-hot vector with w.
  // All-infinity selector is a no-op; two or more finite elements is an error.
  // Returns the number of saturated elements of w.
  std::size_t write_column(const Wavefront& onehot, const Wavefront& w,
                           const RangeConfig& rc);

  // Every row whose mask element is 0 becomes all-infinity. Mask elements must
  // be 0 or infinity.
  void inhibit_rows(const Wavefront& mask);

 private:
  std::string id_;
  std::size_t n_;
  TropicalMatrix entries_;
};

}  // namespace tsm
