#include "tsm/wavefront_memory.hpp"

namespace tsm {

std::size_t enforce_range(Wavefront& w, const RangeConfig& rc,
                          const std::string& context) {
  const TimeValue limit = rc.t_max();
  std::size_t saturated = 0;
  for (auto& e : w) {
    if (e.is_inf() || e <= limit) continue;
    if (rc.policy == OverflowPolicy::STRICT) {
      throw RangeViolation(context + ": value " + e.str() +
                           " exceeds t_max " + limit.str());
    }
    e = kInf;
    ++saturated;
  }
  return saturated;
}

VectorRegister::VectorRegister(std::string id, std::size_t width)
    : id_(std::move(id)), width_(width) {
  if (width_ == 0) throw Error("register width must be at least 1");
}

std::size_t VectorRegister::write_direct(const Wavefront& w,
                                         const RangeConfig& rc) {
  if (w.size() != width_) {
    throw DimensionMismatch("write of length " + std::to_string(w.size()) +
                            " into register " + id_ + " of width " +
                            std::to_string(width_));
  }
  Wavefront stored = w;
  std::size_t saturated = enforce_range(stored, rc, "register " + id_);
  contents_ = std::move(stored);
  norm_constant_ = 0;
  initialized_ = true;
  return saturated;
}

VectorRegister::ProjectiveWrite VectorRegister::write_projective(
    const Wavefront& w, const RangeConfig& rc) {
  if (w.size() != width_) {
    throw DimensionMismatch("write of length " + std::to_string(w.size()) +
                            " into register " + id_ + " of width " +
                            std::to_string(width_));
  }
  NormalizedWavefront norm = normalize(w);
  ProjectiveWrite out;
  out.overflow_events = enforce_range(norm.shape, rc, "register " + id_);
  contents_ = std::move(norm.shape);
  norm_constant_ = norm.constant;
  initialized_ = true;
  out.constant = norm.constant;
  return out;
}

const Wavefront& VectorRegister::read() const {
  if (!initialized_) {
    throw UninitializedRegister("register " + id_ + " was never written");
  }
  return contents_;
}

MatrixBank::MatrixBank(std::string id, std::size_t n)
    : id_(std::move(id)), n_(n), entries_(n) {
  if (n_ == 0) throw Error("matrix bank dimension must be at least 1");
}

std::size_t MatrixBank::program(const TropicalMatrix& a, const RangeConfig& rc) {
  if (a.n() != n_) {
    throw DimensionMismatch("programming a " + std::to_string(a.n()) + "x" +
                            std::to_string(a.n()) + " matrix into bank " + id_ +
                            " of dimension " + std::to_string(n_));
  }
  TropicalMatrix stored = a;
  const TimeValue limit = rc.t_max();
  std::size_t saturated = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) {
      TimeValue& e = stored.at(j, i);
      if (e.is_inf() || e <= limit) continue;
      if (rc.policy == OverflowPolicy::STRICT) {
        throw RangeViolation("bank " + id_ + ": entry " + e.str() +
                             " exceeds t_max " + limit.str());
      }
      e = kInf;
      ++saturated;
    }
  }
  entries_ = std::move(stored);
  return saturated;
}

std::size_t MatrixBank::write_column(const Wavefront& onehot,
                                     const Wavefront& w,
                                     const RangeConfig& rc) {
  if (onehot.size() != n_ || w.size() != n_) {
    throw DimensionMismatch("column write operands must have length " +
                            std::to_string(n_));
  }
  std::size_t column = n_;
  for (std::size_t i = 0; i < n_; ++i) {
    if (onehot[i].is_inf()) continue;
    if (column != n_) {
      throw NotOneHot("column selector for bank " + id_ +
                      " has more than one finite element");
    }
    column = i;
  }
  if (column == n_) return 0;

  Wavefront stored = w;
  std::size_t saturated = enforce_range(stored, rc, "bank " + id_);
  for (std::size_t j = 0; j < n_; ++j) entries_.at(j, column) = stored[j];
  return saturated;
}

void MatrixBank::inhibit_rows(const Wavefront& mask) {
  if (mask.size() != n_) {
    throw DimensionMismatch("row mask for bank " + id_ + " must have length " +
                            std::to_string(n_));
  }
  for (auto e : mask) {
    if (e.finite() && e != TimeValue(0)) {
      throw NotBinary("row mask for bank " + id_ +
                      " holds finite nonzero element " + e.str());
    }
  }
  for (std::size_t j = 0; j < n_; ++j) {
    if (mask[j].is_inf()) continue;
    for (std::size_t i = 0; i < n_; ++i) entries_.at(j, i) = kInf;
  }
}

}  // namespace tsm
