#include "tsm/tropical_core.hpp"

#include <algorithm>

namespace tsm {

std::string TimeValue::str() const {
  return is_inf() ? "inf" : std::to_string(raw_);
}

TimeValue t_add(TimeValue a, TimeValue b) { return a < b ? a : b; }

TimeValue t_mul(TimeValue a, TimeValue b) {
  if (a.is_inf() || b.is_inf()) return kInf;
  std::uint64_t s = a.ticks() + b.ticks();
  // Wraparound cannot occur for grid-sized ticks; treated as absorption if it does.
  if (s < a.ticks()) return kInf;
  return TimeValue(s);
}

TimeValue t_max(TimeValue a, TimeValue b) { return a < b ? b : a; }

TimeValue t_inhibit(TimeValue inhibitor, TimeValue data, TieMode tie) {
  if (tie == TieMode::STRICT_BLOCK) {
    return data < inhibitor ? data : kInf;
  }
  return data <= inhibitor ? data : kInf;
}

TimeValue coincidence(TimeValue a, TimeValue b, std::uint64_t epsilon) {
  if (epsilon == 0) {
    throw Error("coincidence window must be at least 1");
  }
  TimeValue first = t_add(a, b);
  TimeValue last = t_max(a, b);
  return t_inhibit(t_mul(TimeValue(epsilon), first), last, TieMode::STRICT_BLOCK);
}

Wavefront ew(EwOp op, const Wavefront& u, const Wavefront& v, TieMode tie) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("elementwise operands have lengths " +
                            std::to_string(u.size()) + " and " +
                            std::to_string(v.size()));
  }
  Wavefront out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    switch (op) {
      case EwOp::MIN:
        out[i] = t_add(u[i], v[i]);
        break;
      case EwOp::MAX:
        out[i] = t_max(u[i], v[i]);
        break;
      case EwOp::INHIBIT:
        out[i] = t_inhibit(u[i], v[i], tie);
        break;
    }
  }
  return out;
}

Wavefront ew_mul(const Wavefront& u, const Wavefront& v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("elementwise operands have lengths " +
                            std::to_string(u.size()) + " and " +
                            std::to_string(v.size()));
  }
  Wavefront out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = t_mul(u[i], v[i]);
  return out;
}

Wavefront scale(TimeValue c, const Wavefront& x) {
  Wavefront out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = t_mul(c, x[i]);
  return out;
}

Wavefront vmm(const TropicalMatrix& a, const Wavefront& x) {
  if (a.n() != x.size()) {
    throw DimensionMismatch("matrix dimension " + std::to_string(a.n()) +
                            " does not match vector length " +
                            std::to_string(x.size()));
  }
  Wavefront y(a.n(), kInf);
  for (std::size_t j = 0; j < a.n(); ++j) {
    TimeValue acc = kInf;
    for (std::size_t i = 0; i < a.n(); ++i) {
      acc = t_add(acc, t_mul(a.at(j, i), x[i]));
    }
    y[j] = acc;
  }
  return y;
}

Wavefront argmin_onehot(const Wavefront& x) {
  Wavefront out(x.size(), kInf);
  std::size_t best = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].finite() && (best == x.size() || x[i] < x[best])) best = i;
  }
  if (best != x.size()) out[best] = x[best];
  return out;
}

Wavefront binarize(const Wavefront& x, TimeValue t_max_value) {
  if (t_max_value.is_inf()) {
    throw Error("binarize threshold must be finite");
  }
  Wavefront out(x.size(), kInf);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_inf()) continue;
    if (x[i] > t_max_value) {
      throw RangeViolation("binarize input " + x[i].str() +
                           " exceeds t_max " + t_max_value.str());
    }
    out[i] = t_max(t_max_value, x[i]);
  }
  return out;
}

NormalizedWavefront normalize(const Wavefront& x) {
  NormalizedWavefront out;
  out.shape = x;
  TimeValue m = min_reduce(x);
  if (m.is_inf()) {
    out.constant = 0;
    return out;
  }
  out.constant = m;
  for (auto& e : out.shape) {
    if (e.finite()) e = TimeValue(e.ticks() - m.ticks());
  }
  return out;
}

TimeValue min_reduce(const Wavefront& x) {
  TimeValue acc = kInf;
  for (auto e : x) acc = t_add(acc, e);
  return acc;
}

TimeValue max_reduce(const Wavefront& x) {
  if (x.empty()) return kInf;
  TimeValue acc = x[0];
  for (auto e : x) acc = t_max(acc, e);
  return acc;
}

Wavefront make_onehot(std::size_t width, std::size_t index, TimeValue value) {
  Wavefront out(width, kInf);
  if (index < width) out[index] = value;
  return out;
}

Wavefront make_filled(std::size_t width, TimeValue value) {
  return Wavefront(width, value);
}

}  // namespace tsm
