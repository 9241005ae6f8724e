#include "msfbm/classify.hpp"

#include <cmath>

#include "msfbm/errors.hpp"

namespace msfbm::classify {

SemimartingaleVerdict semimartingale_classify(const ProcessSpec& spec) {
  const auto& active = spec.active_set();
  SemimartingaleVerdict v;
  for (std::size_t i : active) {
    if (spec.below_half(spec.hurst(i))) {
      v.reason = SemimartingaleReason::LowHurstComponent;
      return v;
    }
  }
  std::optional<std::size_t> witness;
  bool rest_ok = true;
  for (std::size_t i : active) {
    const double h = spec.hurst(i);
    if (spec.is_half(h)) {
      if (!witness) witness = i;
    } else if (!(h > 0.75)) {
      rest_ok = false;
    }
  }
  if (witness && rest_ok) {
    v.is_semimartingale = true;
    v.witness = witness;
    v.reason = SemimartingaleReason::HalfWitnessAndRest;
  } else if (!witness) {
    v.reason = SemimartingaleReason::AllAboveHalf;
  } else {
    v.reason = SemimartingaleReason::IntermediateHurst;
  }
  return v;
}

bool markov_verdict(const ProcessSpec& spec) {
  for (std::size_t i : spec.active_set()) {
    if (!spec.is_half(spec.hurst(i))) return false;
  }
  return true;
}

Sign increment_sign_predict(const ProcessSpec& spec) {
  bool half = true, above = true, below = true;
  for (std::size_t i : spec.active_set()) {
    const double h = spec.hurst(i);
    half = half && spec.is_half(h);
    above = above && spec.above_half(h);
    below = below && spec.below_half(h);
  }
  if (half) return Sign::Zero;
  if (above) return Sign::Positive;
  if (below) return Sign::Negative;
  return Sign::Indeterminate;
}

Ordering dependence_compare(const ProcessSpec& spec, std::size_t i, double b, double c,
                            const kernels::IncrementWindow& w) {
  if (i >= spec.size()) throw ValidationError("component index out of range");
  if (!std::isfinite(b) || !std::isfinite(c)) throw ValidationError("coefficients must be finite");
  if (std::abs(b) > std::abs(c)) throw PreconditionViolated("dependence_compare needs |b| <= |c|");
  const double h = spec.hurst(i);
  const double comp = spec.is_half(h) ? 0.0 : kernels::component_increment_cov(h, w);
  const double diff = (c * c - b * b) * comp;
  if (diff > 0.0) return Ordering::Greater;
  if (diff < 0.0) return Ordering::Less;
  return Ordering::Equal;
}

Ordering predicted_dependence_order(const ProcessSpec& spec, std::size_t i) {
  const double h = spec.hurst(i);
  if (spec.is_half(h)) return Ordering::Equal;
  return h > 0.5 ? Ordering::Greater : Ordering::Less;
}

std::string to_string(SemimartingaleReason r) {
  switch (r) {
    case SemimartingaleReason::HalfWitnessAndRest: return "HalfWitnessAndRest";
    case SemimartingaleReason::LowHurstComponent: return "LowHurstComponent";
    case SemimartingaleReason::AllAboveHalf: return "AllAboveHalf";
    case SemimartingaleReason::IntermediateHurst: return "IntermediateHurst";
  }
  return "?";
}

std::string to_string(Sign s) {
  switch (s) {
    case Sign::Zero: return "Zero";
    case Sign::Positive: return "Positive";
    case Sign::Negative: return "Negative";
    case Sign::Indeterminate: return "Indeterminate";
  }
  return "?";
}

std::string to_string(Ordering o) {
  switch (o) {
    case Ordering::Less: return "Less";
    case Ordering::Equal: return "Equal";
    case Ordering::Greater: return "Greater";
  }
  return "?";
}

}  // namespace msfbm::classify
