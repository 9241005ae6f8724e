#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "msfbm/kernels.hpp"
#include "msfbm/process_spec.hpp"

/// Qualitative verdicts determined by the active Hurst set. H = 1/2 is
/// detected with ProcessSpec::is_half, so the spec's half_tolerance applies.
namespace msfbm::classify {

enum class SemimartingaleReason { HalfWitnessAndRest, LowHurstComponent, AllAboveHalf, IntermediateHurst };

struct SemimartingaleVerdict {
  bool is_semimartingale = false;
  std::optional<std::size_t> witness;  // zero-based index k_0, lowest admissible
  SemimartingaleReason reason = SemimartingaleReason::LowHurstComponent;
};

/// Semimartingale iff some active H_{k0} = 1/2 and every other active H_i
/// lies in {1/2} or (3/4, 1). Clauses in order: any active H < 1/2, the iff
/// condition, no active H = 1/2, otherwise an H in (1/2, 3/4].
SemimartingaleVerdict semimartingale_classify(const ProcessSpec& spec);

/// Markov iff every active H_i = 1/2.
bool markov_verdict(const ProcessSpec& spec);

enum class Sign { Zero, Positive, Negative, Indeterminate };

/// Sign of the covariance of disjoint increments: Zero when every active
/// H = 1/2, Positive when all are above, Negative when all are below.
Sign increment_sign_predict(const ProcessSpec& spec);

enum class Ordering { Less, Equal, Greater };

/// Orders increment_cov with coefficient c in slot i against the same
/// quantity with coefficient b: Greater means the c-version is larger.
/// Evaluated as (c^2 - b^2) * component_increment_cov(H_i, w), so b = 0 is
/// allowed. Throws PreconditionViolated if |b| > |c|.
Ordering dependence_compare(const ProcessSpec& spec, std::size_t i, double b, double c,
                            const kernels::IncrementWindow& w);

/// Ordering predicted from H_i alone for |b| < |c|: Less below 1/2, Equal at
/// 1/2, Greater above.
Ordering predicted_dependence_order(const ProcessSpec& spec, std::size_t i);

std::string to_string(SemimartingaleReason r);
std::string to_string(Sign s);
std::string to_string(Ordering o);

}  // namespace msfbm::classify
