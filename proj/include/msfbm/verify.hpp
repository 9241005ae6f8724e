#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "msfbm/process_spec.hpp"

/// Property suites run by `msfbm verify`. Every check records what was
/// measured and the tolerance it was held to; reports contain no timings so
/// identical options give byte-identical output.
namespace msfbm::verify {

enum class Suite { Kernels, Sampler, Srd, Markov, Selfsim };

std::optional<Suite> parse_suite(std::string_view name);
std::string to_string(Suite s);
inline constexpr Suite kAllSuites[] = {Suite::Kernels, Suite::Sampler, Suite::Srd, Suite::Markov,
                                       Suite::Selfsim};

/// How `measured` is judged:
///   AtMost:  measured <= tolerance
///   AtLeast: measured >= tolerance
///   Within:  |measured - target| <= tolerance
enum class Relation { AtMost, AtLeast, Within };

struct Check {
  std::string name;
  Relation relation = Relation::AtMost;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct Report {
  Suite suite = Suite::Kernels;
  std::vector<Check> checks;
  bool passed() const;
};

struct Options {
  /// Spec under test; each suite has its own default set when absent.
  std::optional<ProcessSpec> spec;
  std::uint64_t seed = 20240601;
  /// Randomized draws for the identity checks.
  std::size_t draws = 10000;
  /// Monte Carlo replicas for the sampler and self-similarity suites.
  std::size_t reps = 10000;
  /// 0: MSFBM_THREADS or hardware concurrency.
  unsigned threads = 0;
};

Report run(Suite suite, const Options& options = {});

nlohmann::json to_json(const Report& r);
nlohmann::json to_json(const std::vector<Report>& reports);

}  // namespace msfbm::verify
