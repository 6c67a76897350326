#pragma once

// Seeded property suites shared by `osb verify` and the acceptance runner.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "osb/classify.hpp"

namespace osb {

/// mt19937_64 with a fixed reduction, so streams do not depend on the
/// standard library's distribution implementation.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}
  /// Integer in [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 gen_;
};

struct AlphaSample {
  CFExpansion cf;
  Ratio c;
};

/// Periodic expansions with every quotient after a_0 in [1, max_entry] and
/// windows c = h/k, 2 <= k <= max_k, gcd(h, k) = 1.
std::vector<AlphaSample> sample_pairs(std::uint64_t seed, int count, int max_entry = 5, int max_k = 7);

/// Eventually periodic expansions biased toward quotients divisible by small k.
std::vector<CFExpansion> sample_expansions(std::uint64_t seed, int count);

/// Counts classified instances that come out bounded on both sides.
struct ExclusivityTally {
  std::uint64_t classified = 0;
  std::uint64_t both = 0;
  std::string example;
  /// Scans both routes for every parity; records a violation instead of throwing.
  void record(const CFExpansion& cf, int k);
};

struct SuiteResult {
  std::string name;
  bool pass = true;
  std::string detail;
  double seconds = 0;
  nlohmann::json data = nlohmann::json::object();
};

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  int pairs = 100;                 // oracle / identity sample size
  std::int64_t path_length = 10000;
  int route_family = 500;
  std::int64_t max_level = 12;
  std::uint64_t exhaustive_budget = 1u << 20;
};

SuiteResult suite_pattern_tables();
SuiteResult suite_oracle_equivalence(const SuiteOptions& opt, ExclusivityTally* tally = nullptr);
SuiteResult suite_level_identities(const SuiteOptions& opt, ExclusivityTally* tally = nullptr);
SuiteResult suite_route_agreement(const SuiteOptions& opt, ExclusivityTally* tally = nullptr);
SuiteResult suite_desk_scale(ExclusivityTally* tally = nullptr);
SuiteResult suite_constructor(ExclusivityTally* tally = nullptr);
SuiteResult suite_dimension();
SuiteResult suite_exclusivity(const ExclusivityTally& tally);

/// Names accepted by run_suites: patterns, oracle, identities, routes, desk,
/// construct, dimension, exclusivity, all.
std::vector<std::string> suite_names();
std::vector<SuiteResult> run_suites(const std::string& which, const SuiteOptions& opt);

nlohmann::json suite_json(const SuiteResult& r);

}  // namespace osb
