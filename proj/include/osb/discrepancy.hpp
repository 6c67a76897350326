#pragma once

// Local discrepancy paths v_n = k * D_n(alpha, h/k), stored as integers.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "osb/orbit.hpp"

namespace osb {

struct DiscrepancyPath {
  Ratio c;
  /// values[n] = k * D_n for n = 0..N; values[0] = 0.
  std::vector<std::int64_t> values;

  std::int64_t length() const { return static_cast<std::int64_t>(values.size()) - 1; }
  /// xi_n recovered from the increment, n >= 1.
  int xi_at(std::int64_t n) const;
};

/// Direct evaluation with the parallel xi kernel.
DiscrepancyPath path_direct(const AlphaHandle& alpha, const Ratio& c, std::int64_t N);
/// Reference: one exact comparison per index, single thread.
DiscrepancyPath path_direct_serial(const AlphaHandle& alpha, const Ratio& c, std::int64_t N);

/// k * D_M at a single (possibly huge) index by floor sums, O(log M).
BigInt kd_at(const AlphaHandle& alpha, const Ratio& c, const BigInt& M);

struct ExtremaTrack {
  std::vector<std::int64_t> max;  // max_{j <= n} v_j
  std::vector<std::int64_t> min;
};

ExtremaTrack running_extrema(const DiscrepancyPath& path);

/// Single-period shapes at level n; index 0 holds 0, indices 1..q_n the path.
struct TemplatePair {
  std::int64_t n = 0;
  std::vector<std::int64_t> hat;
  std::vector<std::int64_t> check;
  Crossing l_n;
  std::int64_t lambda = 0;  // critical index
};

/// Requires k not dividing q_n and q_n <= max_size. Odd n uses the mirrored
/// index map (critical residue [c q_n] + 1, wrapping to 0).
TemplatePair templates(const AlphaHandle& alpha, const Ratio& c, std::int64_t n,
                       std::int64_t max_size = std::int64_t{1} << 26);

struct LevelStep {
  std::int64_t n = 0;
  std::int64_t q = 0;
  bool divisible = false;  // k | q_n: pure periodic copy
  Crossing l_n;
  std::int64_t lambda = 0;
  std::int64_t filled_to = 0;
};

/// Builds the base level directly, then lifts period by period. Throws
/// ConsistencyError when a level contradicts its case analysis.
DiscrepancyPath path_recursive(const AlphaHandle& alpha, const Ratio& c, std::int64_t N,
                               std::vector<LevelStep>* trace = nullptr);

struct IdentityReport {
  bool pass = true;
  std::uint64_t evaluated = 0;
  std::string counterexample;
};

struct BackwardsReport {
  std::int64_t n = 0;
  bool exhaustive = true;
  Crossing l_n;
  std::int64_t lambda = 0;
  IdentityReport first;             // over j in [0, q_{n-1}]
  IdentityReport second_printed;    // right side with the guard lambda <= q_{n-1}
  IdentityReport second_derived;    // right side 1{1 <= l_n <= l-1} 1{j < lambda}
};

/// Requires n even and k not dividing q_n. Exhaustive when q_{n+1} <= budget,
/// otherwise boundary values plus `samples` seeded random indices via kd_at.
BackwardsReport backwards_check(const AlphaHandle& alpha, const Ratio& c, std::int64_t n,
                                std::uint64_t budget = 1u << 22, std::uint64_t seed = 1,
                                int samples = 48);

struct ResidueReport {
  bool pass = true;
  std::int64_t levels = 0;
  std::string counterexample;
};

ResidueReport dqn_residue_check(const AlphaHandle& alpha, const Ratio& c, std::int64_t n_max);

/// Columns n, xi_n, kDn, runmax, runmin; row n = 0 carries xi_n = 0.
void write_csv(std::ostream& os, const DiscrepancyPath& path);

}  // namespace osb
