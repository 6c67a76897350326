#pragma once

// One-sided boundedness of D_n(alpha, h/k) for eventually periodic alpha,
// constructors for bounded members, and the dimension bound g(c).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "osb/discrepancy.hpp"
#include "osb/patterns.hpp"

namespace osb {

enum class Verdict { BoundedAbove, BoundedBelow, Unbounded };
/// m = -1 counts as odd.
enum class Parity { Even, Odd };

std::string verdict_name(Verdict v);  // "above" | "below" | "unbounded"

/// Minimal witness per parity; nullopt when none exists.
struct ParityScan {
  std::optional<std::int64_t> even;
  std::optional<std::int64_t> odd;
};

/// m >= -1 with (a_0..a_m) of type k and k | a_{m+2n} for all n >= 1.
ParityScan partial_quotient_scan(const CFExpansion& cf, int k);
/// m >= -1 with k | q_{m+2n} for all n >= 0.
ParityScan denominator_scan(const CFExpansion& cf, int k);

struct Classification {
  Verdict verdict = Verdict::Unbounded;
  std::optional<std::int64_t> witness_m;     // from the partial-quotient route
  std::optional<std::int64_t> condition2_m;  // from the denominator route
};

/// Requires a periodic expansion and 0 < h < k coprime. Throws ConsistencyError
/// if the routes disagree or both parities admit a witness.
Classification classify(const CFExpansion& cf, std::int64_t h, std::int64_t k);

struct QCondition {
  bool holds = false;
  std::optional<std::int64_t> m;
};
QCondition check_q_condition(const CFExpansion& cf, int k, Parity parity);

nlohmann::json verdict_json(const CFExpansion& cf, std::int64_t h, std::int64_t k,
                            const Classification& c);

/// An eventually periodic expansion starting with `prefix` whose discrepancy
/// at any h/k is bounded above (Even) or below (Odd). Verified by classify.
CFExpansion construct_member(const Tuple& prefix, int k, Parity parity);

struct Extrema {
  std::int64_t min = 0;
  std::int64_t argmin = 0;
  std::int64_t max = 0;
  std::int64_t argmax = 0;
};

/// Extrema of k D_n over 0 <= n <= N (first index attaining each).
Extrema empirical_extrema(const AlphaHandle& alpha, const Ratio& c, std::int64_t N);

/// Certified lo <= g(c) <= hi with dyadic endpoints.
struct Enclosure {
  Ratio lo;
  Ratio hi;
  std::int64_t terms = 0;
};

/// g(c) = 2^{-c} sum_{j>=1} j^{-2c}; requires c > 1/2.
Enclosure g_function(const Ratio& c, const Ratio& tolerance = Ratio(1, BigInt(1) << 44));

struct DimBound {
  Ratio lo;  // g(lo) > 1
  Ratio hi;  // g(hi) < 1
  Enclosure g_lo;
  Enclosure g_hi;
  std::vector<std::pair<Ratio, Enclosure>> samples;
};

/// Bisection bracket of the root of g(c) = 1 with hi - lo < tolerance.
DimBound cstar(const Ratio& tolerance);

/// Decimal rendering of a rational with `digits` fractional digits (truncated).
std::string decimal(const Ratio& x, int digits);

}  // namespace osb
