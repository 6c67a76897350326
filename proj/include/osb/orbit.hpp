#pragma once

// Exact evaluation of the rotation orbit {j*alpha}: comparisons against
// rational thresholds, the lambda permutation of a convergent level, the
// crossing index l_n and the three-distance placement facts.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osb/numkernel.hpp"

namespace osb {

enum class Side { Less, Greater };

/// Comparison back-end for {j alpha} versus c.
enum class Backend {
  Convergent,  // adaptive refinement on p_N / q_N
  Surd,        // closed-form quadratic surd arithmetic
  CrossCheck,  // both; ConsistencyError on disagreement
};

/// An irrational alpha with its expansion, closed form and a shared
/// convergent cache. Cheap to copy.
class AlphaHandle {
 public:
  /// Throws DomainError for a finite (rational) expansion.
  static AlphaHandle from_cf(CFExpansion cf);
  /// Throws DomainError for a rational or non-positive surd.
  static AlphaHandle from_surd(const Surd& x);

  const CFExpansion& cf() const { return state_->cache.cf(); }
  /// Always available; reconstructed from the expansion when not supplied.
  const Surd& surd() const { return state_->surd; }
  bool surd_supplied() const { return state_->surd_supplied; }

  /// Convergent rows -2..n (at least).
  std::shared_ptr<const ConvergentTable> table(std::int64_t n) const { return state_->cache.upto(n); }
  BigInt p(std::int64_t n) const { return table(n)->p(n); }
  BigInt q(std::int64_t n) const { return table(n)->q(n); }
  /// Largest n with q_n <= bound (n >= 0).
  std::int64_t level_at_most(const BigInt& bound) const;

 private:
  struct State {
    State(CFExpansion cf, Surd s, bool supplied)
        : cache(std::move(cf)), surd(std::move(s)), surd_supplied(supplied) {}
    ConvergentCache cache;
    Surd surd;
    bool surd_supplied;
  };
  explicit AlphaHandle(std::shared_ptr<const State> s) : state_(std::move(s)) {}
  std::shared_ptr<const State> state_;
};

/// Exact order of {j alpha} versus c. Requires j >= 1 and 0 < c < 1.
Side frac_compare(const AlphaHandle& alpha, const BigInt& j, const Ratio& c,
                  Backend backend = Backend::Convergent);

/// 1 iff {j alpha} < c.
int xi(const AlphaHandle& alpha, const BigInt& j, const Ratio& c,
       Backend backend = Backend::Convergent);

/// floor(m * {j alpha}) computed from surd floors; m >= 1.
BigInt cell_index(const AlphaHandle& alpha, const BigInt& j, const BigInt& m);

/// out[i] = xi(first + i) for a contiguous block of indices. The OpenMP kernel
/// walks j*p_N mod q_N incrementally per chunk; indices it cannot settle fall
/// back to frac_compare.
void xi_block(const AlphaHandle& alpha, const Ratio& c, std::int64_t first,
              std::span<std::uint8_t> out);
/// Reference for xi_block: one frac_compare per index, single thread.
void xi_block_serial(const AlphaHandle& alpha, const Ratio& c, std::int64_t first,
                     std::span<std::uint8_t> out);

/// out[i] = floor(m {(first+i) alpha}), parallel kernel with exact fallback.
void cell_block(const AlphaHandle& alpha, std::int64_t m, std::int64_t first,
                std::span<std::int64_t> out);

// ---------------------------------------------------------------------------
// lambda tables

struct LambdaTable {
  std::int64_t n = 0;
  /// entries[i] = lambda^n_i, the index in [1, q_n] with lambda * p_n = i (mod q_n).
  std::vector<std::int64_t> entries;
};

/// Throws ResourceError when q_n exceeds `max_size`.
LambdaTable lambda_table(const AlphaHandle& alpha, std::int64_t n,
                         std::int64_t max_size = std::int64_t{1} << 26);

/// Single entry lambda^n_i, via p_n^{-1} = (-1)^{n-1} q_{n-1} (mod q_n).
BigInt lambda_at(const AlphaHandle& alpha, std::int64_t n, const BigInt& i);

/// The orbit index whose point straddles c at level n: lambda^n_{[c q_n]} for
/// even n, lambda^n_{[c q_n]+1} for odd n (with lambda_{q_n} := lambda_0).
BigInt critical_lambda(const AlphaHandle& alpha, const Ratio& c, std::int64_t n);

/// nullopt stands for infinity (no crossing inside the level).
using Crossing = std::optional<BigInt>;

/// First period l at which the critical point crosses c. Requires k not
/// dividing q_n; throws DomainError otherwise.
Crossing l_n(const AlphaHandle& alpha, const Ratio& c, std::int64_t n);

// ---------------------------------------------------------------------------
// three-distance placement

struct ThreeDistanceReport {
  std::int64_t n = 0;
  bool pass = true;
  /// "exhaustive": every j <= q_{n+1} located directly.
  /// "certificate": exact bounds on alpha - p_n/q_n that imply the placement
  /// for all j <= q_{n+1}, plus direct spot checks.
  std::string mode;
  std::uint64_t points_checked = 0;
  std::string counterexample;  // empty on pass
};

ThreeDistanceReport three_distance_check(const AlphaHandle& alpha, std::int64_t n,
                                         std::uint64_t exhaustive_budget = 1u << 22);

}  // namespace osb
