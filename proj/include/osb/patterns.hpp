#pragma once

// Tuples of partial quotients modulo k, their characters and the transfer-map
// group they generate: null, elementary, prime and type-k words.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "osb/numkernel.hpp"

namespace osb {

/// Entries are arbitrary non-negative integers; operations reduce them mod k.
using Tuple = std::vector<std::int64_t>;

/// (q_{m-1}, q_m) mod k; the empty tuple has state (1, 0).
struct CharState {
  int u = 1;
  int v = 0;
  friend bool operator==(const CharState&, const CharState&) = default;
  friend auto operator<=>(const CharState&, const CharState&) = default;
};

/// States (u, v) with gcd(u, v, k) = 1, in lexicographic order.
std::vector<CharState> reachable_states(int k);

/// A bijection of reachable_states(k), stored as images of the listed states.
struct TransferMap {
  int k = 2;
  std::vector<int> image;

  CharState apply(const CharState& s) const;
  /// (*this) after `first`.
  TransferMap after(const TransferMap& first) const;
  bool is_identity() const;
  friend bool operator==(const TransferMap&, const TransferMap&) = default;
};

/// T_a(u, v) = (v, (a v + u) mod k).
TransferMap transfer_map(std::int64_t a, int k);
/// T_{t_m} after ... after T_{t_0}; the identity for the empty tuple.
TransferMap word_map(const Tuple& t, int k);

/// Word action on (1, 0). Cross-checked against the integer recursion
/// q_n = a_n q_{n-1} + q_{n-2}; a mismatch throws ConsistencyError.
CharState character(const Tuple& t, int k);

bool is_null(const Tuple& t, int k);
/// Identity on every nonzero pair of (Z/k)^2, not only the reachable ones.
bool is_null_all_pairs(const Tuple& t, int k);
bool is_elementary(const Tuple& t, int k);
bool is_prime(const Tuple& t, int k);
bool is_type_k(const Tuple& t, int k);

/// Entries reduced mod k.
Tuple reduce(const Tuple& t, int k);
/// Inserts `n` after position `pos` of `m`; pos = -1 inserts at the front.
Tuple insert_at(const Tuple& m, std::int64_t pos, const Tuple& n);

struct EnumerationBudget {
  std::uint64_t max_group_order = 1u << 20;
  std::uint64_t max_nodes = 50'000'000;
};

/// Order of the group generated by T_0..T_{k-1}. ResourceError past the budget.
std::uint64_t group_order(int k, const EnumerationBudget& budget = {});

/// All patterns sorted by (length, lexicographic). Parallel depth-first search
/// over prefix evaluations; ResourceError when the node budget runs out.
std::vector<Tuple> enumerate_elementary(int k, const EnumerationBudget& budget = {});
std::vector<Tuple> enumerate_prime(int k, const EnumerationBudget& budget = {});
std::vector<Tuple> type_k_primes(int k, const EnumerationBudget& budget = {});

/// Reference enumerations that grow words letter by letter and test each
/// candidate with the direct predicates. Single thread.
std::vector<Tuple> enumerate_elementary_serial(int k, const EnumerationBudget& budget = {});
std::vector<Tuple> enumerate_prime_serial(int k, const EnumerationBudget& budget = {});

/// Minimal n >= 1 with (l, ..., l) (n copies) elementary.
std::int64_t elementary_run_length(std::int64_t l, int k);

struct Insertion {
  std::int64_t position = -1;
  Tuple pattern;
  friend bool operator==(const Insertion&, const Insertion&) = default;
};

struct Decomposition {
  Tuple core;
  /// In replay order: applying them to `core` one by one restores the input.
  std::vector<Insertion> insertions;
};

/// Repeatedly removes the elementary block with the leftmost start.
Decomposition prime_decompose(const Tuple& t, int k);
Tuple replay(const Decomposition& d);

/// {"k", "kind", "patterns", "group_order"}.
nlohmann::json pattern_set_json(int k, const std::string& kind, const std::vector<Tuple>& patterns,
                                std::uint64_t group_order);

}  // namespace osb
