#include "doctest.h"

#include <set>

#include "osb/error.hpp"
#include "osb/patterns.hpp"

using namespace osb;

namespace {

// Phi encoding of k = 2 states: (1,1) -> 0, (1,0) -> 1, (0,1) -> 2.
int phi(const CharState& s) {
  if (s == CharState{1, 1}) return 0;
  if (s == CharState{1, 0}) return 1;
  if (s == CharState{0, 1}) return 2;
  return -1;
}

}  // namespace

TEST_CASE("transfer maps are bijections of the state set") {
  for (int k = 2; k <= 7; ++k) {
    const auto states = reachable_states(k);
    for (int a = 0; a < k; ++a) {
      const TransferMap t = transfer_map(a, k);
      std::set<CharState> images;
      for (const CharState& s : states) images.insert(t.apply(s));
      CHECK(images.size() == states.size());
      CHECK(std::set<CharState>(states.begin(), states.end()) == images);
    }
  }
}

TEST_CASE("k = 2 transfer maps in the Phi picture") {
  const TransferMap t1 = transfer_map(1, 2);
  const TransferMap t0 = transfer_map(0, 2);
  for (const CharState& s : reachable_states(2)) {
    CHECK(phi(t1.apply(s)) == (phi(s) + 1) % 3);
    CHECK(phi(t0.apply(s)) == (2 * phi(s)) % 3);
  }
  CHECK(transfer_map(3, 2) == t1);
}

TEST_CASE("characters") {
  CHECK(character({}, 2) == CharState{1, 0});
  CHECK(phi(character({1, 1}, 2)) == 0);
  CHECK(phi(character({1, 0}, 2)) == 1);
  CHECK(phi(character({1}, 2)) == 2);
  // q_m mod k from the convergent recursion.
  for (int k = 3; k <= 6; ++k) {
    const Tuple t{2, 7, 1, 8, 2, 8};
    long q_prev = 1, q = t[1];  // q_0 = 1, q_1 = a_1
    for (std::size_t i = 2; i < t.size(); ++i) {
      const long next = t[i] * q + q_prev;
      q_prev = q;
      q = next;
    }
    const CharState s = character(t, k);
    CHECK(s.u == q_prev % k);
    CHECK(s.v == q % k);
  }
}

TEST_CASE("nullity and elementarity") {
  CHECK(is_null({0, 0}, 2));
  CHECK(is_null({1, 1, 1}, 2));
  CHECK_FALSE(is_null({1, 1}, 2));
  CHECK(is_elementary({0, 1, 0, 1}, 2));
  CHECK(is_elementary({1, 1, 0, 1, 1, 0}, 2));
  CHECK_FALSE(is_elementary({0, 0, 0, 0}, 2));
  CHECK(is_prime({}, 2));
  CHECK(is_prime({1, 0, 1, 1, 0}, 2));
  CHECK_FALSE(is_prime({0, 0}, 2));
  CHECK(is_type_k({}, 2));
  CHECK(is_type_k({1, 0}, 2));
  CHECK_FALSE(is_type_k({1}, 2));
  CHECK(is_null_all_pairs({0, 0}, 2) == is_null({0, 0}, 2));
}

TEST_CASE("k = 2 pattern sets") {
  const std::vector<Tuple> elementary{{0, 0},          {1, 1, 1},          {0, 1, 0, 1},      {1, 0, 1, 0},
                                      {0, 1, 1, 0, 1, 1}, {1, 0, 1, 1, 0, 1}, {1, 1, 0, 1, 1, 0}};
  CHECK(enumerate_elementary(2) == elementary);
  const auto prime = enumerate_prime(2);
  CHECK(prime.size() == 16);
  std::size_t longest_prime = 0, longest_elementary = 0;
  for (const auto& t : prime) longest_prime = std::max(longest_prime, t.size());
  for (const auto& t : elementary) longest_elementary = std::max(longest_elementary, t.size());
  CHECK(longest_prime == 5);
  CHECK(longest_elementary == 6);
  CHECK(type_k_primes(2) == std::vector<Tuple>{{}, {1, 0}, {0, 1, 1}, {1, 1, 0, 1}});
  CHECK(enumerate_prime_serial(2) == prime);
  CHECK(enumerate_elementary_serial(2) == elementary);
  CHECK(group_order(2) == 6);
}

TEST_CASE("group orders") {
  CHECK(group_order(3) == 48);
  CHECK(group_order(4) == 96);
  CHECK(group_order(5) == 240);
  CHECK(group_order(6) == 288);
}

TEST_CASE("k = 3 enumeration exceeds the node budget") {
  EnumerationBudget small;
  small.max_nodes = 200'000;
  CHECK_THROWS_AS(enumerate_elementary(3, small), ResourceError);
  CHECK_THROWS_AS(enumerate_prime(3, small), ResourceError);
  CHECK_THROWS_AS(type_k_primes(3, small), ResourceError);
}

TEST_CASE("elementary run lengths") {
  CHECK(elementary_run_length(0, 2) == 2);
  CHECK(elementary_run_length(1, 2) == 3);
  CHECK(elementary_run_length(2, 2) == 2);
  for (int k = 2; k <= 6; ++k) {
    for (std::int64_t l = 0; l < 2 * k; ++l) {
      const std::int64_t n = elementary_run_length(l, k);
      CHECK(is_elementary(Tuple(static_cast<std::size_t>(n), l), k));
    }
  }
}

TEST_CASE("prime decomposition") {
  const Decomposition d = prime_decompose({0, 1, 0, 1, 1, 0}, 2);
  CHECK(d.core == Tuple{1, 0});
  REQUIRE(d.insertions.size() == 1);
  CHECK(d.insertions[0] == Insertion{-1, {0, 1, 0, 1}});

  const Decomposition e = prime_decompose({0, 0}, 2);
  CHECK(e.core.empty());
  REQUIRE(e.insertions.size() == 1);
  CHECK(e.insertions[0] == Insertion{-1, {0, 0}});

  for (const Tuple& t : {Tuple{1, 1, 1, 0, 1, 1, 0, 1, 1, 0, 0, 1}, Tuple{3, 5, 2, 2, 7, 1, 1}, Tuple{0, 1, 1, 0, 1, 1, 0}}) {
    const Decomposition x = prime_decompose(t, 2);
    CHECK(is_prime(reduce(x.core, 2), 2));
    for (const auto& ins : x.insertions) CHECK(is_elementary(reduce(ins.pattern, 2), 2));
    CHECK(replay(x) == t);
    CHECK(character(x.core, 2) == character(t, 2));
  }
}

TEST_CASE("insertion positions") {
  CHECK(insert_at({1, 2}, -1, {9}) == Tuple{9, 1, 2});
  CHECK(insert_at({1, 2}, 0, {9}) == Tuple{1, 9, 2});
  CHECK(insert_at({1, 2}, 1, {9}) == Tuple{1, 2, 9});
}

TEST_CASE("pattern set json") {
  const auto j = pattern_set_json(2, "type_k_prime", {{1, 1, 0, 1}, {}, {0, 1, 1}, {1, 0}}, 6);
  CHECK(j.dump() == R"({"group_order":6,"k":2,"kind":"type_k_prime","patterns":[[],[1,0],[0,1,1],[1,1,0,1]]})");
}
