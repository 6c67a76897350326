#include "osb/patterns.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

namespace osb {

namespace {

void require_modulus(int k) {
  if (k < 2) throw DomainError("modulus k must be >= 2, got " + std::to_string(k));
}

int residue(std::int64_t a, int k) {
  if (a < 0) throw DomainError("tuple entries must be non-negative");
  return static_cast<int>(a % k);
}

int state_index(const CharState& s, int k) { return s.u * k + s.v; }

// Lookup from (u, v) to the position in reachable_states(k); -1 if unreachable.
struct StateSpace {
  int k;
  std::vector<CharState> states;
  std::vector<int> index;

  explicit StateSpace(int k_) : k(k_), states(reachable_states(k_)), index(static_cast<std::size_t>(k_ * k_), -1) {
    for (std::size_t i = 0; i < states.size(); ++i) index[static_cast<std::size_t>(state_index(states[i], k))] = static_cast<int>(i);
  }
  int at(const CharState& s) const { return index[static_cast<std::size_t>(state_index(s, k))]; }
};

using Perm = std::vector<std::uint16_t>;

// The group generated by T_0..T_{k-1}, with a left-multiplication table.
struct TransferGroup {
  int k = 0;
  std::vector<Perm> elements;       // elements[0] is the identity
  std::vector<std::vector<int>> gen;  // gen[a][g] = id of T_a after g
};

std::shared_ptr<const TransferGroup> build_group(int k, std::uint64_t max_order) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const TransferGroup>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(k);
    if (it != cache.end()) {
      if (it->second->elements.size() > max_order) {
        throw ResourceError("transfer group for k=" + std::to_string(k) + " exceeds the order budget");
      }
      return it->second;
    }
  }
  const StateSpace space(k);
  const std::size_t n = space.states.size();
  std::vector<Perm> letters(static_cast<std::size_t>(k), Perm(n));
  for (int a = 0; a < k; ++a) {
    const TransferMap t = transfer_map(a, k);
    for (std::size_t i = 0; i < n; ++i) letters[static_cast<std::size_t>(a)][i] = static_cast<std::uint16_t>(t.image[i]);
  }

  auto group = std::make_shared<TransferGroup>();
  group->k = k;
  group->gen.assign(static_cast<std::size_t>(k), {});
  std::map<Perm, int> ids;
  Perm identity(n);
  std::iota(identity.begin(), identity.end(), std::uint16_t{0});
  ids.emplace(identity, 0);
  group->elements.push_back(identity);
  for (std::size_t g = 0; g < group->elements.size(); ++g) {
    for (int a = 0; a < k; ++a) {
      const Perm& cur = group->elements[g];
      const Perm& letter = letters[static_cast<std::size_t>(a)];
      Perm next(n);
      for (std::size_t i = 0; i < n; ++i) next[i] = letter[cur[i]];
      auto [it, inserted] = ids.emplace(std::move(next), static_cast<int>(group->elements.size()));
      if (inserted) {
        if (group->elements.size() + 1 > max_order) {
          throw ResourceError("transfer group for k=" + std::to_string(k) + " exceeds the order budget");
        }
        group->elements.push_back(it->first);
      }
      group->gen[static_cast<std::size_t>(a)].resize(group->elements.size(), -1);
      group->gen[static_cast<std::size_t>(a)][g] = it->second;
    }
  }
  for (auto& row : group->gen) row.resize(group->elements.size());
  std::lock_guard lock(mutex);
  cache.emplace(k, group);
  return group;
}

bool by_length_then_lex(const Tuple& a, const Tuple& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

// Prefix evaluations P_0..P_m as group ids.
std::vector<int> prefix_ids(const Tuple& t, const TransferGroup& g) {
  std::vector<int> ids(t.size() + 1, 0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    ids[i + 1] = g.gen[static_cast<std::size_t>(residue(t[i], g.k))][static_cast<std::size_t>(ids[i])];
  }
  return ids;
}

struct Found {
  std::vector<Tuple> elementary;
  std::vector<Tuple> prime;
};

// Depth-first search over words whose prefix evaluations are pairwise distinct.
class Walker {
 public:
  Walker(const TransferGroup& g, std::atomic<std::uint64_t>& nodes, std::uint64_t max_nodes)
      : g_(g), nodes_(nodes), max_nodes_(max_nodes), seen_(g.elements.size(), 0) {}

  void run(Tuple& word, int cur, Found& out) {
    if (nodes_.fetch_add(1, std::memory_order_relaxed) >= max_nodes_) {
      throw ResourceError("pattern enumeration for k=" + std::to_string(g_.k) + " exceeds the node budget");
    }
    for (int a = 0; a < g_.k; ++a) {
      const int next = g_.gen[static_cast<std::size_t>(a)][static_cast<std::size_t>(cur)];
      word.push_back(a);
      if (next == 0) {
        out.elementary.push_back(word);
      } else if (!seen_[static_cast<std::size_t>(next)]) {
        out.prime.push_back(word);
        seen_[static_cast<std::size_t>(next)] = 1;
        run(word, next, out);
        seen_[static_cast<std::size_t>(next)] = 0;
      }
      word.pop_back();
    }
  }

  void mark(int id, bool on) { seen_[static_cast<std::size_t>(id)] = on ? 1 : 0; }

 private:
  const TransferGroup& g_;
  std::atomic<std::uint64_t>& nodes_;
  std::uint64_t max_nodes_;
  std::vector<char> seen_;
};

Found enumerate(int k, const EnumerationBudget& budget) {
  require_modulus(k);
  const auto group = build_group(k, budget.max_group_order);
  const TransferGroup& g = *group;

  // Seed tasks: all prime words of a short fixed length, explored in parallel.
  struct Task {
    Tuple word;
    std::vector<int> path;  // prefix ids, path[0] = identity
  };
  Found head;
  head.prime.push_back({});
  std::vector<Task> frontier{{{}, {0}}};
  constexpr std::size_t kSeedDepth = 3;
  for (std::size_t depth = 0; depth < kSeedDepth && !frontier.empty(); ++depth) {
    std::vector<Task> next;
    for (const auto& task : frontier) {
      for (int a = 0; a < k; ++a) {
        const int id = g.gen[static_cast<std::size_t>(a)][static_cast<std::size_t>(task.path.back())];
        Tuple w = task.word;
        w.push_back(a);
        if (id == 0) {
          head.elementary.push_back(std::move(w));
        } else if (std::find(task.path.begin(), task.path.end(), id) == task.path.end()) {
          head.prime.push_back(w);
          std::vector<int> p = task.path;
          p.push_back(id);
          next.push_back({std::move(w), std::move(p)});
        }
      }
    }
    frontier = std::move(next);
  }

  std::atomic<std::uint64_t> nodes{0};
  std::vector<Found> parts(frontier.size());
  std::exception_ptr error;
  std::mutex error_mutex;

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    try {
      Walker walker(g, nodes, budget.max_nodes);
      for (int id : frontier[i].path) walker.mark(id, true);
      Tuple word = frontier[i].word;
      walker.run(word, frontier[i].path.back(), parts[i]);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  for (auto& part : parts) {
    head.elementary.insert(head.elementary.end(), part.elementary.begin(), part.elementary.end());
    head.prime.insert(head.prime.end(), part.prime.begin(), part.prime.end());
  }
  std::sort(head.elementary.begin(), head.elementary.end(), by_length_then_lex);
  std::sort(head.prime.begin(), head.prime.end(), by_length_then_lex);
  return head;
}

}  // namespace

// ---------------------------------------------------------------------------
// states and maps

std::vector<CharState> reachable_states(int k) {
  require_modulus(k);
  std::vector<CharState> out;
  for (int u = 0; u < k; ++u) {
    for (int v = 0; v < k; ++v) {
      if (std::gcd(std::gcd(u, v), k) == 1) out.push_back({u, v});
    }
  }
  return out;
}

CharState TransferMap::apply(const CharState& s) const {
  const StateSpace space(k);
  const int i = space.at(s);
  if (i < 0) throw DomainError("state outside the reachable set");
  return space.states[static_cast<std::size_t>(image[static_cast<std::size_t>(i)])];
}

TransferMap TransferMap::after(const TransferMap& first) const {
  if (first.k != k) throw DomainError("composing transfer maps with different moduli");
  TransferMap out{k, std::vector<int>(image.size())};
  for (std::size_t i = 0; i < image.size(); ++i) {
    out.image[i] = image[static_cast<std::size_t>(first.image[i])];
  }
  return out;
}

bool TransferMap::is_identity() const {
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (image[i] != static_cast<int>(i)) return false;
  }
  return true;
}

TransferMap transfer_map(std::int64_t a, int k) {
  require_modulus(k);
  const int r = residue(a, k);
  const StateSpace space(k);
  TransferMap t{k, std::vector<int>(space.states.size())};
  for (std::size_t i = 0; i < space.states.size(); ++i) {
    const CharState s = space.states[i];
    t.image[i] = space.at({s.v, (r * s.v + s.u) % k});
  }
  return t;
}

TransferMap word_map(const Tuple& t, int k) {
  require_modulus(k);
  const StateSpace space(k);
  TransferMap m{k, std::vector<int>(space.states.size())};
  std::iota(m.image.begin(), m.image.end(), 0);
  for (auto a : t) m = transfer_map(a, k).after(m);
  return m;
}

CharState character(const Tuple& t, int k) {
  require_modulus(k);
  CharState s{1, 0};
  BigInt q_prev = 1;
  BigInt q = 0;
  for (auto a : t) {
    const int r = residue(a, k);
    s = {s.v, (r * s.v + s.u) % k};
    BigInt next = BigInt(static_cast<long>(a)) * q + q_prev;
    q_prev = std::move(q);
    q = std::move(next);
  }
  const CharState direct{static_cast<int>(BigInt(q_prev % k).get_si()), static_cast<int>(BigInt(q % k).get_si())};
  if (direct != s) throw ConsistencyError("character: word action and recursion disagree");
  return s;
}

bool is_null(const Tuple& t, int k) {
  if (t.empty()) throw DomainError("is_null: tuple must be nonempty");
  return word_map(t, k).is_identity();
}

bool is_null_all_pairs(const Tuple& t, int k) {
  require_modulus(k);
  if (t.empty()) throw DomainError("is_null_all_pairs: tuple must be nonempty");
  for (int u = 0; u < k; ++u) {
    for (int v = 0; v < k; ++v) {
      if (u == 0 && v == 0) continue;
      int x = u;
      int y = v;
      for (auto a : t) {
        const int nx = y;
        y = (residue(a, k) * y + x) % k;
        x = nx;
      }
      if (x != u || y != v) return false;
    }
  }
  return true;
}

bool is_elementary(const Tuple& t, int k) {
  if (t.empty()) throw DomainError("is_elementary: tuple must be nonempty");
  if (!is_null(t, k)) return false;
  for (std::size_t len = 1; len < t.size(); ++len) {
    for (std::size_t i = 0; i + len <= t.size(); ++i) {
      if (is_null(Tuple(t.begin() + static_cast<std::ptrdiff_t>(i), t.begin() + static_cast<std::ptrdiff_t>(i + len)), k)) {
        return false;
      }
    }
  }
  return true;
}

bool is_prime(const Tuple& t, int k) {
  require_modulus(k);
  for (std::size_t i = 0; i < t.size(); ++i) {
    TransferMap m = word_map({}, k);
    for (std::size_t j = i; j < t.size(); ++j) {
      m = transfer_map(t[j], k).after(m);
      if (m.is_identity()) return false;
    }
  }
  return true;
}

bool is_type_k(const Tuple& t, int k) { return character(t, k).v == 0; }

Tuple reduce(const Tuple& t, int k) {
  require_modulus(k);
  Tuple out;
  out.reserve(t.size());
  for (auto a : t) out.push_back(residue(a, k));
  return out;
}

Tuple insert_at(const Tuple& m, std::int64_t pos, const Tuple& n) {
  if (pos < -1 || pos >= static_cast<std::int64_t>(m.size())) {
    throw DomainError("insertion position " + std::to_string(pos) + " out of range");
  }
  Tuple out(m.begin(), m.begin() + pos + 1);
  out.insert(out.end(), n.begin(), n.end());
  out.insert(out.end(), m.begin() + pos + 1, m.end());
  return out;
}

// ---------------------------------------------------------------------------
// enumeration

std::uint64_t group_order(int k, const EnumerationBudget& budget) {
  require_modulus(k);
  return build_group(k, budget.max_group_order)->elements.size();
}

std::vector<Tuple> enumerate_elementary(int k, const EnumerationBudget& budget) {
  return enumerate(k, budget).elementary;
}

std::vector<Tuple> enumerate_prime(int k, const EnumerationBudget& budget) {
  return enumerate(k, budget).prime;
}

std::vector<Tuple> type_k_primes(int k, const EnumerationBudget& budget) {
  std::vector<Tuple> out;
  for (auto& t : enumerate_prime(k, budget)) {
    if (is_type_k(t, k)) out.push_back(std::move(t));
  }
  return out;
}

namespace {

Found enumerate_serial(int k, const EnumerationBudget& budget) {
  require_modulus(k);
  Found found;
  std::vector<Tuple> layer{{}};
  found.prime.push_back({});
  std::uint64_t nodes = 0;
  while (!layer.empty()) {
    std::vector<Tuple> next;
    for (const auto& w : layer) {
      for (int a = 0; a < k; ++a) {
        if (++nodes > budget.max_nodes) {
          throw ResourceError("pattern enumeration for k=" + std::to_string(k) + " exceeds the node budget");
        }
        Tuple x = w;
        x.push_back(a);
        if (is_prime(x, k)) {
          found.prime.push_back(x);
          next.push_back(std::move(x));
        } else if (is_elementary(x, k)) {
          found.elementary.push_back(std::move(x));
        }
      }
    }
    layer = std::move(next);
  }
  std::sort(found.elementary.begin(), found.elementary.end(), by_length_then_lex);
  std::sort(found.prime.begin(), found.prime.end(), by_length_then_lex);
  return found;
}

}  // namespace

std::vector<Tuple> enumerate_elementary_serial(int k, const EnumerationBudget& budget) {
  return enumerate_serial(k, budget).elementary;
}

std::vector<Tuple> enumerate_prime_serial(int k, const EnumerationBudget& budget) {
  return enumerate_serial(k, budget).prime;
}

std::int64_t elementary_run_length(std::int64_t l, int k) {
  require_modulus(k);
  const TransferMap t = transfer_map(l, k);
  TransferMap m = t;
  std::int64_t n = 1;
  while (!m.is_identity()) {
    m = t.after(m);
    ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// decomposition

Decomposition prime_decompose(const Tuple& t, int k) {
  require_modulus(k);
  const auto group = build_group(k, EnumerationBudget{}.max_group_order);
  Tuple cur = t;
  std::vector<Insertion> removed;
  while (true) {
    const std::vector<int> ids = prefix_ids(cur, *group);
    bool found = false;
    for (std::size_t s = 0; s < cur.size() && !found; ++s) {
      std::size_t e = s + 1;
      while (e < ids.size() && ids[e] != ids[s]) ++e;
      if (e == ids.size()) continue;
      // [s, e) is null; elementary iff P_s..P_{e-1} are distinct.
      std::vector<int> window(ids.begin() + static_cast<std::ptrdiff_t>(s), ids.begin() + static_cast<std::ptrdiff_t>(e));
      std::sort(window.begin(), window.end());
      if (std::adjacent_find(window.begin(), window.end()) != window.end()) continue;
      removed.push_back({static_cast<std::int64_t>(s) - 1,
                         Tuple(cur.begin() + static_cast<std::ptrdiff_t>(s), cur.begin() + static_cast<std::ptrdiff_t>(e))});
      cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(s), cur.begin() + static_cast<std::ptrdiff_t>(e));
      found = true;
    }
    if (!found) break;
  }
  std::reverse(removed.begin(), removed.end());
  return {cur, removed};
}

Tuple replay(const Decomposition& d) {
  Tuple cur = d.core;
  for (const auto& ins : d.insertions) cur = insert_at(cur, ins.position, ins.pattern);
  return cur;
}

nlohmann::json pattern_set_json(int k, const std::string& kind, const std::vector<Tuple>& patterns,
                                std::uint64_t group_order) {
  std::vector<Tuple> sorted = patterns;
  std::sort(sorted.begin(), sorted.end(), by_length_then_lex);
  nlohmann::json out;
  out["k"] = k;
  out["kind"] = kind;
  out["patterns"] = sorted;
  out["group_order"] = group_order;
  return out;
}

}  // namespace osb
