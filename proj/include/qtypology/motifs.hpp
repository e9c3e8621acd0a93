#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qtypology/error.hpp"

namespace qtypology {

// A frequent fragment itemset. `fragments` holds canonical fragment strings in
// sorted order; `occurrences` the sorted indices of the transactions
// (question sentences) containing all of them.
struct Motif {
  int id = -1;
  std::vector<std::string> fragments;
  std::size_t support = 0;
  int representative = -1;
  std::vector<std::uint32_t> occurrences;

  std::size_t size() const { return fragments.size(); }
  bool is_representative() const { return representative == id; }

  std::string key() const {
    std::string k;
    for (std::size_t i = 0; i < fragments.size(); ++i) {
      if (i) k += '|';
      k += fragments[i];
    }
    return k;
  }
};

// Orders motifs by (size, canonical key); ids follow this order.
inline bool motif_order(const Motif& a, const Motif& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.fragments < b.fragments;
}

namespace detail {

struct VectorHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (int x : v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

inline std::vector<std::uint32_t> intersect(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  out.reserve(std::min(a.size(), b.size()));
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::size_t intersection_size(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace detail

// Level-wise apriori over fragment sets. Candidates of size k+1 come from
// joining frequent k-itemsets that share their first k-1 items and survive
// the subset-pruning step; supports are counted by intersecting the
// transaction-id lists of the two joined itemsets. Returns every itemset of
// size <= max_size contained in at least min_support transactions, ordered
// and numbered by (size, canonical key).
inline std::vector<Motif> mine_motifs(const std::vector<std::vector<std::string>>& transactions, std::size_t min_support,
                                      std::size_t max_size) {
  if (min_support < 1) throw Error(ErrorKind::kValidation, "min_support must be >= 1");
  if (max_size < 1) throw Error(ErrorKind::kValidation, "max_size must be >= 1");

  // Item ids follow string order, so sorted id vectors are sorted string vectors.
  std::set<std::string> universe;
  for (const auto& t : transactions) universe.insert(t.begin(), t.end());
  std::vector<std::string> names(universe.begin(), universe.end());
  std::unordered_map<std::string, int> id_of;
  for (std::size_t i = 0; i < names.size(); ++i) id_of.emplace(names[i], static_cast<int>(i));

  std::vector<std::vector<std::uint32_t>> item_tids(names.size());
  for (std::size_t t = 0; t < transactions.size(); ++t) {
    std::set<int> seen;
    for (const auto& f : transactions[t]) seen.insert(id_of.at(f));
    for (int i : seen) item_tids[static_cast<std::size_t>(i)].push_back(static_cast<std::uint32_t>(t));
  }

  struct Level {
    std::vector<std::vector<int>> items;
    std::vector<std::vector<std::uint32_t>> tids;
  };
  std::vector<Motif> out;
  auto emit = [&](const Level& level) {
    for (std::size_t i = 0; i < level.items.size(); ++i) {
      Motif m;
      for (int x : level.items[i]) m.fragments.push_back(names[static_cast<std::size_t>(x)]);
      m.support = level.tids[i].size();
      m.occurrences = level.tids[i];
      out.push_back(std::move(m));
    }
  };

  Level level;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (item_tids[i].size() >= min_support) {
      level.items.push_back({static_cast<int>(i)});
      level.tids.push_back(std::move(item_tids[i]));
    }
  }
  emit(level);

  for (std::size_t k = 1; k < max_size && level.items.size() > 1; ++k) {
    std::unordered_set<std::vector<int>, detail::VectorHash> frequent(level.items.begin(), level.items.end());
    Level next;
    // level.items is sorted lexicographically; itemsets sharing a (k-1)-prefix are contiguous.
    for (std::size_t a = 0; a < level.items.size(); ++a) {
      for (std::size_t b = a + 1; b < level.items.size(); ++b) {
        const auto& x = level.items[a];
        const auto& y = level.items[b];
        if (!std::equal(x.begin(), x.end() - 1, y.begin())) break;
        std::vector<int> cand = x;
        cand.push_back(y.back());
        bool all_frequent = true;
        std::vector<int> sub(cand.size() - 1);
        for (std::size_t drop = 0; drop + 2 < cand.size() && all_frequent; ++drop) {
          std::size_t w = 0;
          for (std::size_t i = 0; i < cand.size(); ++i)
            if (i != drop) sub[w++] = cand[i];
          all_frequent = frequent.count(sub) > 0;
        }
        if (!all_frequent) continue;
        auto tids = detail::intersect(level.tids[a], level.tids[b]);
        if (tids.size() < min_support) continue;
        next.items.push_back(std::move(cand));
        next.tids.push_back(std::move(tids));
      }
    }
    emit(next);
    level = std::move(next);
  }

  std::sort(out.begin(), out.end(), motif_order);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].id = static_cast<int>(i);
    out[i].representative = out[i].id;
  }
  return out;
}

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

// Conditional containment probability Pr(a | b) over transactions.
inline double containment_probability(const Motif& a, const Motif& b) {
  if (b.support == 0) return 0.0;
  return static_cast<double>(detail::intersection_size(a.occurrences, b.occurrences)) / static_cast<double>(b.support);
}

inline bool equivalent_motifs(const Motif& a, const Motif& b, double p) {
  const double inter = static_cast<double>(detail::intersection_size(a.occurrences, b.occurrences));
  return inter > p * static_cast<double>(b.support) && inter > p * static_cast<double>(a.support);
}

struct MergeStats {
  std::size_t groups = 0;   // equivalence classes (= representatives)
  std::size_t merged = 0;   // motifs pointing at another representative
};

// Groups motifs related by Pr(m1|m2) > p and Pr(m2|m1) > p (transitive
// closure) and sets each motif's `representative` to the member with the
// fewest fragments, ties broken by the smallest canonical key. Motifs must be
// in motif_order with id == index (as returned by mine_motifs).
inline MergeStats merge_equivalent(std::vector<Motif>& motifs, double p) {
  if (!(p > 0.5 && p <= 1.0)) throw Error(ErrorKind::kValidation, "p must satisfy 0.5 < p <= 1");
  for (std::size_t i = 0; i < motifs.size(); ++i)
    if (motifs[i].id != static_cast<int>(i)) throw Error(ErrorKind::kValidation, "motif ids must equal their index");

  std::vector<std::size_t> by_support(motifs.size());
  std::iota(by_support.begin(), by_support.end(), std::size_t{0});
  std::stable_sort(by_support.begin(), by_support.end(),
                   [&](std::size_t a, std::size_t b) { return motifs[a].support > motifs[b].support; });

  detail::UnionFind uf(motifs.size());
  // Both conditions need min(s1, s2) > p * max(s1, s2), so only a window of
  // the support-sorted list can pair with a given motif.
  for (std::size_t x = 0; x < by_support.size(); ++x) {
    const Motif& big = motifs[by_support[x]];
    for (std::size_t y = x + 1; y < by_support.size(); ++y) {
      const Motif& small = motifs[by_support[y]];
      if (!(static_cast<double>(small.support) > p * static_cast<double>(big.support))) break;
      if (equivalent_motifs(big, small, p)) uf.unite(by_support[x], by_support[y]);
    }
  }

  // Motif order already ranks (size, key), so the smallest index wins.
  std::map<std::size_t, std::size_t> rep_of_root;
  for (std::size_t i = 0; i < motifs.size(); ++i) rep_of_root.emplace(uf.find(i), i);
  MergeStats stats;
  for (std::size_t i = 0; i < motifs.size(); ++i) {
    motifs[i].representative = static_cast<int>(rep_of_root.at(uf.find(i)));
    if (!motifs[i].is_representative()) ++stats.merged;
  }
  stats.groups = rep_of_root.size();
  return stats;
}

struct MotifEdge {
  int from = -1;
  int to = -1;
  std::string added;  // the fragment `to` has beyond `from`

  friend bool operator==(const MotifEdge&, const MotifEdge&) = default;
};

// Specificity DAG over mined motifs: an edge m1 -> m2 exactly when m2 has all
// of m1's fragments plus one more. Each node keeps its equivalence-class
// representative from merge_equivalent.
class MotifGraph {
 public:
  MotifGraph() = default;

  const std::vector<Motif>& motifs() const { return motifs_; }
  const Motif& motif(int id) const { return motifs_[static_cast<std::size_t>(id)]; }
  const std::vector<MotifEdge>& edges() const { return edges_; }
  const std::vector<int>& out_edges(int id) const { return out_[static_cast<std::size_t>(id)]; }

  // Representatives in id order (the deduplicated motif set).
  std::vector<int> representatives() const {
    std::vector<int> reps;
    for (const auto& m : motifs_)
      if (m.is_representative()) reps.push_back(m.id);
    return reps;
  }

  int singleton(const std::string& fragment) const {
    auto it = singleton_.find(fragment);
    return it == singleton_.end() ? -1 : it->second;
  }

 private:
  friend MotifGraph build_dag(std::vector<Motif> motifs);

  std::vector<Motif> motifs_;
  std::vector<MotifEdge> edges_;
  std::vector<std::vector<int>> out_;  // indices into edges_
  std::unordered_map<std::string, int> singleton_;
};

inline MotifGraph build_dag(std::vector<Motif> motifs) {
  std::sort(motifs.begin(), motifs.end(), motif_order);
  std::vector<int> old_to_new(motifs.size(), -1);
  bool renumber = false;
  for (std::size_t i = 0; i < motifs.size(); ++i) {
    if (motifs[i].id < 0 || static_cast<std::size_t>(motifs[i].id) >= motifs.size() ||
        motifs[i].id != static_cast<int>(i))
      renumber = true;
  }
  if (renumber) {
    // Ids must be index-aligned; representatives are remapped alongside.
    std::unordered_map<int, int> remap;
    for (std::size_t i = 0; i < motifs.size(); ++i) remap.emplace(motifs[i].id, static_cast<int>(i));
    for (std::size_t i = 0; i < motifs.size(); ++i) {
      auto it = remap.find(motifs[i].representative);
      motifs[i].representative = it == remap.end() ? static_cast<int>(i) : it->second;
      motifs[i].id = static_cast<int>(i);
    }
  }
  for (auto& m : motifs)
    if (m.representative < 0) m.representative = m.id;

  MotifGraph g;
  std::map<std::vector<std::string>, int> by_fragments;
  for (const auto& m : motifs) {
    if (m.fragments.empty()) throw Error(ErrorKind::kValidation, "motif with no fragments");
    if (!by_fragments.emplace(m.fragments, m.id).second)
      throw Error(ErrorKind::kValidation, "duplicate motif " + m.key());
  }
  g.out_.resize(motifs.size());
  for (const auto& m : motifs) {
    if (m.size() == 1) g.singleton_.emplace(m.fragments[0], m.id);
    if (m.size() < 2) continue;
    std::vector<std::string> sub(m.size() - 1);
    for (std::size_t drop = 0; drop < m.size(); ++drop) {
      std::size_t w = 0;
      for (std::size_t i = 0; i < m.size(); ++i)
        if (i != drop) sub[w++] = m.fragments[i];
      auto it = by_fragments.find(sub);
      if (it != by_fragments.end()) g.edges_.push_back({it->second, m.id, m.fragments[drop]});
    }
  }
  std::sort(g.edges_.begin(), g.edges_.end(),
            [](const MotifEdge& a, const MotifEdge& b) { return std::pair(a.from, a.to) < std::pair(b.from, b.to); });
  for (std::size_t e = 0; e < g.edges_.size(); ++e)
    g.out_[static_cast<std::size_t>(g.edges_[e].from)].push_back(static_cast<int>(e));
  g.motifs_ = std::move(motifs);
  return g;
}

// Every mined motif whose fragments are all in `fragments`, in id order.
// Mined families are closed under subsets, so a walk up from the contained
// singletons along edges whose added fragment is present reaches them all.
inline std::vector<int> contained_motifs(const std::set<std::string>& fragments, const MotifGraph& g) {
  std::vector<char> seen(g.motifs().size(), 0);
  std::vector<int> stack;
  for (const auto& f : fragments) {
    const int s = g.singleton(f);
    if (s >= 0 && !seen[static_cast<std::size_t>(s)]) {
      seen[static_cast<std::size_t>(s)] = 1;
      stack.push_back(s);
    }
  }
  std::vector<int> out;
  while (!stack.empty()) {
    const int m = stack.back();
    stack.pop_back();
    out.push_back(m);
    for (int e : g.out_edges(m)) {
      const MotifEdge& edge = g.edges()[static_cast<std::size_t>(e)];
      if (seen[static_cast<std::size_t>(edge.to)] || !fragments.count(edge.added)) continue;
      seen[static_cast<std::size_t>(edge.to)] = 1;
      stack.push_back(edge.to);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct QuestionMotifView {
  std::string pair_id;
  std::vector<int> contained_motifs;  // representative ids, sorted
  std::vector<int> sink_motifs;       // representative ids, sorted

  friend bool operator==(const QuestionMotifView&, const QuestionMotifView&) = default;
};

// Motif view of one question sentence. The induced subgraph is taken over
// the mined lattice and contracted by equivalence class, so a class counts
// as contained when one of its members is, and it is a sink when none of its
// contained members has an edge to a contained member of another class.
// Classes that reach each other (a cycle after contraction) share sink status.
inline QuestionMotifView question_view(const std::set<std::string>& fragments, const MotifGraph& g,
                                       std::string owner_id = {}) {
  QuestionMotifView view;
  view.pair_id = std::move(owner_id);
  const auto lattice = contained_motifs(fragments, g);
  if (lattice.empty()) return view;

  std::vector<char> inside(g.motifs().size(), 0);
  for (int m : lattice) inside[static_cast<std::size_t>(m)] = 1;

  std::map<int, std::set<int>> succ;
  for (int m : lattice) {
    const int cm = g.motif(m).representative;
    succ[cm];
    for (int e : g.out_edges(m)) {
      const int to = g.edges()[static_cast<std::size_t>(e)].to;
      if (!inside[static_cast<std::size_t>(to)]) continue;
      const int ct = g.motif(to).representative;
      if (ct != cm) succ[cm].insert(ct);
    }
  }
  for (const auto& [c, _] : succ) view.contained_motifs.push_back(c);

  auto reach = [&](int start) {
    std::set<int> r;
    std::vector<int> st{start};
    while (!st.empty()) {
      int x = st.back();
      st.pop_back();
      for (int y : succ[x])
        if (r.insert(y).second) st.push_back(y);
    }
    return r;
  };
  std::map<int, std::set<int>> reachable;
  for (const auto& [c, _] : succ) reachable[c] = reach(c);
  for (const auto& [c, out] : succ) {
    bool sink = true;
    for (int d : reachable[c]) {
      if (!reachable[d].count(c)) {
        sink = false;
        break;
      }
    }
    if (sink) view.sink_motifs.push_back(c);
  }
  return view;
}

// Utterance-level view: union of the per-question contained classes and sinks.
inline QuestionMotifView utterance_view(const std::string& pair_id, const std::vector<std::set<std::string>>& questions,
                                        const MotifGraph& g) {
  std::set<int> contained, sinks;
  for (const auto& q : questions) {
    auto v = question_view(q, g);
    contained.insert(v.contained_motifs.begin(), v.contained_motifs.end());
    sinks.insert(v.sink_motifs.begin(), v.sink_motifs.end());
  }
  return {pair_id, {contained.begin(), contained.end()}, {sinks.begin(), sinks.end()}};
}

}  // namespace qtypology
