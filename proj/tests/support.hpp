#pragma once

// Shared test helpers: dataset builders, independent reference
// implementations used as oracles, and exhaustive or seeded enumerators.
//
// The oracles deliberately use the plainest possible algorithms (pairwise
// double loops, existential subset search, per-query rescans) so they do not
// share code paths with the library implementations they check.

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <jointchoice/core.hpp>
#include <jointchoice/json_io.hpp>

namespace jctest {

using namespace jointchoice;

// Runs fn and returns the library error code it throws, if any.
template <typename Fn>
std::optional<Errc> error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline Json load_json(const std::string& path) {
  return Json::parse(read_file(path));
}

inline JointChoiceDataset load_dataset(const std::string& path) {
  ParsedDataset parsed = parse_dataset(load_json(path));
  if (!parsed.dataset) {
    std::string msg = "invalid dataset " + path;
    for (const auto& issue : parsed.report.issues)
      msg += "; " + std::string(errc_name(issue.code)) + " at " + issue.where;
    throw std::runtime_error(msg);
  }
  return std::move(*parsed.dataset);
}

inline JointChoiceDataset ds(const std::string& json_text) {
  ParsedDataset parsed = parse_dataset(Json::parse(json_text));
  if (!parsed.dataset) {
    std::string msg = "invalid inline dataset";
    for (const auto& issue : parsed.report.issues)
      msg += "; " + std::string(errc_name(issue.code)) + " at " + issue.where +
             " (" + issue.detail + ")";
    throw std::runtime_error(msg);
  }
  return std::move(*parsed.dataset);
}

inline Alternative alt(const JointChoiceDataset& D,
                       const std::vector<std::string>& labels) {
  const auto& dims = D.dims();
  Alternative x{dims.all(), {}};
  for (int q = 0; q < dims.dims(); ++q) x.items.push_back(*dims.item_id(q, labels[q]));
  return x;
}

// ---------------------------------------------------------------------------
// Oracles

// Plain double loop over menu pairs, straight from the defining property:
// equal projections of menus force equal projections of choices.
inline bool oracle_S_separable(const JointChoiceDataset& D, DimSubset S) {
  for (int i = 0; i < D.menu_count(); ++i)
    for (int j = 0; j < D.menu_count(); ++j) {
      if (project_menu(D.menu(i), S) != project_menu(D.menu(j), S)) continue;
      if (project_image(D.choice(i), S) != project_image(D.choice(j), S))
        return false;
    }
  return true;
}

// Triple loop over menu pairs and candidate completions, one orientation.
inline bool oracle_menus_betweenness_oriented(const JointChoiceDataset& D,
                                              DimSubset S, DimSubset T) {
  DimSubset meet = S & T;
  for (int i = 0; i < D.menu_count(); ++i)
    for (int j = 0; j < D.menu_count(); ++j) {
      if (!meet.empty() &&
          project_menu(D.menu(i), meet) != project_menu(D.menu(j), meet))
        continue;
      bool found = false;
      for (int k = 0; k < D.menu_count() && !found; ++k)
        found = project_menu(D.menu(k), S) == project_menu(D.menu(i), S) &&
                project_menu(D.menu(k), T) == project_menu(D.menu(j), T);
      if (!found) return false;
    }
  return true;
}

// Unordered-pair reading: each pair must be completable in one orientation.
inline bool oracle_menus_betweenness(const JointChoiceDataset& D,
                                     DimSubset S, DimSubset T) {
  DimSubset meet = S & T;
  for (int i = 0; i < D.menu_count(); ++i)
    for (int j = i + 1; j < D.menu_count(); ++j) {
      if (!meet.empty() &&
          project_menu(D.menu(i), meet) != project_menu(D.menu(j), meet))
        continue;
      bool found = false;
      for (int k = 0; k < D.menu_count() && !found; ++k)
        found = (project_menu(D.menu(k), S) == project_menu(D.menu(i), S) &&
                 project_menu(D.menu(k), T) == project_menu(D.menu(j), T)) ||
                (project_menu(D.menu(k), S) == project_menu(D.menu(j), S) &&
                 project_menu(D.menu(k), T) == project_menu(D.menu(i), T));
      if (!found) return false;
    }
  return true;
}

using AltPair = std::pair<Alternative, Alternative>;

// Revealed preference pairs recomputed from scratch: x over y when x is
// chosen from a menu offering y.
inline std::set<AltPair> oracle_revealed_pairs(const JointChoiceDataset& D) {
  std::set<AltPair> pairs;
  for (int i = 0; i < D.menu_count(); ++i)
    for (const auto& x : D.choice(i))
      for (const auto& y : D.menu(i).alternatives()) pairs.insert({x, y});
  return pairs;
}

inline bool oracle_strict(const std::set<AltPair>& pairs, const Alternative& x,
                          const Alternative& y) {
  return pairs.count({x, y}) != 0 && pairs.count({y, x}) == 0;
}

inline std::vector<Alternative> oracle_max(const std::set<AltPair>& pairs,
                                           const Menu& A) {
  std::vector<Alternative> out;
  for (const auto& x : A.alternatives()) {
    bool dominated = false;
    for (const auto& y : A.alternatives())
      if (oracle_strict(pairs, y, x)) { dominated = true; break; }
    if (!dominated) out.push_back(x);
  }
  normalize_image(out);
  return out;
}

inline bool oracle_rationalizable(const JointChoiceDataset& D) {
  auto pairs = oracle_revealed_pairs(D);
  for (int i = 0; i < D.menu_count(); ++i) {
    auto want = D.choice(i);
    normalize_image(want);
    if (oracle_max(pairs, D.menu(i)) != want) return false;
  }
  return true;
}

// Existential reading of selectivity: for each dimension some subfamily has
// intersection exactly {q}. The library uses the all-members-containing-q
// shortcut; this checks every subfamily instead.
inline bool oracle_selective_existential(const std::vector<DimSubset>& members,
                                         int n_dims) {
  if (members.size() >= 25) throw std::runtime_error("family too big for oracle");
  for (int q = 0; q < n_dims; ++q) {
    bool found = false;
    for (std::uint32_t pick = 1; pick < (1u << members.size()) && !found; ++pick) {
      DimSubset meet = DimSubset::full(n_dims);
      for (std::size_t i = 0; i < members.size(); ++i)
        if ((pick >> i) & 1u) meet = meet & members[i];
      found = meet == DimSubset::single(q);
    }
    if (!found) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Enumerators

inline std::vector<std::uint64_t> nonempty_submasks(int universe_size) {
  std::vector<std::uint64_t> out;
  std::uint64_t top = (std::uint64_t{1} << universe_size);
  for (std::uint64_t m = 1; m < top; ++m) out.push_back(m);
  return out;
}

inline std::vector<Menu> enumerate_complete_menus(const DimensionSet& dims) {
  std::vector<std::vector<std::uint64_t>> axes;
  for (int q = 0; q < dims.dims(); ++q)
    axes.push_back(nonempty_submasks(dims.universe_size(q)));
  std::vector<Menu> out;
  std::vector<std::size_t> pick(axes.size(), 0);
  while (true) {
    Menu A{dims.all(), {}};
    for (std::size_t i = 0; i < axes.size(); ++i) A.sets.push_back(axes[i][pick[i]]);
    out.push_back(std::move(A));
    std::size_t i = axes.size();
    bool done = true;
    while (i > 0) {
      --i;
      if (++pick[i] < axes[i].size()) { done = false; break; }
      pick[i] = 0;
    }
    if (done) return out;
  }
}

// Visits every single-valued complete dataset over the given dimensions.
inline void for_each_single_valued_complete(
    const DimensionSet& dims,
    const std::function<void(const JointChoiceDataset&)>& fn) {
  auto menus = enumerate_complete_menus(dims);
  std::vector<std::vector<Alternative>> alts;
  for (const auto& A : menus) alts.push_back(A.alternatives());
  std::vector<std::size_t> pick(menus.size(), 0);
  while (true) {
    std::vector<std::vector<Alternative>> choices;
    for (std::size_t i = 0; i < menus.size(); ++i)
      choices.push_back({alts[i][pick[i]]});
    fn(make_dataset(dims, menus, std::move(choices)));
    std::size_t i = menus.size();
    bool done = true;
    while (i > 0) {
      --i;
      if (++pick[i] < alts[i].size()) { done = false; break; }
      pick[i] = 0;
    }
    if (done) return;
  }
}

// Visits every complete dataset (choices range over all nonempty subsets).
inline void for_each_complete_correspondence(
    const DimensionSet& dims,
    const std::function<void(const JointChoiceDataset&)>& fn) {
  auto menus = enumerate_complete_menus(dims);
  std::vector<std::vector<Alternative>> alts;
  for (const auto& A : menus) alts.push_back(A.alternatives());
  std::vector<std::uint32_t> pick(menus.size(), 1);
  while (true) {
    std::vector<std::vector<Alternative>> choices;
    for (std::size_t i = 0; i < menus.size(); ++i) {
      std::vector<Alternative> C;
      for (std::size_t b = 0; b < alts[i].size(); ++b)
        if ((pick[i] >> b) & 1u) C.push_back(alts[i][b]);
      choices.push_back(std::move(C));
    }
    fn(make_dataset(dims, menus, std::move(choices)));
    std::size_t i = menus.size();
    bool done = true;
    while (i > 0) {
      --i;
      std::uint32_t top = std::uint32_t{1} << alts[i].size();
      if (++pick[i] < top) { done = false; break; }
      pick[i] = 1;
    }
    if (done) return;
  }
}

// ---------------------------------------------------------------------------
// Seeded randomness (stable across platforms)

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) { return next() % n; }
};

inline DimensionSet small_dims(const std::vector<int>& sizes) {
  std::vector<std::string> labels;
  std::vector<std::vector<std::string>> universes;
  for (std::size_t q = 0; q < sizes.size(); ++q) {
    labels.push_back(std::to_string(q + 1));
    std::vector<std::string> uni;
    for (int i = 0; i < sizes[q]; ++i)
      uni.push_back(std::string(1, static_cast<char>('a' + i)) +
                    std::to_string(q + 1));
    universes.push_back(std::move(uni));
  }
  return DimensionSet::create(std::move(labels), std::move(universes));
}

// A random complete dataset; single-valued when requested, otherwise each
// choice is a uniform nonempty subset of the menu.
inline JointChoiceDataset random_complete(const DimensionSet& dims, bool single,
                                          SplitMix64& rng) {
  auto menus = enumerate_complete_menus(dims);
  std::vector<std::vector<Alternative>> choices;
  for (const auto& A : menus) {
    auto alts = A.alternatives();
    std::vector<Alternative> C;
    if (single) {
      C.push_back(alts[rng.below(alts.size())]);
    } else {
      while (C.empty())
        for (const auto& x : alts)
          if (rng.next() & 1u) C.push_back(x);
    }
    choices.push_back(std::move(C));
  }
  return make_dataset(dims, menus, std::move(choices));
}

// A random dataset over a random sub-collection of menus (always at least
// one), not necessarily complete.
inline JointChoiceDataset random_partial(const DimensionSet& dims, bool single,
                                         SplitMix64& rng) {
  auto all_menus = enumerate_complete_menus(dims);
  std::vector<Menu> menus;
  while (menus.empty())
    for (const auto& A : all_menus)
      if (rng.below(3) == 0) menus.push_back(A);
  std::vector<std::vector<Alternative>> choices;
  for (const auto& A : menus) {
    auto alts = A.alternatives();
    std::vector<Alternative> C;
    if (single) {
      C.push_back(alts[rng.below(alts.size())]);
    } else {
      while (C.empty())
        for (const auto& x : alts)
          if (rng.next() & 1u) C.push_back(x);
    }
    choices.push_back(std::move(C));
  }
  return make_dataset(dims, menus, std::move(choices));
}

inline std::vector<DimSubset> nonempty_subsets(int n_dims) {
  std::vector<DimSubset> out;
  for (std::uint32_t m = 1; m < (1u << n_dims); ++m) out.push_back({m});
  return out;
}

}  // namespace jctest
