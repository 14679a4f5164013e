#pragma once

// Preferences over full alternatives and their interplay with joint choices:
// revealed preference, rationalizability, preference separability across a
// dimension subset, domain richness, additively separable utilities, and the
// selective-family shortcut for rationalizability of separable data.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "core.hpp"
#include "selective.hpp"
#include "separability.hpp"

namespace jointchoice {

inline constexpr std::size_t kMaxAlternativeSpace = 8192;

// Dense index over all full-scope alternatives of a dimension set. Keeps
// only the universe sizes, so copies and moves stay self-contained.
class AlternativeSpace {
 public:
  explicit AlternativeSpace(const DimensionSet& dims) {
    std::size_t n = 1;
    for (int q = 0; q < dims.dims(); ++q) {
      sizes_.push_back(dims.universe_size(q));
      n *= static_cast<std::size_t>(dims.universe_size(q));
      if (n > kMaxAlternativeSpace)
        throw Error(Errc::UniverseTooLarge,
                    "alternative space exceeds " +
                        std::to_string(kMaxAlternativeSpace) + " elements");
    }
    size_ = n;
  }

  std::size_t size() const { return size_; }

  std::size_t index_of(const Alternative& x) const {
    std::size_t idx = 0;
    for (std::size_t q = 0; q < sizes_.size(); ++q)
      idx = idx * static_cast<std::size_t>(sizes_[q]) +
            static_cast<std::size_t>(x.items[q]);
    return idx;
  }

  Alternative at(std::size_t idx) const {
    int n = static_cast<int>(sizes_.size());
    Alternative x{DimSubset::full(n), std::vector<int>(sizes_.size(), 0)};
    for (int q = n - 1; q >= 0; --q) {
      std::size_t s = static_cast<std::size_t>(sizes_[q]);
      x.items[q] = static_cast<int>(idx % s);
      idx /= s;
    }
    return x;
  }

 private:
  std::vector<int> sizes_;
  std::size_t size_ = 1;
};

// A reflexive binary relation on full alternatives. The strict part is
// derived: x strictly over y when x ≥ y holds and y ≥ x does not.
class PreferenceRelation {
 public:
  explicit PreferenceRelation(DimensionSet dims)
      : dims_(std::move(dims)), space_(dims_), rel_(space_.size() * space_.size(), 0) {
    for (std::size_t i = 0; i < space_.size(); ++i) rel_[i * space_.size() + i] = 1;
  }

  static PreferenceRelation from_pairs(
      DimensionSet dims,
      const std::vector<std::pair<Alternative, Alternative>>& pairs) {
    PreferenceRelation R(std::move(dims));
    for (const auto& [x, y] : pairs) R.add(x, y);
    return R;
  }

  const DimensionSet& dims() const { return dims_; }
  const AlternativeSpace& space() const { return space_; }

  void add(const Alternative& x, const Alternative& y) {
    rel_[space_.index_of(x) * space_.size() + space_.index_of(y)] = 1;
  }

  bool holds(const Alternative& x, const Alternative& y) const {
    return rel_[space_.index_of(x) * space_.size() + space_.index_of(y)] != 0;
  }
  bool holds_idx(std::size_t i, std::size_t j) const {
    return rel_[i * space_.size() + j] != 0;
  }
  bool strict(const Alternative& x, const Alternative& y) const {
    return holds(x, y) && !holds(y, x);
  }
  bool strict_idx(std::size_t i, std::size_t j) const {
    return holds_idx(i, j) && !holds_idx(j, i);
  }

  // All weak pairs except the reflexive diagonal, in index order.
  std::vector<std::pair<Alternative, Alternative>> pairs() const {
    std::vector<std::pair<Alternative, Alternative>> out;
    for (std::size_t i = 0; i < space_.size(); ++i)
      for (std::size_t j = 0; j < space_.size(); ++j)
        if (i != j && holds_idx(i, j)) out.push_back({space_.at(i), space_.at(j)});
    return out;
  }

 private:
  DimensionSet dims_;
  AlternativeSpace space_;
  std::vector<char> rel_;
};

struct CycleWitness {
  std::vector<Alternative> cycle;  // each strictly over the next, last over first
};

inline bool replay(const PreferenceRelation& R, const CycleWitness& w) {
  if (w.cycle.size() < 2) return false;
  for (std::size_t i = 0; i < w.cycle.size(); ++i)
    if (!R.strict(w.cycle[i], w.cycle[(i + 1) % w.cycle.size()])) return false;
  return true;
}

struct AcyclicityReport {
  bool acyclic = false;
  std::optional<CycleWitness> witness;
};

inline AcyclicityReport is_acyclic(const PreferenceRelation& R) {
  const std::size_t n = R.space().size();
  std::vector<int> color(n, 0);  // 0 fresh, 1 on stack, 2 done
  std::vector<std::size_t> path;
  // Iterative DFS with explicit neighbor cursors, nodes visited in order.
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (color[start] != 0) continue;
    stack.push_back({start, 0});
    color[start] = 1;
    path.push_back(start);
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      bool advanced = false;
      while (next < n) {
        std::size_t v = next++;
        if (!R.strict_idx(u, v)) continue;
        if (color[v] == 1) {
          CycleWitness w;
          auto it = std::find(path.begin(), path.end(), v);
          for (; it != path.end(); ++it) w.cycle.push_back(R.space().at(*it));
          return {false, std::move(w)};
        }
        if (color[v] == 0) {
          stack.push_back({v, 0});
          color[v] = 1;
          path.push_back(v);
          advanced = true;
          break;
        }
      }
      if (!advanced) {
        color[u] = 2;
        stack.pop_back();
        path.pop_back();
      }
    }
  }
  return {true, std::nullopt};
}

// A preference whose strict part has been verified acyclic.
class JointPreference {
 public:
  static JointPreference create(PreferenceRelation R) {
    auto report = is_acyclic(R);
    if (!report.acyclic) {
      std::string msg = "strict part has a cycle:";
      for (const auto& x : report.witness->cycle)
        msg += " " + JointChoiceDataset::describe(R.dims(), x);
      throw Error(Errc::CyclicRelation, msg);
    }
    return JointPreference(std::move(R));
  }
  const PreferenceRelation& relation() const { return rel_; }

 private:
  explicit JointPreference(PreferenceRelation R) : rel_(std::move(R)) {}
  PreferenceRelation rel_;
};

namespace detail {

// Maximal elements without any acyclicity requirement (may be empty).
inline std::vector<Alternative> maximal_elements_unchecked(
    const Menu& A, const PreferenceRelation& R) {
  auto alts = A.alternatives();
  std::vector<Alternative> out;
  for (const auto& x : alts) {
    bool dominated = false;
    for (const auto& y : alts)
      if (R.strict(y, x)) { dominated = true; break; }
    if (!dominated) out.push_back(x);
  }
  normalize_image(out);
  return out;
}

}  // namespace detail

// Maximal elements of a menu; requires an acyclic strict part, which also
// guarantees the result is nonempty.
inline std::vector<Alternative> maximal_elements(const Menu& A,
                                                 const PreferenceRelation& R) {
  auto report = is_acyclic(R);
  if (!report.acyclic)
    throw Error(Errc::CyclicRelation, "strict part of the preference has a cycle");
  return detail::maximal_elements_unchecked(A, R);
}

inline std::vector<Alternative> maximal_elements(const Menu& A,
                                                 const JointPreference& R) {
  return detail::maximal_elements_unchecked(A, R.relation());
}

// The dataset generated by maximizing a preference on each menu.
inline JointChoiceDataset revealed_choice(const JointPreference& R,
                                          const std::vector<Menu>& menus) {
  std::vector<std::vector<Alternative>> choices;
  for (const auto& A : menus)
    choices.push_back(detail::maximal_elements_unchecked(A, R.relation()));
  return make_dataset(R.relation().dims(), menus, std::move(choices));
}

struct RevealedPreferenceReport {
  PreferenceRelation relation;
  bool acyclic = false;
  std::optional<CycleWitness> cycle;
};

// x is revealed over y when x is chosen from some menu offering y. The
// relation is returned even when cyclic, with the cycle attached.
inline RevealedPreferenceReport revealed_preference(const JointChoiceDataset& D) {
  PreferenceRelation R(D.dims());
  for (int i = 0; i < D.menu_count(); ++i)
    for (const auto& x : D.choice(i))
      for (const auto& y : D.menu(i).alternatives()) R.add(x, y);
  auto report = is_acyclic(R);
  return {std::move(R), report.acyclic, std::move(report.witness)};
}

struct RationalizabilityWitness {
  int menu = 0;
  std::vector<Alternative> max_set;
  std::vector<Alternative> choice;
};

inline bool replay(const JointChoiceDataset& D, const RationalizabilityWitness& w) {
  if (w.menu < 0 || w.menu >= D.menu_count()) return false;
  auto revealed = revealed_preference(D);
  auto max_set = detail::maximal_elements_unchecked(D.menu(w.menu), revealed.relation);
  return max_set == w.max_set && D.choice(w.menu) == w.choice &&
         max_set != w.choice;
}

struct RationalizabilityReport {
  bool holds = false;
  bool revealed_acyclic = false;
  std::optional<RationalizabilityWitness> witness;
};

// Rationalizable: every menu's choice equals the revealed-preference maximal
// set of its alternatives.
inline RationalizabilityReport is_rationalizable(const JointChoiceDataset& D) {
  auto revealed = revealed_preference(D);
  RationalizabilityReport report;
  report.revealed_acyclic = revealed.acyclic;
  for (int i = 0; i < D.menu_count(); ++i) {
    auto max_set = detail::maximal_elements_unchecked(D.menu(i), revealed.relation);
    if (max_set != D.choice(i)) {
      report.holds = false;
      report.witness = RationalizabilityWitness{i, std::move(max_set), D.choice(i)};
      return report;
    }
  }
  report.holds = true;
  return report;
}

namespace detail {

// Odometer over the product of universes restricted to S, canonical order.
inline std::vector<Alternative> all_partial_alternatives(const DimensionSet& dims,
                                                         DimSubset S) {
  std::vector<int> qs = S.members();
  std::vector<Alternative> out;
  Alternative x{S, std::vector<int>(qs.size(), 0)};
  while (true) {
    out.push_back(x);
    int i = static_cast<int>(qs.size());
    bool done = true;
    while (i > 0) {
      --i;
      if (++x.items[i] < dims.universe_size(qs[i])) { done = false; break; }
      x.items[i] = 0;
    }
    if (done) return out;
  }
}

// Joins two disjoint partial alternatives into one over the union scope.
inline Alternative combine(const Alternative& a, const Alternative& b) {
  DimSubset scope = a.scope | b.scope;
  Alternative x{scope, {}};
  for (int q : scope.members())
    x.items.push_back(a.scope.contains(q) ? a.item_at(q) : b.item_at(q));
  return x;
}

}  // namespace detail

struct PreferenceSeparabilityWitness {
  DimSubset S;
  Alternative x_S;      // scope S
  Alternative y_S;      // scope S
  Alternative u_holds;  // completion where x_S is weakly over y_S
  Alternative u_fails;  // completion where it is not
};

inline bool replay(const PreferenceRelation& R, const PreferenceSeparabilityWitness& w) {
  return R.holds(detail::combine(w.x_S, w.u_holds), detail::combine(w.y_S, w.u_holds)) &&
         !R.holds(detail::combine(w.x_S, w.u_fails), detail::combine(w.y_S, w.u_fails));
}

struct PreferenceSeparabilityReport {
  DimSubset S;
  bool holds = false;
  std::optional<PreferenceSeparabilityWitness> witness;
};

// A preference is S-separable when comparisons of alternatives differing
// only inside S do not depend on the common completion outside S.
inline PreferenceSeparabilityReport is_S_separable_preference(
    const PreferenceRelation& R, DimSubset S) {
  const DimensionSet& dims = R.dims();
  if (S.empty())
    throw Error(Errc::EmptySubset, "needs a nonempty dimension subset");
  if (!S.subset_of(dims.all()))
    throw Error(Errc::UnknownDimension, "subset mentions missing dimensions");
  PreferenceSeparabilityReport report;
  report.S = S;
  report.holds = true;
  if (S == dims.all()) return report;  // no completion to vary
  DimSubset comp = S.complement(dims.dims());
  auto parts = detail::all_partial_alternatives(dims, S);
  auto completions = detail::all_partial_alternatives(dims, comp);
  for (const auto& x_S : parts)
    for (const auto& y_S : parts) {
      if (x_S == y_S) continue;
      std::optional<Alternative> u_holds, u_fails;
      for (const auto& u : completions) {
        bool v = R.holds(detail::combine(x_S, u), detail::combine(y_S, u));
        if (v && !u_holds) u_holds = u;
        if (!v && !u_fails) u_fails = u;
        if (u_holds && u_fails) {
          report.holds = false;
          report.witness =
              PreferenceSeparabilityWitness{S, x_S, y_S, *u_holds, *u_fails};
          return report;
        }
      }
    }
  return report;
}

// The preference induced on S by an S-separable preference: compare S-parts
// under any common completion (the first canonical one, by well-definedness).
inline PreferenceRelation induced_preference(const PreferenceRelation& R, DimSubset S) {
  auto sep = is_S_separable_preference(R, S);
  if (!sep.holds)
    throw Error(Errc::NotSeparablePreference,
                "preference is not separable on the requested subset");
  const DimensionSet& dims = R.dims();
  PreferenceRelation out(dims.restrict(S));
  if (S == dims.all()) {
    for (const auto& [x, y] : R.pairs()) out.add(x, y);
    return out;
  }
  DimSubset comp = S.complement(dims.dims());
  auto parts = detail::all_partial_alternatives(dims, S);
  Alternative u0 = detail::all_partial_alternatives(dims, comp).front();
  DimSubset out_full = out.dims().all();
  for (const auto& x_S : parts)
    for (const auto& y_S : parts)
      if (R.holds(detail::combine(x_S, u0), detail::combine(y_S, u0)))
        out.add(Alternative{out_full, x_S.items}, Alternative{out_full, y_S.items});
  return out;
}

struct RichnessWitness {
  DimSubset S;
  int source_menu = 0;
  Alternative x;  // full scope, in the source menu
  Alternative y;  // full scope, same completion outside S
  Menu missing;   // required menu absent from the family
};

struct RichnessReport {
  DimSubset S;
  bool holds = false;
  std::optional<RichnessWitness> witness;
};

// S-richness of a menu family: whenever a menu offers two alternatives that
// differ only inside S, every menu pairing their S-parts item by item with an
// arbitrary completion outside S must also be present.
inline RichnessReport is_S_rich(const DimensionSet& dims,
                                const std::vector<Menu>& menus, DimSubset S) {
  if (S.empty())
    throw Error(Errc::EmptySubset, "needs a nonempty dimension subset");
  if (!S.subset_of(dims.all()))
    throw Error(Errc::UnknownDimension, "subset mentions missing dimensions");
  RichnessReport report;
  report.S = S;
  DimSubset comp = S.complement(dims.dims());
  auto contains_menu = [&menus](const Menu& A) {
    return std::find(menus.begin(), menus.end(), A) != menus.end();
  };
  auto completions = detail::all_partial_alternatives(dims, comp);
  for (std::size_t m = 0; m < menus.size(); ++m) {
    auto alts = menus[m].alternatives();
    for (std::size_t i = 0; i < alts.size(); ++i)
      for (std::size_t j = i + 1; j < alts.size(); ++j) {
        if (!comp.empty() && project_alternative(alts[i], comp) !=
                                 project_alternative(alts[j], comp))
          continue;
        // Distinct alternatives with equal completion differ inside S.
        Menu base{dims.all(), std::vector<std::uint64_t>(dims.dims(), 0)};
        for (int q : S.members())
          base.sets[q] = (std::uint64_t{1} << alts[i].item_at(q)) |
                         (std::uint64_t{1} << alts[j].item_at(q));
        for (const auto& v : completions) {
          Menu required = base;
          for (int q : comp.members())
            required.sets[q] = std::uint64_t{1} << v.item_at(q);
          if (!contains_menu(required)) {
            report.holds = false;
            report.witness = RichnessWitness{S, static_cast<int>(m), alts[i],
                                             alts[j], std::move(required)};
            return report;
          }
        }
      }
  }
  report.holds = true;
  return report;
}

inline RichnessReport is_S_rich(const JointChoiceDataset& D, DimSubset S) {
  return is_S_rich(D.dims(), D.menus(), S);
}

inline bool replay(const DimensionSet& dims, const std::vector<Menu>& menus,
                   const RichnessWitness& w) {
  if (w.source_menu < 0 || w.source_menu >= static_cast<int>(menus.size()))
    return false;
  const Menu& A = menus[w.source_menu];
  if (!A.contains(w.x) || !A.contains(w.y) || w.x == w.y) return false;
  DimSubset comp = w.S.complement(dims.dims());
  if (!comp.empty() &&
      project_alternative(w.x, comp) != project_alternative(w.y, comp))
    return false;
  for (int q : w.S.members()) {
    std::uint64_t want = (std::uint64_t{1} << w.x.item_at(q)) |
                         (std::uint64_t{1} << w.y.item_at(q));
    if (w.missing.set_at(q) != want) return false;
  }
  return std::find(menus.begin(), menus.end(), w.missing) == menus.end();
}

// ---------------------------------------------------------------------------
// Additively separable utilities

using Rational = boost::rational<long long>;

// A utility that sums branch values over a partition of the dimensions.
struct AdditiveUtility {
  std::vector<DimSubset> blocks;
  std::vector<std::map<std::vector<int>, Rational>> values;  // per block
};

inline void validate_utility(const DimensionSet& dims, const AdditiveUtility& U) {
  if (U.blocks.empty() || U.blocks.size() != U.values.size())
    throw Error(Errc::MalformedDocument, "blocks and value tables do not align");
  DimSubset seen;
  for (const auto& B : U.blocks) {
    if (B.empty()) throw Error(Errc::EmptySubset, "empty block");
    if (!B.subset_of(dims.all()))
      throw Error(Errc::UnknownDimension, "block mentions missing dimensions");
    if (!(seen & B).empty())
      throw Error(Errc::MalformedDocument, "blocks overlap");
    seen = seen | B;
  }
  if (seen != dims.all())
    throw Error(Errc::MalformedDocument, "blocks do not cover every dimension");
  for (std::size_t b = 0; b < U.blocks.size(); ++b) {
    for (const auto& [key, value] : U.values[b]) {
      auto qs = U.blocks[b].members();
      if (key.size() != qs.size())
        throw Error(Errc::MalformedDocument, "value key does not match its block");
      for (std::size_t i = 0; i < qs.size(); ++i)
        if (key[i] < 0 || key[i] >= dims.universe_size(qs[i]))
          throw Error(Errc::UnknownItem, "value key mentions a missing item");
    }
    for (const auto& t : detail::all_partial_alternatives(dims, U.blocks[b]))
      if (U.values[b].find(t.items) == U.values[b].end())
        throw Error(Errc::MissingBranchValue,
                    "no value for " + JointChoiceDataset::describe(dims, t) +
                        " in block " + std::to_string(b));
  }
}

inline AdditiveUtility make_additive_utility(
    const DimensionSet& dims, std::vector<DimSubset> blocks,
    std::vector<std::map<std::vector<int>, Rational>> values) {
  AdditiveUtility U{std::move(blocks), std::move(values)};
  validate_utility(dims, U);
  return U;
}

inline Rational additive_value(const AdditiveUtility& U, const Alternative& x) {
  Rational total(0);
  for (std::size_t b = 0; b < U.blocks.size(); ++b)
    total += U.values[b].at(project_alternative(x, U.blocks[b]).items);
  return total;
}

// The choice generated by global maximization of an additive utility; ties
// are kept, so the result can be multi-valued.
inline JointChoiceDataset additive_choice(const DimensionSet& dims,
                                          const AdditiveUtility& U,
                                          const std::vector<Menu>& menus) {
  validate_utility(dims, U);
  std::vector<std::vector<Alternative>> choices;
  for (const auto& A : menus) {
    std::vector<Alternative> best;
    Rational best_value(0);
    for (const auto& x : A.alternatives()) {
      Rational v = additive_value(U, x);
      if (best.empty() || v > best_value) {
        best.assign(1, x);
        best_value = v;
      } else if (v == best_value) {
        best.push_back(x);
      }
    }
    choices.push_back(std::move(best));
  }
  return make_dataset(dims, menus, std::move(choices));
}

// The preference represented by an additive utility (a total preorder).
inline PreferenceRelation utility_preference(const DimensionSet& dims,
                                             const AdditiveUtility& U) {
  validate_utility(dims, U);
  PreferenceRelation R(dims);
  auto all = detail::all_partial_alternatives(dims, dims.all());
  std::vector<Rational> value;
  value.reserve(all.size());
  for (const auto& x : all) value.push_back(additive_value(U, x));
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < all.size(); ++j)
      if (value[i] >= value[j]) R.add(all[i], all[j]);
  return R;
}

// ---------------------------------------------------------------------------
// Rationalizability via a selective family

enum class FamilyRationalizability { Rationalizable, NotRationalizable };

struct FamilyRationalizabilityReport {
  FamilyRationalizability verdict = FamilyRationalizability::NotRationalizable;
  std::vector<DimSubset> members;
  std::vector<RationalizabilityReport> member_reports;
  bool direct_verdict = false;     // direct decider on the input dataset
  bool diagnostic_mismatch = false;
};

// For single-valued separable data, rationalizability is equivalent to
// rationalizability of every induced choice along a selective family. The
// direct decider runs as a cross-check; a disagreement is surfaced in the
// report instead of being silently resolved.
inline FamilyRationalizabilityReport rationalizability_via_selective_family(
    const JointChoiceDataset& D, const SelectiveFamily& F) {
  if (F.n_dims != D.dims().dims())
    throw Error(Errc::FamilyNotSelective,
                "family is over " + std::to_string(F.n_dims) +
                    " dimensions, dataset has " +
                    std::to_string(D.dims().dims()));
  if (auto bad = D.first_multi_valued_menu())
    throw Error(Errc::NotSingleValued,
                "menu " + std::to_string(*bad) + " has a multi-valued choice");
  auto sep = is_separable(D);
  if (!sep.holds) {
    int q = 0;
    for (; q < D.dims().dims(); ++q)
      if (!sep.per_dimension[q].holds) break;
    throw Error(Errc::NotSeparable,
                "dimension '" + D.dims().dim_label(q) + "' is not separable");
  }
  FamilyRationalizabilityReport report;
  report.members = F.members;
  bool all_ok = true;
  for (const auto& S : F.members) {
    // Single-valued data separable on every dimension is separable on every
    // subset, so the induced choice exists.
    auto member = is_S_separable(D, S);
    report.member_reports.push_back(
        is_rationalizable(member.induced->to_dataset(D.dims())));
    if (!report.member_reports.back().holds) all_ok = false;
  }
  report.verdict = all_ok ? FamilyRationalizability::Rationalizable
                          : FamilyRationalizability::NotRationalizable;
  report.direct_verdict = is_rationalizable(D).holds;
  report.diagnostic_mismatch = report.direct_verdict != all_ok;
  return report;
}

}  // namespace jointchoice
