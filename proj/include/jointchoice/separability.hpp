#pragma once

// Separability of joint choices across dimension subsets.
//
// A dataset is S-separable when menus with equal S-projections have equal
// S-projected choice images; the induced choice on S is then well defined.
// The decider groups menus by projected menu and compares images inside each
// group, reporting the first violating menu pair in dataset order otherwise.
//
// Also here: menus betweenness (pairwise menu completion), its chained
// variant driven by a selective family, and the family-based sufficiency
// test for full separability.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "selective.hpp"

namespace jointchoice {

// Induced choice on a subset: one entry per projection class, in order of
// first appearance in the dataset.
struct InducedChoice {
  DimSubset S;
  std::vector<Menu> menus;                        // scope S
  std::vector<std::vector<Alternative>> choices;  // scope S, sorted
  std::vector<std::vector<int>> sources;          // source menu indices

  // Repackages the induced choice as a standalone dataset over the
  // restricted dimensions.
  JointChoiceDataset to_dataset(const DimensionSet& parent) const {
    DimensionSet dims = parent.restrict(S);
    DimSubset full = dims.all();
    std::vector<Menu> out_menus;
    std::vector<std::vector<Alternative>> out_choices;
    for (std::size_t i = 0; i < menus.size(); ++i) {
      out_menus.push_back(Menu{full, menus[i].sets});
      std::vector<Alternative> C;
      for (const auto& x : choices[i]) C.push_back(Alternative{full, x.items});
      out_choices.push_back(std::move(C));
    }
    return make_dataset(std::move(dims), std::move(out_menus), std::move(out_choices));
  }
};

struct SeparabilityWitness {
  DimSubset S;
  int menu_a = 0;
  int menu_b = 0;
  std::vector<Alternative> image_a;  // scope S
  std::vector<Alternative> image_b;  // scope S
};

// Re-derives the reported violation from the dataset.
inline bool replay(const JointChoiceDataset& D, const SeparabilityWitness& w) {
  if (w.menu_a < 0 || w.menu_b < 0 || w.menu_a >= D.menu_count() ||
      w.menu_b >= D.menu_count())
    return false;
  return project_menu(D.menu(w.menu_a), w.S) == project_menu(D.menu(w.menu_b), w.S) &&
         project_image(D.choice(w.menu_a), w.S) == w.image_a &&
         project_image(D.choice(w.menu_b), w.S) == w.image_b &&
         w.image_a != w.image_b;
}

struct SeparabilityReport {
  DimSubset S;
  bool holds = false;
  std::optional<InducedChoice> induced;        // present when holds
  std::optional<SeparabilityWitness> witness;  // present when not
};

inline SeparabilityReport is_S_separable(const JointChoiceDataset& D, DimSubset S) {
  auto classes = projected_menu_family(D, S);
  SeparabilityReport report;
  report.S = S;
  InducedChoice induced;
  induced.S = S;
  for (const auto& cls : classes) {
    int head = cls.source_menus.front();
    auto head_image = project_image(D.choice(head), S);
    for (std::size_t k = 1; k < cls.source_menus.size(); ++k) {
      int other = cls.source_menus[k];
      auto other_image = project_image(D.choice(other), S);
      if (other_image != head_image) {
        report.holds = false;
        report.witness = SeparabilityWitness{S, head, other, std::move(head_image),
                                             std::move(other_image)};
        report.induced.reset();
        return report;
      }
    }
    induced.menus.push_back(cls.projected);
    induced.choices.push_back(std::move(head_image));
    induced.sources.push_back(cls.source_menus);
  }
  report.holds = true;
  report.induced = std::move(induced);
  return report;
}

struct SingletonSeparabilityReport {
  bool holds = false;
  std::vector<SeparabilityReport> per_dimension;
};

// Separability taken as the conjunction of single-dimension separability.
inline SingletonSeparabilityReport is_separable(const JointChoiceDataset& D) {
  SingletonSeparabilityReport report;
  report.holds = true;
  for (int q = 0; q < D.dims().dims(); ++q) {
    report.per_dimension.push_back(is_S_separable(D, DimSubset::single(q)));
    if (!report.per_dimension.back().holds) report.holds = false;
  }
  return report;
}

// Checks every nonempty dimension subset directly.
inline bool is_separable_bruteforce(const JointChoiceDataset& D) {
  int n = D.dims().dims();
  if (n > 20)
    throw Error(Errc::TooManyDimensions,
                "exhaustive subset check is limited to 20 dimensions");
  for (std::uint32_t m = 1; m < (std::uint32_t{1} << n); ++m)
    if (!is_S_separable(D, DimSubset{m}).holds) return false;
  return true;
}

// Per-dimension component choices of a single-valued separable dataset:
// dimension q maps each distinct per-dimension item set to the item chosen
// from it. Reassembling the components reproduces the dataset.
struct ComponentChoice {
  int q = 0;
  std::vector<std::pair<std::uint64_t, int>> table;  // set mask -> chosen item
};

inline std::vector<ComponentChoice> decompose_components(const JointChoiceDataset& D) {
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
  std::vector<ComponentChoice> components;
  for (int q = 0; q < D.dims().dims(); ++q) {
    const auto& induced = *sep.per_dimension[q].induced;
    std::map<std::uint64_t, int> table;
    for (std::size_t i = 0; i < induced.menus.size(); ++i)
      table[induced.menus[i].sets[0]] = induced.choices[i][0].items[0];
    components.push_back({q, {table.begin(), table.end()}});
  }
  for (int i = 0; i < D.menu_count(); ++i) {
    Alternative rebuilt{D.dims().all(), {}};
    for (int q = 0; q < D.dims().dims(); ++q) {
      const auto& table = components[q].table;
      auto it = std::lower_bound(
          table.begin(), table.end(), D.menu(i).sets[q],
          [](const auto& entry, std::uint64_t key) { return entry.first < key; });
      rebuilt.items.push_back(it->second);
    }
    if (!(D.choice(i).size() == 1 && D.choice(i)[0] == rebuilt))
      throw Error(Errc::ReconstructionMismatch,
                  "components do not reassemble menu " + std::to_string(i));
  }
  return components;
}

// Menus betweenness for subsets S and T: every pair of menus agreeing on
// S ∩ T admits a third menu matching one of them on S and the other on T,
// in either orientation. An empty intersection makes the hypothesis hold
// for all pairs, which is flagged rather than silently accepted.
struct BetweennessWitness {
  DimSubset S;
  DimSubset T;
  int menu_a = 0;
  int menu_b = 0;
};

inline bool replay(const JointChoiceDataset& D, const BetweennessWitness& w) {
  if (w.menu_a < 0 || w.menu_b < 0 || w.menu_a >= D.menu_count() ||
      w.menu_b >= D.menu_count())
    return false;
  DimSubset meet = w.S & w.T;
  if (!meet.empty() &&
      project_menu(D.menu(w.menu_a), meet) != project_menu(D.menu(w.menu_b), meet))
    return false;
  for (int k = 0; k < D.menu_count(); ++k) {
    const Menu& E = D.menu(k);
    if (project_menu(E, w.S) == project_menu(D.menu(w.menu_a), w.S) &&
        project_menu(E, w.T) == project_menu(D.menu(w.menu_b), w.T))
      return false;
    if (project_menu(E, w.S) == project_menu(D.menu(w.menu_b), w.S) &&
        project_menu(E, w.T) == project_menu(D.menu(w.menu_a), w.T))
      return false;
  }
  return true;
}

struct BetweennessReport {
  DimSubset S;
  DimSubset T;
  bool holds = false;
  bool vacuous_intersection = false;  // S ∩ T empty: hypothesis never binds
  std::optional<BetweennessWitness> witness;
};

inline BetweennessReport check_menus_betweenness(const JointChoiceDataset& D,
                                                 DimSubset S, DimSubset T) {
  if (S.empty() && T.empty())
    throw Error(Errc::EmptySubset, "both subsets are empty");
  const DimSubset all = D.dims().all();
  if (!S.subset_of(all) || !T.subset_of(all))
    throw Error(Errc::UnknownDimension, "subset mentions missing dimensions");
  BetweennessReport report;
  report.S = S;
  report.T = T;
  DimSubset meet = S & T;
  report.vacuous_intersection = meet.empty();
  for (int i = 0; i < D.menu_count(); ++i)
    for (int j = i + 1; j < D.menu_count(); ++j) {
      if (!meet.empty() &&
          project_menu(D.menu(i), meet) != project_menu(D.menu(j), meet))
        continue;
      bool found = false;
      for (int k = 0; k < D.menu_count() && !found; ++k) {
        const Menu& E = D.menu(k);
        found = (project_menu(E, S) == project_menu(D.menu(i), S) &&
                 project_menu(E, T) == project_menu(D.menu(j), T)) ||
                (project_menu(E, S) == project_menu(D.menu(j), S) &&
                 project_menu(E, T) == project_menu(D.menu(i), T));
      }
      if (!found) {
        report.holds = false;
        report.witness = BetweennessWitness{S, T, i, j};
        return report;
      }
    }
  report.holds = true;
  return report;
}

// Chained betweenness for a selective family: for each dimension q, some
// ordering of the members containing q passes menus betweenness along the
// chain of running intersections. The per-dimension search is capped at
// families of eight members (8! orderings); beyond that the check reports
// an inconclusive outcome instead of a verdict.
enum class SBetweennessStatus { Holds, Fails, Inconclusive };

inline constexpr int kMaxLabellingMembers = 8;

struct SBetweennessReport {
  SBetweennessStatus status = SBetweennessStatus::Inconclusive;
  std::vector<std::vector<int>> labellings;  // per dimension, member positions
  std::optional<int> failed_q;               // set when status == Fails
  std::optional<int> exceeded_q;             // set when the search was capped
  std::optional<BetweennessWitness> sample_failure;
};

inline SBetweennessReport check_S_betweenness(const JointChoiceDataset& D,
                                              const SelectiveFamily& F) {
  if (F.n_dims != D.dims().dims())
    throw Error(Errc::FamilyNotSelective,
                "family is over " + std::to_string(F.n_dims) +
                    " dimensions, dataset has " +
                    std::to_string(D.dims().dims()));
  SBetweennessReport report;
  for (int q = 0; q < F.n_dims; ++q) {
    const auto& index = index_sets(F, q);
    if (index.size() <= 1) {
      report.labellings.push_back(index);
      continue;
    }
    if (static_cast<int>(index.size()) > kMaxLabellingMembers) {
      report.status = SBetweennessStatus::Inconclusive;
      report.exceeded_q = q;
      return report;
    }
    std::vector<int> perm = index;  // ascending: lexicographically first
    bool found = false;
    bool first_perm = true;
    std::optional<BetweennessWitness> first_perm_failure;
    do {
      bool ok = true;
      DimSubset running = F.members[perm[0]];
      for (std::size_t t = 1; t < perm.size() && ok; ++t) {
        auto step = check_menus_betweenness(D, running, F.members[perm[t]]);
        if (!step.holds) {
          ok = false;
          if (first_perm) first_perm_failure = step.witness;
        }
        running = running & F.members[perm[t]];
      }
      first_perm = false;
      if (ok) {
        report.labellings.push_back(perm);
        found = true;
        break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (!found) {
      report.status = SBetweennessStatus::Fails;
      report.failed_q = q;
      report.sample_failure = std::move(first_perm_failure);
      return report;
    }
  }
  report.status = SBetweennessStatus::Holds;
  return report;
}

// Sufficiency test: member separability plus chained betweenness certify
// full separability. Any failed ingredient yields an inconclusive verdict,
// never a refutation.
enum class FamilyVerdict { Separable, Inconclusive };

struct FamilySeparabilityReport {
  FamilyVerdict verdict = FamilyVerdict::Inconclusive;
  std::vector<SeparabilityReport> member_reports;
  std::optional<SBetweennessReport> betweenness;
  std::string reason;  // set when inconclusive
};

inline FamilySeparabilityReport separability_via_selective_family(
    const JointChoiceDataset& D, const SelectiveFamily& F) {
  if (F.n_dims != D.dims().dims())
    throw Error(Errc::FamilyNotSelective,
                "family is over " + std::to_string(F.n_dims) +
                    " dimensions, dataset has " +
                    std::to_string(D.dims().dims()));
  FamilySeparabilityReport report;
  bool members_ok = true;
  for (const auto& S : F.members) {
    report.member_reports.push_back(is_S_separable(D, S));
    if (!report.member_reports.back().holds) members_ok = false;
  }
  if (!members_ok) {
    report.verdict = FamilyVerdict::Inconclusive;
    report.reason = "a family member is not separable; the sufficiency test does not apply";
    return report;
  }
  report.betweenness = check_S_betweenness(D, F);
  switch (report.betweenness->status) {
    case SBetweennessStatus::Holds:
      report.verdict = FamilyVerdict::Separable;
      break;
    case SBetweennessStatus::Fails:
      report.verdict = FamilyVerdict::Inconclusive;
      report.reason = "chained menus betweenness fails for dimension '" +
                      D.dims().dim_label(*report.betweenness->failed_q) +
                      "'; the sufficiency test does not apply";
      break;
    case SBetweennessStatus::Inconclusive:
      report.verdict = FamilyVerdict::Inconclusive;
      report.reason = "labelling search exceeded the cap for dimension '" +
                      D.dims().dim_label(*report.betweenness->exceeded_q) + "'";
      break;
  }
  return report;
}

}  // namespace jointchoice
