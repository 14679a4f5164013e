#pragma once

// Core model for joint choice data: a set of named dimensions, a finite item
// universe per dimension, menus assembled from nonempty item sets, and a
// choice correspondence mapping each menu to a nonempty subset of its product.
//
// Conventions used throughout the library:
//   - dimensions and items are dense integer ids; labels live in DimensionSet
//   - dimension subsets are 32-bit masks (at most 30 dimensions)
//   - per-dimension item sets are 64-bit masks (at most 64 items per universe)
//   - alternatives and menus are ordered by ascending dimension id, and
//     alternative sets are kept sorted lexicographically by item ids

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace jointchoice {

inline constexpr int kMaxDimensions = 30;
inline constexpr int kMaxUniverseSize = 64;

enum class Errc {
  EmptyMenuSet,
  ChoiceOutsideMenu,
  EmptyChoice,
  DuplicateMenu,
  UnknownItem,
  UnknownDimension,
  UnknownKey,
  MalformedDocument,
  ScopeError,
  EmptySubset,
  TooManyDimensions,
  UniverseTooLarge,
  NotSingleValued,
  NotSeparable,
  ReconstructionMismatch,
  FamilyNotSelective,
  LabellingSearchExceeded,
  DuplicateMember,
  EmptyMember,
  InternalSelectivityFailure,
  CyclicRelation,
  NotSeparablePreference,
  MissingBranchValue,
  InvalidOrder,
  InvalidFilter,
  UsageError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::EmptyMenuSet: return "EmptyMenuSet";
    case Errc::ChoiceOutsideMenu: return "ChoiceOutsideMenu";
    case Errc::EmptyChoice: return "EmptyChoice";
    case Errc::DuplicateMenu: return "DuplicateMenu";
    case Errc::UnknownItem: return "UnknownItem";
    case Errc::UnknownDimension: return "UnknownDimension";
    case Errc::UnknownKey: return "UnknownKey";
    case Errc::MalformedDocument: return "MalformedDocument";
    case Errc::ScopeError: return "ScopeError";
    case Errc::EmptySubset: return "EmptySubset";
    case Errc::TooManyDimensions: return "TooManyDimensions";
    case Errc::UniverseTooLarge: return "UniverseTooLarge";
    case Errc::NotSingleValued: return "NotSingleValued";
    case Errc::NotSeparable: return "NotSeparable";
    case Errc::ReconstructionMismatch: return "ReconstructionMismatch";
    case Errc::FamilyNotSelective: return "FamilyNotSelective";
    case Errc::LabellingSearchExceeded: return "LabellingSearchExceeded";
    case Errc::DuplicateMember: return "DuplicateMember";
    case Errc::EmptyMember: return "EmptyMember";
    case Errc::InternalSelectivityFailure: return "InternalSelectivityFailure";
    case Errc::CyclicRelation: return "CyclicRelation";
    case Errc::NotSeparablePreference: return "NotSeparablePreference";
    case Errc::MissingBranchValue: return "MissingBranchValue";
    case Errc::InvalidOrder: return "InvalidOrder";
    case Errc::InvalidFilter: return "InvalidFilter";
    case Errc::UsageError: return "UsageError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// A subset of dimension ids as a bitmask.
struct DimSubset {
  std::uint32_t mask = 0;

  static DimSubset none() { return {0}; }
  static DimSubset single(int q) { return {std::uint32_t{1} << q}; }
  static DimSubset full(int n) {
    return {n == 0 ? 0u : (std::uint32_t{1} << n) - 1u};
  }
  static DimSubset of(std::initializer_list<int> qs) {
    DimSubset s;
    for (int q : qs) s.mask |= std::uint32_t{1} << q;
    return s;
  }

  bool empty() const { return mask == 0; }
  int count() const { return std::popcount(mask); }
  bool contains(int q) const { return (mask >> q) & 1u; }
  bool subset_of(DimSubset other) const { return (mask & ~other.mask) == 0; }
  DimSubset operator|(DimSubset o) const { return {mask | o.mask}; }
  DimSubset operator&(DimSubset o) const { return {mask & o.mask}; }
  DimSubset complement(int n) const { return {full(n).mask & ~mask}; }

  std::vector<int> members() const {
    std::vector<int> out;
    for (std::uint32_t m = mask; m != 0; m &= m - 1)
      out.push_back(std::countr_zero(m));
    return out;
  }

  auto operator<=>(const DimSubset&) const = default;
};

// Named dimensions with a finite labelled universe per dimension. Immutable
// once created; create() rejects duplicates, empties, and size overruns.
class DimensionSet {
 public:
  static DimensionSet create(std::vector<std::string> dim_labels,
                             std::vector<std::vector<std::string>> universes) {
    if (dim_labels.empty())
      throw Error(Errc::MalformedDocument, "no dimensions declared");
    if (static_cast<int>(dim_labels.size()) > kMaxDimensions)
      throw Error(Errc::TooManyDimensions,
                  "at most " + std::to_string(kMaxDimensions) +
                      " dimensions are supported, got " +
                      std::to_string(dim_labels.size()));
    if (universes.size() != dim_labels.size())
      throw Error(Errc::MalformedDocument,
                  "universe list does not match dimension list");
    DimensionSet d;
    d.dim_labels_ = std::move(dim_labels);
    d.universes_ = std::move(universes);
    for (std::size_t q = 0; q < d.dim_labels_.size(); ++q) {
      const std::string& label = d.dim_labels_[q];
      if (label.empty())
        throw Error(Errc::MalformedDocument, "empty dimension label");
      if (!d.dim_index_.emplace(label, static_cast<int>(q)).second)
        throw Error(Errc::MalformedDocument,
                    "duplicate dimension label '" + label + "'");
      const auto& uni = d.universes_[q];
      if (uni.empty())
        throw Error(Errc::MalformedDocument,
                    "empty universe for dimension '" + label + "'");
      if (static_cast<int>(uni.size()) > kMaxUniverseSize)
        throw Error(Errc::UniverseTooLarge,
                    "universe for dimension '" + label + "' exceeds " +
                        std::to_string(kMaxUniverseSize) + " items");
      auto& idx = d.item_index_.emplace_back();
      for (std::size_t i = 0; i < uni.size(); ++i) {
        if (uni[i].empty())
          throw Error(Errc::MalformedDocument,
                      "empty item label in dimension '" + label + "'");
        if (!idx.emplace(uni[i], static_cast<int>(i)).second)
          throw Error(Errc::MalformedDocument,
                      "duplicate item '" + uni[i] + "' in dimension '" +
                          label + "'");
      }
    }
    return d;
  }

  int dims() const { return static_cast<int>(dim_labels_.size()); }
  DimSubset all() const { return DimSubset::full(dims()); }
  int universe_size(int q) const {
    return static_cast<int>(universes_[q].size());
  }
  std::uint64_t universe_mask(int q) const {
    int n = universe_size(q);
    return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  }
  const std::string& dim_label(int q) const { return dim_labels_[q]; }
  const std::string& item_label(int q, int item) const {
    return universes_[q][item];
  }
  const std::vector<std::string>& universe(int q) const {
    return universes_[q];
  }

  std::optional<int> dim_id(const std::string& label) const {
    auto it = dim_index_.find(label);
    if (it == dim_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<int> item_id(int q, const std::string& label) const {
    auto it = item_index_[q].find(label);
    if (it == item_index_[q].end()) return std::nullopt;
    return it->second;
  }

  // The dimension set induced by restricting to S, keeping dimension order.
  DimensionSet restrict(DimSubset S) const {
    if (S.empty()) throw Error(Errc::EmptySubset, "cannot restrict to no dimensions");
    if (!S.subset_of(all()))
      throw Error(Errc::UnknownDimension, "subset mentions missing dimensions");
    std::vector<std::string> labels;
    std::vector<std::vector<std::string>> unis;
    for (int q : S.members()) {
      labels.push_back(dim_labels_[q]);
      unis.push_back(universes_[q]);
    }
    return create(std::move(labels), std::move(unis));
  }

  bool operator==(const DimensionSet& other) const {
    return dim_labels_ == other.dim_labels_ && universes_ == other.universes_;
  }

 private:
  DimensionSet() = default;
  std::vector<std::string> dim_labels_;
  std::vector<std::vector<std::string>> universes_;
  std::unordered_map<std::string, int> dim_index_;
  std::vector<std::unordered_map<std::string, int>> item_index_;
};

// One alternative over a scope: item ids aligned with scope.members().
struct Alternative {
  DimSubset scope;
  std::vector<int> items;

  int item_at(int q) const {
    int pos = std::popcount(scope.mask & ((std::uint32_t{1} << q) - 1));
    return items[pos];
  }

  auto operator<=>(const Alternative&) const = default;
};

// One menu over a scope: a nonempty item set per scope dimension, each stored
// as a bitmask aligned with scope.members().
struct Menu {
  DimSubset scope;
  std::vector<std::uint64_t> sets;

  bool contains(const Alternative& x) const {
    if (x.scope != scope || x.items.size() != sets.size()) return false;
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (!((sets[i] >> x.items[i]) & 1u)) return false;
    return true;
  }

  std::uint64_t set_at(int q) const {
    int pos = std::popcount(scope.mask & ((std::uint32_t{1} << q) - 1));
    return sets[pos];
  }

  static std::vector<int> items_of(std::uint64_t set) {
    std::vector<int> out;
    for (std::uint64_t m = set; m != 0; m &= m - 1)
      out.push_back(std::countr_zero(m));
    return out;
  }

  std::uint64_t product_size() const {
    std::uint64_t n = 1;
    for (auto s : sets) n *= static_cast<std::uint64_t>(std::popcount(s));
    return n;
  }

  // All alternatives of the menu in canonical order: lexicographic by item
  // ids along ascending dimensions.
  std::vector<Alternative> alternatives() const {
    std::vector<std::vector<int>> axes;
    axes.reserve(sets.size());
    for (auto s : sets) axes.push_back(items_of(s));
    std::vector<Alternative> out;
    std::vector<std::size_t> pick(axes.size(), 0);
    while (true) {
      Alternative x{scope, {}};
      x.items.reserve(axes.size());
      for (std::size_t i = 0; i < axes.size(); ++i)
        x.items.push_back(axes[i][pick[i]]);
      out.push_back(std::move(x));
      std::size_t i = axes.size();
      while (i > 0) {
        --i;
        if (++pick[i] < axes[i].size()) break;
        pick[i] = 0;
        if (i == 0) return out;
      }
      if (axes.empty()) return out;
    }
  }

  auto operator<=>(const Menu&) const = default;
};

inline Alternative project_alternative(const Alternative& x, DimSubset S) {
  if (!S.subset_of(x.scope))
    throw Error(Errc::ScopeError, "projection target is not within the alternative's scope");
  Alternative out{S, {}};
  auto qs = x.scope.members();
  for (std::size_t i = 0; i < qs.size(); ++i)
    if (S.contains(qs[i])) out.items.push_back(x.items[i]);
  return out;
}

inline Menu project_menu(const Menu& A, DimSubset S) {
  if (!S.subset_of(A.scope))
    throw Error(Errc::ScopeError, "projection target is not within the menu's scope");
  Menu out{S, {}};
  auto qs = A.scope.members();
  for (std::size_t i = 0; i < qs.size(); ++i)
    if (S.contains(qs[i])) out.sets.push_back(A.sets[i]);
  return out;
}

// Sorted, de-duplicated image of an alternative set under projection.
inline std::vector<Alternative> project_image(const std::vector<Alternative>& image,
                                              DimSubset S) {
  std::vector<Alternative> out;
  out.reserve(image.size());
  for (const auto& x : image) out.push_back(project_alternative(x, S));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline void normalize_image(std::vector<Alternative>& image) {
  std::sort(image.begin(), image.end());
  image.erase(std::unique(image.begin(), image.end()), image.end());
}

struct ValidationIssue {
  Errc code;
  std::string where;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool valid() const { return issues.empty(); }
};

// A validated joint choice dataset. Menus keep input order; choices are kept
// in canonical sorted order. Instances are immutable after creation.
class JointChoiceDataset {
 public:
  static std::optional<JointChoiceDataset> create(
      DimensionSet dims, std::vector<Menu> menus,
      std::vector<std::vector<Alternative>> choices,
      ValidationReport& report) {
    report.issues.clear();
    const DimSubset full = dims.all();
    if (menus.size() != choices.size()) {
      report.issues.push_back({Errc::MalformedDocument, "/menus",
                               "menu and choice counts differ"});
      return std::nullopt;
    }
    for (std::size_t i = 0; i < menus.size(); ++i) {
      const std::string where = "/menus/" + std::to_string(i);
      Menu& A = menus[i];
      if (A.scope != full || A.sets.size() != static_cast<std::size_t>(dims.dims())) {
        report.issues.push_back({Errc::ScopeError, where,
                                 "menu does not cover every dimension"});
        continue;
      }
      bool menu_ok = true;
      for (int q = 0; q < dims.dims(); ++q) {
        if (A.sets[q] == 0) {
          report.issues.push_back(
              {Errc::EmptyMenuSet, where,
               "empty item set for dimension '" + dims.dim_label(q) + "'"});
          menu_ok = false;
        } else if ((A.sets[q] & ~dims.universe_mask(q)) != 0) {
          report.issues.push_back(
              {Errc::UnknownItem, where,
               "item set for dimension '" + dims.dim_label(q) +
                   "' mentions items outside the universe"});
          menu_ok = false;
        }
      }
      auto& C = choices[i];
      if (C.empty()) {
        report.issues.push_back({Errc::EmptyChoice, where, "empty choice set"});
        continue;
      }
      normalize_image(C);
      for (const auto& x : C) {
        if (x.scope != full || x.items.size() != static_cast<std::size_t>(dims.dims())) {
          report.issues.push_back({Errc::ScopeError, where,
                                   "chosen alternative does not cover every dimension"});
        } else if (menu_ok && !A.contains(x)) {
          report.issues.push_back(
              {Errc::ChoiceOutsideMenu, where,
               "chosen alternative " + describe(dims, x) +
                   " is not available in the menu"});
        }
      }
    }
    for (std::size_t i = 0; i < menus.size(); ++i)
      for (std::size_t j = i + 1; j < menus.size(); ++j)
        if (menus[i] == menus[j])
          report.issues.push_back(
              {Errc::DuplicateMenu, "/menus/" + std::to_string(j),
               "duplicates menu " + std::to_string(i)});
    if (!report.valid()) return std::nullopt;
    return JointChoiceDataset(std::move(dims), std::move(menus), std::move(choices));
  }

  const DimensionSet& dims() const { return dims_; }
  int menu_count() const { return static_cast<int>(menus_.size()); }
  const Menu& menu(int i) const { return menus_[i]; }
  const std::vector<Menu>& menus() const { return menus_; }
  const std::vector<Alternative>& choice(int i) const { return choices_[i]; }

  bool single_valued() const {
    for (const auto& c : choices_)
      if (c.size() != 1) return false;
    return true;
  }

  std::optional<int> first_multi_valued_menu() const {
    for (std::size_t i = 0; i < choices_.size(); ++i)
      if (choices_[i].size() != 1) return static_cast<int>(i);
    return std::nullopt;
  }

  // Whether every menu over the universes appears. Distinct menus are already
  // guaranteed, so it suffices to compare counts (with early exit to avoid
  // overflow on large universes).
  bool complete_domain() const {
    std::uint64_t total = 1;
    const std::uint64_t have = menus_.size();
    for (int q = 0; q < dims_.dims(); ++q) {
      int n = dims_.universe_size(q);
      std::uint64_t per_dim =
          n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
      if (per_dim > have) return false;
      total *= per_dim;
      if (total > have) return false;
    }
    return total == have;
  }

  std::optional<int> find_menu(const Menu& A) const {
    for (std::size_t i = 0; i < menus_.size(); ++i)
      if (menus_[i] == A) return static_cast<int>(i);
    return std::nullopt;
  }

  static std::string describe(const DimensionSet& dims, const Alternative& x) {
    std::string out = "(";
    auto qs = x.scope.members();
    for (std::size_t i = 0; i < qs.size(); ++i) {
      if (i) out += ",";
      out += dims.item_label(qs[i], x.items[i]);
    }
    return out + ")";
  }

  static std::string describe(const DimensionSet& dims, const Menu& A) {
    std::string out = "(";
    auto qs = A.scope.members();
    for (std::size_t i = 0; i < qs.size(); ++i) {
      if (i) out += ",";
      out += "{";
      auto items = Menu::items_of(A.sets[i]);
      for (std::size_t j = 0; j < items.size(); ++j) {
        if (j) out += ",";
        out += dims.item_label(qs[i], items[j]);
      }
      out += "}";
    }
    return out + ")";
  }

 private:
  JointChoiceDataset(DimensionSet dims, std::vector<Menu> menus,
                     std::vector<std::vector<Alternative>> choices)
      : dims_(std::move(dims)),
        menus_(std::move(menus)),
        choices_(std::move(choices)) {}
  DimensionSet dims_;
  std::vector<Menu> menus_;
  std::vector<std::vector<Alternative>> choices_;
};

// Convenience creator that throws on the first validation issue.
inline JointChoiceDataset make_dataset(DimensionSet dims, std::vector<Menu> menus,
                                       std::vector<std::vector<Alternative>> choices) {
  ValidationReport report;
  auto d = JointChoiceDataset::create(std::move(dims), std::move(menus),
                                      std::move(choices), report);
  if (!d) {
    const auto& issue = report.issues.front();
    throw Error(issue.code, issue.where + ": " + issue.detail);
  }
  return std::move(*d);
}

// Menus grouped by their projection onto a subset, remembering which source
// menus fall into each class. Classes appear in order of first source menu.
struct ProjectedMenuClass {
  Menu projected;
  std::vector<int> source_menus;
};

struct MenuHash {
  std::size_t operator()(const Menu& A) const {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](std::uint64_t v) {
      for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 1099511628211ull;
      }
    };
    mix(A.scope.mask);
    for (auto s : A.sets) mix(s);
    return static_cast<std::size_t>(h);
  }
};

inline std::vector<ProjectedMenuClass> projected_menu_family(
    const JointChoiceDataset& D, DimSubset S) {
  if (S.empty())
    throw Error(Errc::EmptySubset, "projection needs a nonempty dimension subset");
  if (!S.subset_of(D.dims().all()))
    throw Error(Errc::UnknownDimension, "subset mentions missing dimensions");
  std::vector<ProjectedMenuClass> classes;
  std::unordered_map<Menu, std::size_t, MenuHash> where;
  for (int i = 0; i < D.menu_count(); ++i) {
    Menu p = project_menu(D.menu(i), S);
    auto [it, fresh] = where.emplace(p, classes.size());
    if (fresh) classes.push_back({std::move(p), {i}});
    else classes[it->second].source_menus.push_back(i);
  }
  return classes;
}

}  // namespace jointchoice
