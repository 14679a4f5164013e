#pragma once

// JSON document layer: parsing and serialization for datasets, menu files,
// and dimension-subset families, plus small helpers shared by the CLI.
//
// Documents use labels throughout; ids exist only inside the core model.
// Structural problems (wrong types, missing or unknown keys) throw Error;
// semantic problems in a dataset (empty choice, choice outside the menu, ...)
// are collected into a ValidationReport so callers can list all of them.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"

namespace jointchoice {

using Json = nlohmann::ordered_json;

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fnv1a64_hex(const std::string& bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out = "fnv1a64:";
  for (int i = 15; i >= 0; --i) out += digits[(h >> (4 * i)) & 0xf];
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Errc::MalformedDocument, "cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace detail {

inline void expect_object(const Json& j, const std::string& where) {
  if (!j.is_object())
    throw Error(Errc::MalformedDocument, where + ": expected an object");
}

inline void expect_array(const Json& j, const std::string& where) {
  if (!j.is_array())
    throw Error(Errc::MalformedDocument, where + ": expected an array");
}

inline std::string expect_string(const Json& j, const std::string& where) {
  if (!j.is_string())
    throw Error(Errc::MalformedDocument, where + ": expected a string");
  return j.get<std::string>();
}

inline const Json& require_key(const Json& j, const std::string& key,
                               const std::string& where) {
  auto it = j.find(key);
  if (it == j.end())
    throw Error(Errc::MalformedDocument, where + ": missing key '" + key + "'");
  return *it;
}

inline void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) { ok = true; break; }
    if (!ok)
      throw Error(Errc::UnknownKey, where + ": unknown key '" + it.key() + "'");
  }
}

inline std::vector<std::string> string_list(const Json& j, const std::string& where) {
  expect_array(j, where);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(expect_string(j[i], where + "/" + std::to_string(i)));
  return out;
}

}  // namespace detail

// Parses the shared header of dataset and menu documents: "dimensions" plus
// "universes" keyed exactly by the dimension labels, in any order.
inline DimensionSet parse_dimensions(const Json& doc) {
  detail::expect_object(doc, "");
  auto labels = detail::string_list(detail::require_key(doc, "dimensions", ""),
                                    "/dimensions");
  const Json& unis = detail::require_key(doc, "universes", "");
  detail::expect_object(unis, "/universes");
  if (unis.size() != labels.size())
    throw Error(Errc::MalformedDocument,
                "/universes: must list exactly the declared dimensions");
  std::vector<std::vector<std::string>> universes;
  for (const auto& label : labels) {
    auto it = unis.find(label);
    if (it == unis.end())
      throw Error(Errc::UnknownDimension,
                  "/universes: missing dimension '" + label + "'");
    universes.push_back(detail::string_list(*it, "/universes/" + label));
  }
  return DimensionSet::create(std::move(labels), std::move(universes));
}

namespace detail {

// Resolves one menu's "sets" object; label problems go into the report.
inline std::optional<Menu> parse_menu_sets(const DimensionSet& dims, const Json& sets,
                                           const std::string& where,
                                           ValidationReport& report) {
  expect_object(sets, where);
  if (sets.size() != static_cast<std::size_t>(dims.dims()))
    throw Error(Errc::MalformedDocument,
                where + ": must list exactly the declared dimensions");
  Menu A{dims.all(), std::vector<std::uint64_t>(dims.dims(), 0)};
  bool ok = true;
  for (auto it = sets.begin(); it != sets.end(); ++it) {
    auto q = dims.dim_id(it.key());
    if (!q) {
      report.issues.push_back({Errc::UnknownDimension, where,
                               "unknown dimension '" + it.key() + "'"});
      ok = false;
      continue;
    }
    for (const auto& label : string_list(*it, where + "/" + it.key())) {
      auto item = dims.item_id(*q, label);
      if (!item) {
        report.issues.push_back(
            {Errc::UnknownItem, where,
             "unknown item '" + label + "' in dimension '" + it.key() + "'"});
        ok = false;
      } else {
        A.sets[*q] |= std::uint64_t{1} << *item;
      }
    }
  }
  if (!ok) return std::nullopt;
  return A;
}

inline std::optional<Alternative> parse_alternative(const DimensionSet& dims,
                                                    const Json& tuple,
                                                    const std::string& where,
                                                    ValidationReport& report) {
  auto labels = string_list(tuple, where);
  if (labels.size() != static_cast<std::size_t>(dims.dims()))
    throw Error(Errc::MalformedDocument,
                where + ": expected one item per dimension");
  Alternative x{dims.all(), {}};
  for (int q = 0; q < dims.dims(); ++q) {
    auto item = dims.item_id(q, labels[q]);
    if (!item) {
      report.issues.push_back(
          {Errc::UnknownItem, where,
           "unknown item '" + labels[q] + "' in dimension '" +
               dims.dim_label(q) + "'"});
      return std::nullopt;
    }
    x.items.push_back(*item);
  }
  return x;
}

}  // namespace detail

struct ParsedDataset {
  std::optional<JointChoiceDataset> dataset;
  ValidationReport report;
  Json provenance;  // null unless the document carried one
};

inline ParsedDataset parse_dataset(const Json& doc) {
  ParsedDataset out;
  detail::reject_unknown_keys(doc, {"dimensions", "universes", "menus", "provenance"}, "");
  DimensionSet dims = parse_dimensions(doc);
  const Json& menus_j = detail::require_key(doc, "menus", "");
  detail::expect_array(menus_j, "/menus");
  if (auto it = doc.find("provenance"); it != doc.end()) out.provenance = *it;

  std::vector<Menu> menus;
  std::vector<std::vector<Alternative>> choices;
  bool resolved = true;
  for (std::size_t i = 0; i < menus_j.size(); ++i) {
    const std::string where = "/menus/" + std::to_string(i);
    const Json& entry = menus_j[i];
    detail::expect_object(entry, where);
    detail::reject_unknown_keys(entry, {"sets", "choice"}, where);
    auto A = detail::parse_menu_sets(dims, detail::require_key(entry, "sets", where),
                                     where + "/sets", out.report);
    const Json& choice_j = detail::require_key(entry, "choice", where);
    detail::expect_array(choice_j, where + "/choice");
    std::vector<Alternative> C;
    for (std::size_t k = 0; k < choice_j.size(); ++k) {
      auto x = detail::parse_alternative(dims, choice_j[k],
                                         where + "/choice/" + std::to_string(k),
                                         out.report);
      if (x) C.push_back(std::move(*x));
      else resolved = false;
    }
    if (A) {
      menus.push_back(std::move(*A));
      choices.push_back(std::move(C));
    } else {
      resolved = false;
    }
  }
  if (!resolved) return out;  // label issues already reported
  out.dataset = JointChoiceDataset::create(std::move(dims), std::move(menus),
                                           std::move(choices), out.report);
  return out;
}

// Menu-family documents share the dataset layout but omit (or ignore) the
// per-menu "choice" key. Scope and emptiness problems throw here since there
// is no validate verb for menu files.
struct ParsedMenus {
  DimensionSet dims;
  std::vector<Menu> menus;
};

inline ParsedMenus parse_menu_file(const Json& doc) {
  detail::reject_unknown_keys(doc, {"dimensions", "universes", "menus"}, "");
  DimensionSet dims = parse_dimensions(doc);
  const Json& menus_j = detail::require_key(doc, "menus", "");
  detail::expect_array(menus_j, "/menus");
  ValidationReport report;
  std::vector<Menu> menus;
  for (std::size_t i = 0; i < menus_j.size(); ++i) {
    const std::string where = "/menus/" + std::to_string(i);
    const Json& entry = menus_j[i];
    detail::expect_object(entry, where);
    detail::reject_unknown_keys(entry, {"sets", "choice"}, where);
    auto A = detail::parse_menu_sets(dims, detail::require_key(entry, "sets", where),
                                     where + "/sets", report);
    if (!report.valid()) {
      const auto& issue = report.issues.front();
      throw Error(issue.code, issue.where + ": " + issue.detail);
    }
    for (int q = 0; q < dims.dims(); ++q)
      if (A->sets[q] == 0)
        throw Error(Errc::EmptyMenuSet,
                    where + ": empty item set for dimension '" +
                        dims.dim_label(q) + "'");
    menus.push_back(std::move(*A));
  }
  for (std::size_t i = 0; i < menus.size(); ++i)
    for (std::size_t j = i + 1; j < menus.size(); ++j)
      if (menus[i] == menus[j])
        throw Error(Errc::DuplicateMenu,
                    "/menus/" + std::to_string(j) + ": duplicates menu " +
                        std::to_string(i));
  return {std::move(dims), std::move(menus)};
}

// Family documents: {"members": [["1","2"], ["2","3"], ...]} with dimension
// labels resolved against the given dimension set.
inline std::vector<DimSubset> parse_family(const Json& doc, const DimensionSet& dims) {
  detail::expect_object(doc, "");
  detail::reject_unknown_keys(doc, {"members"}, "");
  const Json& members_j = detail::require_key(doc, "members", "");
  detail::expect_array(members_j, "/members");
  std::vector<DimSubset> members;
  for (std::size_t i = 0; i < members_j.size(); ++i) {
    const std::string where = "/members/" + std::to_string(i);
    DimSubset S;
    for (const auto& label : detail::string_list(members_j[i], where)) {
      auto q = dims.dim_id(label);
      if (!q)
        throw Error(Errc::UnknownDimension,
                    where + ": unknown dimension '" + label + "'");
      S.mask |= std::uint32_t{1} << *q;
    }
    members.push_back(S);
  }
  return members;
}

// Serialization helpers. All output uses labels and canonical ordering so
// equal values serialize to equal bytes.

inline Json subset_to_json(const DimensionSet& dims, DimSubset S) {
  Json out = Json::array();
  for (int q : S.members()) out.push_back(dims.dim_label(q));
  return out;
}

inline Json alternative_to_json(const DimensionSet& dims, const Alternative& x) {
  Json out = Json::array();
  auto qs = x.scope.members();
  for (std::size_t i = 0; i < qs.size(); ++i)
    out.push_back(dims.item_label(qs[i], x.items[i]));
  return out;
}

inline Json image_to_json(const DimensionSet& dims, const std::vector<Alternative>& image) {
  Json out = Json::array();
  for (const auto& x : image) out.push_back(alternative_to_json(dims, x));
  return out;
}

inline Json menu_sets_to_json(const DimensionSet& dims, const Menu& A) {
  Json out = Json::object();
  auto qs = A.scope.members();
  for (std::size_t i = 0; i < qs.size(); ++i) {
    Json items = Json::array();
    for (int item : Menu::items_of(A.sets[i]))
      items.push_back(dims.item_label(qs[i], item));
    out[dims.dim_label(qs[i])] = std::move(items);
  }
  return out;
}

inline Json dataset_to_json(const JointChoiceDataset& D,
                            const Json* provenance = nullptr) {
  const DimensionSet& dims = D.dims();
  Json out;
  out["dimensions"] = Json::array();
  for (int q = 0; q < dims.dims(); ++q)
    out["dimensions"].push_back(dims.dim_label(q));
  out["universes"] = Json::object();
  for (int q = 0; q < dims.dims(); ++q) {
    Json items = Json::array();
    for (const auto& label : dims.universe(q)) items.push_back(label);
    out["universes"][dims.dim_label(q)] = std::move(items);
  }
  out["menus"] = Json::array();
  for (int i = 0; i < D.menu_count(); ++i) {
    Json entry;
    entry["sets"] = menu_sets_to_json(dims, D.menu(i));
    entry["choice"] = image_to_json(dims, D.choice(i));
    out["menus"].push_back(std::move(entry));
  }
  if (provenance && !provenance->is_null()) out["provenance"] = *provenance;
  return out;
}

inline Json family_to_json(const DimensionSet& dims, const std::vector<DimSubset>& members) {
  Json out;
  out["members"] = Json::array();
  for (auto S : members) out["members"].push_back(subset_to_json(dims, S));
  return out;
}

inline Json validation_report_to_json(const ValidationReport& report) {
  Json issues = Json::array();
  for (const auto& issue : report.issues) {
    Json entry;
    entry["code"] = errc_name(issue.code);
    entry["where"] = issue.where;
    entry["detail"] = issue.detail;
    issues.push_back(std::move(entry));
  }
  return issues;
}

}  // namespace jointchoice
