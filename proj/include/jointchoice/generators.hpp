#pragma once

// Synthetic dataset generators: rational maximization, limited attention,
// status quo bias, envy-free allocation, additive utilities, and seeded
// random sampling. Each generator emits a validated dataset plus a
// provenance block describing the model and its parameters.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "json_io.hpp"
#include "preferences.hpp"

namespace jointchoice {

enum class ModelKind { Rational, LimitedAttention, StatusQuo, EnvyFree, Additive, Random };

inline const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Rational: return "rational";
    case ModelKind::LimitedAttention: return "limited_attention";
    case ModelKind::StatusQuo: return "status_quo";
    case ModelKind::EnvyFree: return "envy_free";
    case ModelKind::Additive: return "additive";
    case ModelKind::Random: return "random";
  }
  return "?";
}

struct ModelSpec {
  ModelKind kind = ModelKind::Random;
  std::vector<std::vector<int>> orders;  // per dimension, best item first
  std::vector<int> common_order;         // shared order, best item first
  std::vector<std::pair<std::uint64_t, std::uint64_t>> filter;  // set -> noticed
  std::vector<char> strict;              // n*n matrix over the common universe
  AdditiveUtility utility;
  bool single_valued = false;
  std::optional<std::uint64_t> seed;
  Json parameters;  // raw kind-specific parameters, kept for provenance
};

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// The common item universe shared by every dimension, required by models
// whose parameters name items without naming a dimension.
inline void require_common_universe(const DimensionSet& dims, const char* model) {
  for (int q = 1; q < dims.dims(); ++q)
    if (dims.universe(q) != dims.universe(0))
      throw Error(Errc::MalformedDocument,
                  std::string(model) +
                      " model needs every dimension to share one universe");
}

// Resolves a best-first item list against dimension q and checks it is a
// permutation of the whole universe.
inline std::vector<int> parse_order(const Json& j, const DimensionSet& dims,
                                    int q, const std::string& where) {
  auto labels = string_list(j, where);
  std::vector<int> order;
  std::vector<char> seen(dims.universe_size(q), 0);
  for (const auto& label : labels) {
    auto item = dims.item_id(q, label);
    if (!item)
      throw Error(Errc::InvalidOrder, where + ": '" + label +
                                          "' is not an item of dimension '" +
                                          dims.dim_label(q) + "'");
    if (seen[*item])
      throw Error(Errc::InvalidOrder, where + ": item '" + label + "' repeats");
    seen[*item] = 1;
    order.push_back(*item);
  }
  if (static_cast<int>(order.size()) != dims.universe_size(q))
    throw Error(Errc::InvalidOrder, where + ": order must rank every item of dimension '" +
                                        dims.dim_label(q) + "'");
  return order;
}

// Per-dimension orders from either a shared "order" list or an "orders"
// object keyed by dimension label.
inline std::vector<std::vector<int>> parse_dimension_orders(const Json& doc,
                                                            const DimensionSet& dims,
                                                            const char* model) {
  bool has_one = doc.contains("order");
  bool has_many = doc.contains("orders");
  if (has_one == has_many)
    throw Error(Errc::MalformedDocument,
                std::string(model) + " model needs exactly one of 'order' or 'orders'");
  std::vector<std::vector<int>> orders;
  if (has_one) {
    require_common_universe(dims, model);
    auto order = parse_order(doc["order"], dims, 0, "/order");
    orders.assign(dims.dims(), order);
    return orders;
  }
  const Json& many = doc["orders"];
  expect_object(many, "/orders");
  if (many.size() != static_cast<std::size_t>(dims.dims()))
    throw Error(Errc::MalformedDocument,
                "/orders: must list exactly the declared dimensions");
  for (int q = 0; q < dims.dims(); ++q) {
    auto it = many.find(dims.dim_label(q));
    if (it == many.end())
      throw Error(Errc::UnknownDimension,
                  "/orders: missing dimension '" + dims.dim_label(q) + "'");
    orders.push_back(parse_order(*it, dims, q, "/orders/" + dims.dim_label(q)));
  }
  return orders;
}

inline std::uint64_t parse_item_mask(const Json& j, const DimensionSet& dims,
                                     const std::string& where) {
  std::uint64_t mask = 0;
  for (const auto& label : string_list(j, where)) {
    auto item = dims.item_id(0, label);
    if (!item)
      throw Error(Errc::UnknownItem, where + ": unknown item '" + label + "'");
    mask |= std::uint64_t{1} << *item;
  }
  return mask;
}

inline Rational parse_rational(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  std::string text = expect_string(j, where);
  std::size_t slash = text.find('/');
  try {
    if (slash == std::string::npos)
      return Rational(std::stoll(text));
    long long num = std::stoll(text.substr(0, slash));
    long long den = std::stoll(text.substr(slash + 1));
    return Rational(num, den);
  } catch (const std::exception&) {
    throw Error(Errc::MalformedDocument,
                where + ": expected an integer or 'p/q' fraction, got '" + text + "'");
  }
}

}  // namespace detail

// Parses a model document ({"model": kind, ...parameters}) against the
// dimension set the generated dataset will live on.
inline ModelSpec parse_model_spec(const Json& doc, const DimensionSet& dims) {
  detail::expect_object(doc, "");
  std::string kind = detail::expect_string(detail::require_key(doc, "model", ""), "/model");
  ModelSpec spec;
  spec.parameters = doc;
  spec.parameters.erase("model");
  if (kind == "rational") {
    detail::reject_unknown_keys(doc, {"model", "order", "orders"}, "");
    spec.kind = ModelKind::Rational;
    spec.orders = detail::parse_dimension_orders(doc, dims, "rational");
  } else if (kind == "limited_attention") {
    detail::reject_unknown_keys(doc, {"model", "order", "filter"}, "");
    spec.kind = ModelKind::LimitedAttention;
    detail::require_common_universe(dims, "limited_attention");
    spec.common_order =
        detail::parse_order(detail::require_key(doc, "order", ""), dims, 0, "/order");
    if (doc.contains("filter")) {
      detail::expect_array(doc["filter"], "/filter");
      for (std::size_t i = 0; i < doc["filter"].size(); ++i) {
        const Json& entry = doc["filter"][i];
        std::string where = "/filter/" + std::to_string(i);
        detail::expect_object(entry, where);
        detail::reject_unknown_keys(entry, {"set", "noticed"}, where);
        std::uint64_t set = detail::parse_item_mask(
            detail::require_key(entry, "set", where), dims, where + "/set");
        std::uint64_t noticed = detail::parse_item_mask(
            detail::require_key(entry, "noticed", where), dims, where + "/noticed");
        if (noticed == 0 || (noticed & ~set) != 0)
          throw Error(Errc::InvalidFilter,
                      where + ": noticed items must be a nonempty subset of the set");
        for (const auto& [other, ignore] : spec.filter)
          if (other == set)
            throw Error(Errc::MalformedDocument, where + ": duplicate filter set");
        spec.filter.push_back({set, noticed});
      }
    }
  } else if (kind == "status_quo") {
    detail::reject_unknown_keys(doc, {"model", "strict"}, "");
    spec.kind = ModelKind::StatusQuo;
    detail::require_common_universe(dims, "status_quo");
    int n = dims.universe_size(0);
    spec.strict.assign(static_cast<std::size_t>(n) * n, 0);
    const Json& pairs = detail::require_key(doc, "strict", "");
    detail::expect_array(pairs, "/strict");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      std::string where = "/strict/" + std::to_string(i);
      auto pair = detail::string_list(pairs[i], where);
      if (pair.size() != 2)
        throw Error(Errc::MalformedDocument, where + ": expected a pair");
      auto a = dims.item_id(0, pair[0]);
      auto b = dims.item_id(0, pair[1]);
      if (!a || !b)
        throw Error(Errc::UnknownItem, where + ": unknown item");
      if (*a == *b)
        throw Error(Errc::InvalidOrder, where + ": an item cannot beat itself");
      spec.strict[static_cast<std::size_t>(*a) * n + *b] = 1;
    }
    // Reject cycles so "dominated" is meaningful and a maximal item exists.
    std::vector<int> color(n, 0);
    std::vector<std::pair<int, int>> stack;
    for (int s = 0; s < n; ++s) {
      if (color[s] != 0) continue;
      stack.push_back({s, 0});
      color[s] = 1;
      while (!stack.empty()) {
        auto& [u, next] = stack.back();
        bool advanced = false;
        while (next < n) {
          int v = next++;
          if (!spec.strict[static_cast<std::size_t>(u) * n + v]) continue;
          if (color[v] == 1)
            throw Error(Errc::InvalidOrder, "/strict: the relation has a cycle");
          if (color[v] == 0) {
            stack.push_back({v, 0});
            color[v] = 1;
            advanced = true;
            break;
          }
        }
        if (!advanced) {
          color[u] = 2;
          stack.pop_back();
        }
      }
    }
  } else if (kind == "envy_free") {
    detail::reject_unknown_keys(doc, {"model", "order", "orders"}, "");
    spec.kind = ModelKind::EnvyFree;
    detail::require_common_universe(dims, "envy_free");
    spec.orders = detail::parse_dimension_orders(doc, dims, "envy_free");
  } else if (kind == "additive") {
    detail::reject_unknown_keys(doc, {"model", "blocks", "values", "single_valued"}, "");
    spec.kind = ModelKind::Additive;
    const Json& blocks = detail::require_key(doc, "blocks", "");
    detail::expect_array(blocks, "/blocks");
    std::vector<DimSubset> subsets;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      std::string where = "/blocks/" + std::to_string(b);
      DimSubset S;
      for (const auto& label : detail::string_list(blocks[b], where)) {
        auto q = dims.dim_id(label);
        if (!q)
          throw Error(Errc::UnknownDimension, where + ": unknown dimension '" + label + "'");
        S = S | DimSubset::single(*q);
      }
      subsets.push_back(S);
    }
    const Json& values = detail::require_key(doc, "values", "");
    detail::expect_array(values, "/values");
    if (values.size() != subsets.size())
      throw Error(Errc::MalformedDocument, "/values: one value table per block");
    std::vector<std::map<std::vector<int>, Rational>> tables(subsets.size());
    for (std::size_t b = 0; b < values.size(); ++b) {
      std::string bwhere = "/values/" + std::to_string(b);
      detail::expect_array(values[b], bwhere);
      auto qs = subsets[b].members();
      for (std::size_t i = 0; i < values[b].size(); ++i) {
        const Json& entry = values[b][i];
        std::string where = bwhere + "/" + std::to_string(i);
        detail::expect_object(entry, where);
        detail::reject_unknown_keys(entry, {"items", "value"}, where);
        auto labels = detail::string_list(detail::require_key(entry, "items", where),
                                          where + "/items");
        if (labels.size() != qs.size())
          throw Error(Errc::MalformedDocument,
                      where + ": expected one item per block dimension");
        std::vector<int> key;
        for (std::size_t k = 0; k < qs.size(); ++k) {
          auto item = dims.item_id(qs[k], labels[k]);
          if (!item)
            throw Error(Errc::UnknownItem, where + ": unknown item '" + labels[k] + "'");
          key.push_back(*item);
        }
        if (!tables[b].emplace(std::move(key),
                               detail::parse_rational(
                                   detail::require_key(entry, "value", where),
                                   where + "/value"))
                 .second)
          throw Error(Errc::MalformedDocument, where + ": duplicate value entry");
      }
    }
    spec.utility = make_additive_utility(dims, std::move(subsets), std::move(tables));
    if (doc.contains("single_valued")) {
      if (!doc["single_valued"].is_boolean())
        throw Error(Errc::MalformedDocument, "/single_valued: expected a boolean");
      spec.single_valued = doc["single_valued"].get<bool>();
    }
  } else if (kind == "random") {
    detail::reject_unknown_keys(doc, {"model", "single_valued", "seed"}, "");
    spec.kind = ModelKind::Random;
    if (doc.contains("single_valued")) {
      if (!doc["single_valued"].is_boolean())
        throw Error(Errc::MalformedDocument, "/single_valued: expected a boolean");
      spec.single_valued = doc["single_valued"].get<bool>();
    }
    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_unsigned())
        throw Error(Errc::MalformedDocument, "/seed: expected a nonnegative integer");
      spec.seed = doc["seed"].get<std::uint64_t>();
    }
  } else {
    throw Error(Errc::MalformedDocument, "/model: unknown model '" + kind + "'");
  }
  return spec;
}

// Per-dimension maximization of strict total orders (best item first).
inline JointChoiceDataset gen_rational(const DimensionSet& dims,
                                       const std::vector<Menu>& menus,
                                       const std::vector<std::vector<int>>& orders) {
  if (static_cast<int>(orders.size()) != dims.dims())
    throw Error(Errc::InvalidOrder, "needs one order per dimension");
  std::vector<std::vector<int>> rank(orders.size());
  for (std::size_t q = 0; q < orders.size(); ++q) {
    if (static_cast<int>(orders[q].size()) != dims.universe_size(static_cast<int>(q)))
      throw Error(Errc::InvalidOrder, "order must rank every item of dimension '" +
                                          dims.dim_label(static_cast<int>(q)) + "'");
    rank[q].assign(orders[q].size(), -1);
    for (std::size_t r = 0; r < orders[q].size(); ++r) {
      if (orders[q][r] < 0 || orders[q][r] >= static_cast<int>(orders[q].size()) ||
          rank[q][orders[q][r]] != -1)
        throw Error(Errc::InvalidOrder, "order must be a permutation of the universe");
      rank[q][orders[q][r]] = static_cast<int>(r);
    }
  }
  std::vector<std::vector<Alternative>> choices;
  for (const auto& A : menus) {
    Alternative x{dims.all(), {}};
    for (int q = 0; q < dims.dims(); ++q) {
      int best = -1;
      for (int item : Menu::items_of(A.set_at(q)))
        if (best < 0 || rank[q][item] < rank[q][best]) best = item;
      x.items.push_back(best);
    }
    choices.push_back({std::move(x)});
  }
  return make_dataset(dims, menus, std::move(choices));
}

// Per-dimension maximization restricted to the noticed part of each item
// set; sets absent from the filter are noticed in full.
inline JointChoiceDataset gen_limited_attention(
    const DimensionSet& dims, const std::vector<Menu>& menus,
    const std::vector<int>& order,
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& filter) {
  detail::require_common_universe(dims, "limited_attention");
  std::vector<int> rank(dims.universe_size(0), -1);
  if (static_cast<int>(order.size()) != dims.universe_size(0))
    throw Error(Errc::InvalidOrder, "order must rank every item");
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (order[r] < 0 || order[r] >= static_cast<int>(order.size()) || rank[order[r]] != -1)
      throw Error(Errc::InvalidOrder, "order must be a permutation of the universe");
    rank[order[r]] = static_cast<int>(r);
  }
  for (const auto& [set, noticed] : filter)
    if (noticed == 0 || (noticed & ~set) != 0)
      throw Error(Errc::InvalidFilter,
                  "noticed items must be a nonempty subset of their set");
  auto noticed_part = [&filter](std::uint64_t set) {
    for (const auto& [key, noticed] : filter)
      if (key == set) return noticed;
    return set;
  };
  std::vector<std::vector<Alternative>> choices;
  for (const auto& A : menus) {
    Alternative x{dims.all(), {}};
    for (int q = 0; q < dims.dims(); ++q) {
      int best = -1;
      for (int item : Menu::items_of(noticed_part(A.set_at(q))))
        if (best < 0 || rank[item] < rank[best]) best = item;
      x.items.push_back(best);
    }
    choices.push_back({std::move(x)});
  }
  return make_dataset(dims, menus, std::move(choices));
}

// Sequential choice with status quo bias: the first dimension picks a
// maximal item; every later dimension keeps the previous pick when it is
// offered and undominated, and otherwise picks a maximal item. Ties go to
// the lowest item id.
inline JointChoiceDataset gen_status_quo(const DimensionSet& dims,
                                         const std::vector<Menu>& menus,
                                         const std::vector<char>& strict) {
  detail::require_common_universe(dims, "status_quo");
  int n = dims.universe_size(0);
  if (strict.size() != static_cast<std::size_t>(n) * n)
    throw Error(Errc::InvalidOrder, "comparison matrix does not match the universe");
  auto beats = [&](int a, int b) { return strict[static_cast<std::size_t>(a) * n + b] != 0; };
  auto dominated_in = [&](std::uint64_t set, int item) {
    for (int other : Menu::items_of(set))
      if (beats(other, item)) return true;
    return false;
  };
  auto first_maximal = [&](std::uint64_t set) {
    for (int item : Menu::items_of(set))
      if (!dominated_in(set, item)) return item;
    throw Error(Errc::InvalidOrder, "the relation has a cycle");
  };
  std::vector<std::vector<Alternative>> choices;
  for (const auto& A : menus) {
    Alternative x{dims.all(), {}};
    int prev = -1;
    for (int q = 0; q < dims.dims(); ++q) {
      std::uint64_t set = A.set_at(q);
      int pick;
      if (q > 0 && (set >> prev & 1) && !dominated_in(set, prev))
        pick = prev;
      else
        pick = first_maximal(set);
      x.items.push_back(pick);
      prev = pick;
    }
    choices.push_back({std::move(x)});
  }
  return make_dataset(dims, menus, std::move(choices));
}

// Fair allocation: dimensions are agents sharing one item universe. Each
// menu yields the efficient envy-free allocations when any allocation is
// envy-free, else the allocation giving each agent a maximal offered item.
inline JointChoiceDataset gen_envy_free(const DimensionSet& dims,
                                        const std::vector<Menu>& menus,
                                        const std::vector<std::vector<int>>& orders) {
  detail::require_common_universe(dims, "envy_free");
  if (static_cast<int>(orders.size()) != dims.dims())
    throw Error(Errc::InvalidOrder, "needs one order per agent");
  std::vector<std::vector<int>> rank(orders.size());
  for (std::size_t q = 0; q < orders.size(); ++q) {
    rank[q].assign(dims.universe_size(0), -1);
    if (static_cast<int>(orders[q].size()) != dims.universe_size(0))
      throw Error(Errc::InvalidOrder, "order must rank every item");
    for (std::size_t r = 0; r < orders[q].size(); ++r) {
      if (orders[q][r] < 0 || orders[q][r] >= dims.universe_size(0) ||
          rank[q][orders[q][r]] != -1)
        throw Error(Errc::InvalidOrder, "order must be a permutation of the universe");
      rank[q][orders[q][r]] = static_cast<int>(r);
    }
  }
  auto envy_free = [&](const Alternative& x) {
    for (int q = 0; q < dims.dims(); ++q)
      for (int r = 0; r < dims.dims(); ++r)
        if (rank[q][x.items[r]] < rank[q][x.items[q]]) return false;
    return true;
  };
  std::vector<std::vector<Alternative>> choices;
  for (const auto& A : menus) {
    std::vector<Alternative> ef;
    for (const auto& x : A.alternatives())
      if (envy_free(x)) ef.push_back(x);
    std::vector<Alternative> picked;
    if (!ef.empty()) {
      // Keep the efficient envy-free allocations: drop any that another
      // envy-free allocation improves for one agent and worsens for none.
      for (const auto& x : ef) {
        bool dominated = false;
        for (const auto& y : ef) {
          bool weakly_better = true, strictly = false;
          for (int q = 0; q < dims.dims(); ++q) {
            if (rank[q][y.items[q]] > rank[q][x.items[q]]) weakly_better = false;
            if (rank[q][y.items[q]] < rank[q][x.items[q]]) strictly = true;
          }
          if (weakly_better && strictly) { dominated = true; break; }
        }
        if (!dominated) picked.push_back(x);
      }
    } else {
      Alternative x{dims.all(), {}};
      for (int q = 0; q < dims.dims(); ++q) {
        int best = -1;
        for (int item : Menu::items_of(A.set_at(q)))
          if (best < 0 || rank[q][item] < rank[q][best]) best = item;
        x.items.push_back(best);
      }
      picked.push_back(std::move(x));
    }
    choices.push_back(std::move(picked));
  }
  return make_dataset(dims, menus, std::move(choices));
}

inline constexpr std::uint64_t kMaxSampledMenu = std::uint64_t{1} << 20;

// Seeded sampling: per menu, a uniform nonempty subset of the offered
// alternatives, or a single uniform alternative. Menus are sampled on
// independent streams, so the output is stable under reordering.
inline JointChoiceDataset gen_random(const DimensionSet& dims,
                                     const std::vector<Menu>& menus,
                                     std::uint64_t seed, bool single_valued) {
  std::vector<std::vector<Alternative>> choices;
  for (std::size_t i = 0; i < menus.size(); ++i) {
    const Menu& A = menus[i];
    std::uint64_t size = A.product_size();
    if (size > kMaxSampledMenu)
      throw Error(Errc::UniverseTooLarge,
                  "menu " + std::to_string(i) + " offers too many alternatives to sample");
    std::uint64_t state = seed ^ (0x9E3779B97F4A7C15ull * (i + 1));
    std::vector<Alternative> picked;
    if (single_valued) {
      std::uint64_t reject_below = (0 - size) % size;
      std::uint64_t draw;
      do {
        draw = detail::splitmix64_next(state);
      } while (draw < reject_below);
      std::uint64_t index = draw % size, stride = 1;
      Alternative x{dims.all(), std::vector<int>(dims.dims(), 0)};
      for (int q = dims.dims() - 1; q >= 0; --q) {
        auto items = Menu::items_of(A.set_at(q));
        x.items[q] = items[(index / stride) % items.size()];
        stride *= items.size();
      }
      picked.push_back(std::move(x));
    } else {
      auto alts = A.alternatives();
      do {
        picked.clear();
        for (const auto& x : alts)
          if (detail::splitmix64_next(state) >> 63) picked.push_back(x);
      } while (picked.empty());
    }
    choices.push_back(std::move(picked));
  }
  return make_dataset(dims, menus, std::move(choices));
}

struct GeneratedDataset {
  JointChoiceDataset dataset;
  Json provenance;
};

// Dispatches a parsed model over a menu family and attaches provenance.
inline GeneratedDataset generate(const DimensionSet& dims,
                                 const std::vector<Menu>& menus,
                                 const ModelSpec& spec) {
  Json prov;
  prov["model"] = model_kind_name(spec.kind);
  prov["parameters"] = spec.parameters;
  switch (spec.kind) {
    case ModelKind::Rational:
      return {gen_rational(dims, menus, spec.orders), std::move(prov)};
    case ModelKind::LimitedAttention:
      return {gen_limited_attention(dims, menus, spec.common_order, spec.filter),
              std::move(prov)};
    case ModelKind::StatusQuo:
      prov["conventions"] = Json{{"first_decision", "preference_maximal"},
                                 {"tie_break", "item_order"}};
      return {gen_status_quo(dims, menus, spec.strict), std::move(prov)};
    case ModelKind::EnvyFree:
      prov["conventions"] = Json{{"selection", "efficient_envy_free"},
                                 {"fallback", "efficient"}};
      return {gen_envy_free(dims, menus, spec.orders), std::move(prov)};
    case ModelKind::Additive: {
      auto D = additive_choice(dims, spec.utility, menus);
      if (spec.single_valued) {
        prov["conventions"] = Json{{"tie_break", "canonical_alternative_order"}};
        std::vector<std::vector<Alternative>> firsts;
        for (int i = 0; i < D.menu_count(); ++i)
          firsts.push_back({D.choice(i).front()});
        D = make_dataset(dims, menus, std::move(firsts));
      }
      return {std::move(D), std::move(prov)};
    }
    case ModelKind::Random: {
      if (!spec.seed)
        throw Error(Errc::MalformedDocument, "random model needs a seed");
      prov["seed"] = *spec.seed;
      return {gen_random(dims, menus, *spec.seed, spec.single_valued), std::move(prov)};
    }
  }
  throw Error(Errc::MalformedDocument, "unknown model kind");
}

}  // namespace jointchoice
