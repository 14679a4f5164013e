// jointchoice: inspect, decide, and generate multidimensional choice data.
//
// Every verb prints one JSON report to standard output and encodes its
// verdict in the exit code: 0 the property holds (or generation succeeded),
// 1 the property fails (a witness is in the report), 2 the chosen method
// cannot decide, 3 bad input or usage. The `generate` verb prints a dataset
// document instead of a report so its output feeds the other verbs directly.

#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "jointchoice/core.hpp"
#include "jointchoice/generators.hpp"
#include "jointchoice/json_io.hpp"
#include "jointchoice/preferences.hpp"
#include "jointchoice/selective.hpp"
#include "jointchoice/separability.hpp"

namespace jc = jointchoice;
using jc::Json;

namespace {

constexpr int kHolds = 0;
constexpr int kFails = 1;
constexpr int kInconclusive = 2;
constexpr int kInputError = 3;

struct ReportContext {
  std::string verb;
  Json inputs = Json::array();
  Json options = Json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

Json load_input(ReportContext& ctx, const std::string& path) {
  std::string text = jc::read_file(path);
  Json entry;
  entry["path"] = path;
  entry["digest"] = jc::fnv1a64_hex(text);
  ctx.inputs.push_back(std::move(entry));
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw jc::Error(jc::Errc::MalformedDocument, path + ": " + e.what());
  }
}

// Datasets fed to analysis verbs must be valid; `validate` is the verb that
// reports issues instead of failing.
jc::JointChoiceDataset load_valid_dataset(ReportContext& ctx, const std::string& path) {
  auto parsed = jc::parse_dataset(load_input(ctx, path));
  if (!parsed.dataset) {
    const auto& issue = parsed.report.issues.front();
    throw jc::Error(issue.code, path + ": " + issue.where + ": " + issue.detail);
  }
  return *std::move(parsed.dataset);
}

int emit(const ReportContext& ctx, Json result, int code) {
  Json report;
  report["tool"] = "jointchoice";
  report["verb"] = ctx.verb;
  report["inputs"] = ctx.inputs;
  report["options"] = ctx.options;
  report["result"] = std::move(result);
  std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - ctx.start;
  report["timing"] = elapsed.count();
  std::cout << report.dump(2) << "\n";
  return code;
}

jc::DimSubset parse_subset(const jc::DimensionSet& dims, const std::string& csv,
                           const std::string& flag) {
  jc::DimSubset S;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string label = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (label.empty())
      throw jc::Error(jc::Errc::UsageError, flag + ": empty dimension label");
    auto q = dims.dim_id(label);
    if (!q)
      throw jc::Error(jc::Errc::UnknownDimension,
                      flag + ": unknown dimension '" + label + "'");
    S = S | jc::DimSubset::single(*q);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (S.empty()) throw jc::Error(jc::Errc::UsageError, flag + ": empty dimension list");
  return S;
}

Json labels_json(const jc::DimensionSet& dims, jc::DimSubset S) {
  return jc::subset_to_json(dims, S);
}

Json separability_witness_json(const jc::JointChoiceDataset& D,
                               const jc::SeparabilityWitness& w) {
  const auto& dims = D.dims();
  Json out;
  out["set"] = labels_json(dims, w.S);
  out["menu_a_index"] = w.menu_a;
  out["menu_a"] = jc::menu_sets_to_json(dims, D.menu(w.menu_a));
  out["menu_b_index"] = w.menu_b;
  out["menu_b"] = jc::menu_sets_to_json(dims, D.menu(w.menu_b));
  out["projected_choice_a"] = jc::image_to_json(dims, w.image_a);
  out["projected_choice_b"] = jc::image_to_json(dims, w.image_b);
  return out;
}

Json separability_report_json(const jc::JointChoiceDataset& D,
                              const jc::SeparabilityReport& r,
                              bool include_induced) {
  const auto& dims = D.dims();
  Json out;
  out["set"] = labels_json(dims, r.S);
  out["holds"] = r.holds;
  if (r.holds && include_induced && r.induced)
    out["induced_dataset"] = jc::dataset_to_json(r.induced->to_dataset(dims));
  if (!r.holds && r.witness)
    out["witness"] = separability_witness_json(D, *r.witness);
  return out;
}

Json betweenness_witness_json(const jc::JointChoiceDataset& D,
                              const jc::BetweennessWitness& w) {
  const auto& dims = D.dims();
  Json out;
  out["s"] = labels_json(dims, w.S);
  out["t"] = labels_json(dims, w.T);
  out["menu_a_index"] = w.menu_a;
  out["menu_a"] = jc::menu_sets_to_json(dims, D.menu(w.menu_a));
  out["menu_b_index"] = w.menu_b;
  out["menu_b"] = jc::menu_sets_to_json(dims, D.menu(w.menu_b));
  return out;
}

Json family_betweenness_json(const jc::JointChoiceDataset& D,
                             const jc::SelectiveFamily& F,
                             const jc::SBetweennessReport& r) {
  const auto& dims = D.dims();
  Json out;
  switch (r.status) {
    case jc::SBetweennessStatus::Holds: out["status"] = "holds"; break;
    case jc::SBetweennessStatus::Fails: out["status"] = "fails"; break;
    case jc::SBetweennessStatus::Inconclusive: out["status"] = "inconclusive"; break;
  }
  Json labellings = Json::array();
  for (std::size_t q = 0; q < r.labellings.size(); ++q) {
    Json entry;
    entry["dimension"] = dims.dim_label(static_cast<int>(q));
    Json order = Json::array();
    for (int member : r.labellings[q])
      order.push_back(labels_json(dims, F.members[member]));
    entry["order"] = std::move(order);
    labellings.push_back(std::move(entry));
  }
  out["labellings"] = std::move(labellings);
  if (r.failed_q) out["failed_dimension"] = dims.dim_label(*r.failed_q);
  if (r.exceeded_q) out["exceeded_dimension"] = dims.dim_label(*r.exceeded_q);
  if (r.sample_failure)
    out["witness"] = betweenness_witness_json(D, *r.sample_failure);
  return out;
}

Json rationalizability_json(const jc::JointChoiceDataset& D,
                            const jc::RationalizabilityReport& r) {
  const auto& dims = D.dims();
  Json out;
  out["holds"] = r.holds;
  out["revealed_acyclic"] = r.revealed_acyclic;
  if (r.witness) {
    Json w;
    w["menu_index"] = r.witness->menu;
    w["menu"] = jc::menu_sets_to_json(dims, D.menu(r.witness->menu));
    w["max_set"] = jc::image_to_json(dims, r.witness->max_set);
    w["choice"] = jc::image_to_json(dims, r.witness->choice);
    out["witness"] = std::move(w);
  }
  return out;
}

// Builds a verified selective family from a family document; a family that
// is not selective cannot support the sufficiency methods, so the caller
// maps the nullopt case to an inconclusive report.
std::optional<jc::SelectiveFamily> verified_family(
    const jc::DimensionSet& dims, const std::vector<jc::DimSubset>& members,
    Json& diagnostics) {
  auto check = jc::check_selective(members, dims.dims());
  if (auto* family = std::get_if<jc::SelectiveFamily>(&check)) return std::move(*family);
  const auto& w = std::get<jc::SelectivityWitness>(check);
  Json j;
  j["dimension"] = dims.dim_label(w.q);
  Json sets = Json::array();
  for (int member : w.index_set) sets.push_back(labels_json(dims, members[member]));
  j["index_set"] = std::move(sets);
  j["intersection"] = labels_json(dims, w.intersection);
  diagnostics = std::move(j);
  return std::nullopt;
}

int run_validate(ReportContext& ctx, const std::string& path) {
  auto parsed = jc::parse_dataset(load_input(ctx, path));
  Json result;
  result["valid"] = parsed.report.valid();
  result["issues"] = jc::validation_report_to_json(parsed.report);
  if (parsed.dataset) {
    result["dimensions"] = parsed.dataset->dims().dims();
    result["menus"] = parsed.dataset->menu_count();
    result["single_valued"] = parsed.dataset->single_valued();
    result["complete_domain"] = parsed.dataset->complete_domain();
  }
  return emit(ctx, std::move(result), parsed.report.valid() ? kHolds : kFails);
}

int run_separability(ReportContext& ctx, const std::string& path,
                     const std::string& set_csv, bool all_singletons, bool brute,
                     const std::string& family_path) {
  auto D = load_valid_dataset(ctx, path);
  const auto& dims = D.dims();
  int modes = (!set_csv.empty()) + all_singletons + brute + (!family_path.empty());
  if (modes > 1)
    throw jc::Error(jc::Errc::UsageError,
                    "--set, --all-singletons, --brute, and --family are exclusive");
  if (!set_csv.empty()) {
    jc::DimSubset S = parse_subset(dims, set_csv, "--set");
    ctx.options["mode"] = "subset";
    ctx.options["set"] = labels_json(dims, S);
    auto r = jc::is_S_separable(D, S);
    return emit(ctx, separability_report_json(D, r, true), r.holds ? kHolds : kFails);
  }
  if (brute) {
    ctx.options["mode"] = "all_subsets";
    Json result;
    bool holds = jc::is_separable_bruteforce(D);
    result["holds"] = holds;
    if (!holds) {
      // Surface the smallest failing subset for the report.
      for (std::uint32_t mask = 1; mask < (1u << dims.dims()); ++mask) {
        auto r = jc::is_S_separable(D, jc::DimSubset{mask});
        if (!r.holds) {
          result["witness"] = separability_witness_json(D, *r.witness);
          break;
        }
      }
    }
    return emit(ctx, std::move(result), holds ? kHolds : kFails);
  }
  if (!family_path.empty()) {
    ctx.options["mode"] = "family";
    ctx.options["family"] = family_path;
    auto members = jc::parse_family(load_input(ctx, family_path), dims);
    Json diagnostics;
    auto F = verified_family(dims, members, diagnostics);
    Json result;
    if (!F) {
      result["verdict"] = "inconclusive";
      result["reason"] = "the family is not selective; the sufficiency test does not apply";
      result["selectivity_witness"] = std::move(diagnostics);
      return emit(ctx, std::move(result), kInconclusive);
    }
    auto r = jc::separability_via_selective_family(D, *F);
    result["verdict"] =
        r.verdict == jc::FamilyVerdict::Separable ? "separable" : "inconclusive";
    result["method"] = "member separability plus chained menus betweenness (sufficient)";
    if (!r.reason.empty()) result["reason"] = r.reason;
    Json member_reports = Json::array();
    for (const auto& mr : r.member_reports)
      member_reports.push_back(separability_report_json(D, mr, false));
    result["members"] = std::move(member_reports);
    if (r.betweenness)
      result["betweenness"] = family_betweenness_json(D, *F, *r.betweenness);
    return emit(ctx, std::move(result),
                r.verdict == jc::FamilyVerdict::Separable ? kHolds : kInconclusive);
  }
  ctx.options["mode"] = "all_singletons";
  auto r = jc::is_separable(D);
  Json result;
  result["holds"] = r.holds;
  result["method"] = "separability on every singleton decides full separability";
  Json per_dim = Json::array();
  for (const auto& dr : r.per_dimension)
    per_dim.push_back(separability_report_json(D, dr, false));
  result["per_dimension"] = std::move(per_dim);
  return emit(ctx, std::move(result), r.holds ? kHolds : kFails);
}

int run_induced(ReportContext& ctx, const std::string& path, const std::string& set_csv) {
  auto D = load_valid_dataset(ctx, path);
  jc::DimSubset S = parse_subset(D.dims(), set_csv, "--set");
  ctx.options["set"] = labels_json(D.dims(), S);
  auto r = jc::is_S_separable(D, S);
  Json result;
  result["holds"] = r.holds;
  if (r.holds) {
    result["dataset"] = jc::dataset_to_json(r.induced->to_dataset(D.dims()));
  } else {
    result["witness"] = separability_witness_json(D, *r.witness);
  }
  return emit(ctx, std::move(result), r.holds ? kHolds : kFails);
}

int run_betweenness(ReportContext& ctx, const std::string& path,
                    const std::string& s_csv, const std::string& t_csv,
                    const std::string& family_path) {
  auto D = load_valid_dataset(ctx, path);
  const auto& dims = D.dims();
  bool pair_mode = !s_csv.empty() || !t_csv.empty();
  if (pair_mode == !family_path.empty())
    throw jc::Error(jc::Errc::UsageError, "needs either --s and --t, or --family");
  if (pair_mode) {
    if (s_csv.empty() || t_csv.empty())
      throw jc::Error(jc::Errc::UsageError, "--s and --t go together");
    jc::DimSubset S = parse_subset(dims, s_csv, "--s");
    jc::DimSubset T = parse_subset(dims, t_csv, "--t");
    ctx.options["s"] = labels_json(dims, S);
    ctx.options["t"] = labels_json(dims, T);
    auto r = jc::check_menus_betweenness(D, S, T);
    Json result;
    result["holds"] = r.holds;
    result["vacuous_intersection"] = r.vacuous_intersection;
    if (r.witness) result["witness"] = betweenness_witness_json(D, *r.witness);
    return emit(ctx, std::move(result), r.holds ? kHolds : kFails);
  }
  ctx.options["family"] = family_path;
  auto members = jc::parse_family(load_input(ctx, family_path), dims);
  Json diagnostics;
  auto F = verified_family(dims, members, diagnostics);
  Json result;
  if (!F) {
    result["status"] = "inconclusive";
    result["reason"] = "the family is not selective";
    result["selectivity_witness"] = std::move(diagnostics);
    return emit(ctx, std::move(result), kInconclusive);
  }
  auto r = jc::check_S_betweenness(D, *F);
  result = family_betweenness_json(D, *F, r);
  int code = r.status == jc::SBetweennessStatus::Holds  ? kHolds
             : r.status == jc::SBetweennessStatus::Fails ? kFails
                                                         : kInconclusive;
  return emit(ctx, std::move(result), code);
}

int run_richness(ReportContext& ctx, const std::string& path, const std::string& set_csv) {
  auto D = load_valid_dataset(ctx, path);
  const auto& dims = D.dims();
  jc::DimSubset S = parse_subset(dims, set_csv, "--set");
  ctx.options["set"] = labels_json(dims, S);
  auto r = jc::is_S_rich(D, S);
  Json result;
  result["holds"] = r.holds;
  if (r.witness) {
    Json w;
    w["set"] = labels_json(dims, r.witness->S);
    w["source_menu_index"] = r.witness->source_menu;
    w["source_menu"] = jc::menu_sets_to_json(dims, D.menu(r.witness->source_menu));
    w["x"] = jc::alternative_to_json(dims, r.witness->x);
    w["y"] = jc::alternative_to_json(dims, r.witness->y);
    w["missing_menu"] = jc::menu_sets_to_json(dims, r.witness->missing);
    result["witness"] = std::move(w);
  }
  return emit(ctx, std::move(result), r.holds ? kHolds : kFails);
}

int run_selective(ReportContext& ctx, int n_dims, const std::string& verify_path) {
  ctx.options["dims"] = n_dims;
  if (n_dims < 1 || n_dims > jc::kMaxDimensions)
    throw jc::Error(jc::Errc::UsageError, "--dims must be between 1 and " +
                                              std::to_string(jc::kMaxDimensions));
  std::vector<std::string> labels;
  std::vector<std::vector<std::string>> universes;
  for (int q = 1; q <= n_dims; ++q) {
    labels.push_back(std::to_string(q));
    universes.push_back({"*"});
  }
  auto dims = jc::DimensionSet::create(std::move(labels), std::move(universes));
  if (!verify_path.empty()) {
    ctx.options["verify"] = verify_path;
    auto members = jc::parse_family(load_input(ctx, verify_path), dims);
    Json diagnostics;
    auto F = verified_family(dims, members, diagnostics);
    Json result;
    result["selective"] = F.has_value();
    result["size"] = members.size();
    result["minimum_size"] = jc::sel_size(n_dims);
    if (F) {
      result["minimal"] = members.size() == static_cast<std::size_t>(jc::sel_size(n_dims));
    } else {
      result["witness"] = std::move(diagnostics);
    }
    return emit(ctx, std::move(result), F ? kHolds : kFails);
  }
  auto F = jc::minimal_selective_family(n_dims);
  Json result;
  result["size"] = F.members.size();
  result["family"] = jc::family_to_json(dims, F.members);
  return emit(ctx, std::move(result), kHolds);
}

int run_reveal(ReportContext& ctx, const std::string& path) {
  auto D = load_valid_dataset(ctx, path);
  const auto& dims = D.dims();
  auto r = jc::revealed_preference(D);
  Json result;
  result["acyclic"] = r.acyclic;
  auto pairs = r.relation.pairs();
  result["pair_count"] = pairs.size();
  Json list = Json::array();
  for (const auto& [x, y] : pairs) {
    Json entry;
    entry["over"] = jc::alternative_to_json(dims, x);
    entry["under"] = jc::alternative_to_json(dims, y);
    list.push_back(std::move(entry));
  }
  result["pairs"] = std::move(list);
  if (r.cycle) {
    Json cycle = Json::array();
    for (const auto& x : r.cycle->cycle)
      cycle.push_back(jc::alternative_to_json(dims, x));
    result["cycle"] = std::move(cycle);
  }
  return emit(ctx, std::move(result), r.acyclic ? kHolds : kFails);
}

int run_rationalizable(ReportContext& ctx, const std::string& path,
                       const std::string& family_path) {
  auto D = load_valid_dataset(ctx, path);
  const auto& dims = D.dims();
  if (family_path.empty()) {
    auto r = jc::is_rationalizable(D);
    Json result = rationalizability_json(D, r);
    result["method"] = "choices compared with revealed-preference maximization";
    return emit(ctx, std::move(result), r.holds ? kHolds : kFails);
  }
  ctx.options["family"] = family_path;
  auto members = jc::parse_family(load_input(ctx, family_path), dims);
  Json diagnostics;
  auto F = verified_family(dims, members, diagnostics);
  Json result;
  if (!F) {
    result["verdict"] = "inconclusive";
    result["reason"] = "the family is not selective; the shortcut does not apply";
    result["selectivity_witness"] = std::move(diagnostics);
    return emit(ctx, std::move(result), kInconclusive);
  }
  try {
    auto r = jc::rationalizability_via_selective_family(D, *F);
    bool holds = r.verdict == jc::FamilyRationalizability::Rationalizable;
    result["verdict"] = holds ? "rationalizable" : "not_rationalizable";
    result["method"] =
        "rationalizability of every induced choice along the selective family";
    Json member_reports = Json::array();
    for (std::size_t m = 0; m < r.members.size(); ++m) {
      Json entry;
      entry["set"] = labels_json(dims, r.members[m]);
      entry["holds"] = r.member_reports[m].holds;
      member_reports.push_back(std::move(entry));
    }
    result["members"] = std::move(member_reports);
    result["direct_verdict"] = r.direct_verdict;
    result["diagnostic_mismatch"] = r.diagnostic_mismatch;
    return emit(ctx, std::move(result), holds ? kHolds : kFails);
  } catch (const jc::Error& e) {
    if (e.code() != jc::Errc::NotSingleValued && e.code() != jc::Errc::NotSeparable)
      throw;
    result["verdict"] = "inconclusive";
    result["reason"] = e.what();
    return emit(ctx, std::move(result), kInconclusive);
  }
}

int run_generate(ReportContext& ctx, const std::string& model_path,
                 const std::string& menus_path, std::optional<std::uint64_t> seed) {
  Json model_doc = load_input(ctx, model_path);
  auto menus = jc::parse_menu_file(load_input(ctx, menus_path));
  auto spec = jc::parse_model_spec(model_doc, menus.dims);
  if (seed) spec.seed = *seed;
  auto generated = jc::generate(menus.dims, menus.menus, spec);
  std::cout << jc::dataset_to_json(generated.dataset, &generated.provenance).dump(2)
            << "\n";
  return kHolds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analyze and generate multidimensional choice datasets"};
  app.require_subcommand(1);

  std::string ds_path, set_csv, s_csv, t_csv, family_path, verify_path;
  std::string model_path, menus_path;
  bool all_singletons = false, brute = false;
  int n_dims = 0;
  std::optional<std::uint64_t> seed;

  auto* validate = app.add_subcommand("validate", "check a dataset document");
  validate->add_option("dataset", ds_path, "dataset JSON file")->required();

  auto* separability = app.add_subcommand("separability", "decide separability");
  separability->add_option("dataset", ds_path, "dataset JSON file")->required();
  separability->add_option("--set", set_csv, "comma-separated dimension labels");
  separability->add_flag("--all-singletons", all_singletons,
                         "decide via every single dimension (default)");
  separability->add_flag("--brute", brute, "check every nonempty subset");
  separability->add_option("--family", family_path,
                           "selective family JSON for the sufficiency test");

  auto* induced = app.add_subcommand("induced", "extract the choice induced on a subset");
  induced->add_option("dataset", ds_path, "dataset JSON file")->required();
  induced->add_option("--set", set_csv, "comma-separated dimension labels")->required();

  auto* betweenness = app.add_subcommand("betweenness", "check menus betweenness");
  betweenness->add_option("dataset", ds_path, "dataset JSON file")->required();
  betweenness->add_option("--s", s_csv, "first dimension subset");
  betweenness->add_option("--t", t_csv, "second dimension subset");
  betweenness->add_option("--family", family_path, "selective family JSON");

  auto* richness = app.add_subcommand("richness", "check menu-family richness on a subset");
  richness->add_option("dataset", ds_path, "dataset JSON file")->required();
  richness->add_option("--set", set_csv, "comma-separated dimension labels")->required();

  auto* selective = app.add_subcommand("selective", "build or verify selective families");
  selective->add_option("--dims", n_dims, "number of dimensions")->required();
  selective->add_option("--verify", verify_path, "family JSON file to verify");

  auto* reveal = app.add_subcommand("reveal", "compute the revealed preference");
  reveal->add_option("dataset", ds_path, "dataset JSON file")->required();

  auto* rationalizable = app.add_subcommand("rationalizable", "decide rationalizability");
  rationalizable->add_option("dataset", ds_path, "dataset JSON file")->required();
  rationalizable->add_option("--family", family_path,
                             "selective family JSON for the shortcut");

  auto* generate = app.add_subcommand("generate", "generate a dataset from a model");
  generate->add_option("--model", model_path, "model JSON file")->required();
  generate->add_option("--menus", menus_path, "menus JSON file")->required();
  generate->add_option("--seed", seed, "seed for the random model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  ReportContext ctx;
  ctx.verb = app.get_subcommands().front()->get_name();
  try {
    if (validate->parsed()) return run_validate(ctx, ds_path);
    if (separability->parsed())
      return run_separability(ctx, ds_path, set_csv, all_singletons, brute, family_path);
    if (induced->parsed()) return run_induced(ctx, ds_path, set_csv);
    if (betweenness->parsed())
      return run_betweenness(ctx, ds_path, s_csv, t_csv, family_path);
    if (richness->parsed()) return run_richness(ctx, ds_path, set_csv);
    if (selective->parsed()) return run_selective(ctx, n_dims, verify_path);
    if (reveal->parsed()) return run_reveal(ctx, ds_path);
    if (rationalizable->parsed()) return run_rationalizable(ctx, ds_path, family_path);
    if (generate->parsed()) return run_generate(ctx, model_path, menus_path, seed);
  } catch (const jc::Error& e) {
    // e.what() already carries the error-code name as its prefix.
    std::cerr << "jointchoice: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "jointchoice: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
