#pragma once

// Command implementations behind the zsdim executable. Each command returns a
// Report whose payload is a deterministic function of the configuration.

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "zsdim/constructions.hpp"
#include "zsdim/error.hpp"
#include "zsdim/io.hpp"
#include "zsdim/littlestone.hpp"
#include "zsdim/maximality.hpp"
#include "zsdim/setsystem.hpp"
#include "zsdim/zerosets.hpp"

namespace zsdim::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kAssertionFailed = 1, kResourceLimit = 2, kInvalidInput = 3 };

struct RunConfig {
  json instance = "moment_curve";
  bool instance_given = false;
  json family;  // a raw set system instead of an instance
  json sample;
  json cover;
  std::size_t n_max = 0;  // 0: derived from the sample
  std::size_t depth_cap = kDefaultDepthCap;
  std::size_t budget = kDefaultScanBudget;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 1;

  void validate() const {
    if (depth_cap == 0 || depth_cap > kMaxTreeDepth) {
      throw InvalidInput("depth cap must be between 1 and " + std::to_string(kMaxTreeDepth));
    }
    if (budget == 0) throw InvalidInput("budget must be positive");
    if (format != "json" && format != "csv") throw InvalidInput("format must be json or csv");
  }

  json echo() const {
    json j{{"instance", instance}, {"n_max", n_max},   {"depth_cap", depth_cap}, {"budget", budget},
           {"format", format},     {"seed", seed},     {"out", out}};
    if (!family.is_null()) j["family"] = family;
    if (!sample.is_null()) j["sample"] = sample;
    if (!cover.is_null()) j["cover"] = cover;
    return j;
  }

  /// Applies the keys of a config file; unknown keys are rejected.
  void merge(const json& j) {
    if (!j.is_object()) throw InvalidInput("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "instance") {
        instance = value;
        instance_given = true;
      } else if (key == "family") {
        family = value;
      } else if (key == "sample") {
        sample = value;
      } else if (key == "cover") {
        cover = value;
      } else if (key == "n_max" || key == "n-max") {
        n_max = value.get<std::size_t>();
      } else if (key == "depth_cap" || key == "depth-cap") {
        depth_cap = value.get<std::size_t>();
      } else if (key == "budget") {
        budget = value.get<std::size_t>();
      } else if (key == "out") {
        out = value.get<std::string>();
      } else if (key == "format") {
        format = value.get<std::string>();
      } else if (key == "seed") {
        seed = value.get<std::uint64_t>();
      } else {
        throw InvalidInput("unknown config key '" + key + "'");
      }
    }
  }
};

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
}

/// --instance accepts a preset name (optionally NAME:d) or a path to a JSON spec.
inline json resolve_instance_arg(const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) return read_json_file(arg);
  return io::preset_instance(arg);
}

struct Check {
  std::string name;
  std::string assertion;  // the module operation the check ran
  bool passed = false;
  json detail;
};

struct Report {
  Report() = default;
  Report(std::string cmd, json cfg) : command(std::move(cmd)), config(std::move(cfg)) {}

  std::string command;
  json config;
  json results = json::object();
  std::vector<Check> checks;
  json timings_ms = json::object();

  void check(std::string name, std::string assertion, bool passed, json detail = nullptr) {
    checks.push_back(Check{std::move(name), std::move(assertion), passed, std::move(detail)});
  }

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }

  /// Everything except timings.
  json payload() const {
    json cs = json::array();
    for (const auto& c : checks) {
      json e{{"name", c.name}, {"assertion", c.assertion}, {"passed", c.passed}};
      if (!c.detail.is_null()) e["detail"] = c.detail;
      cs.push_back(e);
    }
    return {{"command", command}, {"config", config}, {"results", results}, {"checks", cs}, {"all_passed", all_passed()}};
  }

  json to_json() const {
    json j = payload();
    j["timings_ms"] = timings_ms;
    return j;
  }

  int exit_code() const { return all_passed() ? kOk : kAssertionFailed; }
};

class Stopwatch {
 public:
  explicit Stopwatch(Report& r, std::string label)
      : report_(r), label_(std::move(label)), start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    report_.timings_ms[label_] = ms;
  }

 private:
  Report& report_;
  std::string label_;
  std::chrono::steady_clock::time_point start_;
};

inline json verdict_to_json(const IndependenceVerdict& v) {
  const char* kind = v.kind == IndependenceVerdict::Kind::independent ? "independent"
                     : v.kind == IndependenceVerdict::Kind::dependent ? "dependent"
                                                                        : "inconclusive";
  json j{{"verdict", kind}, {"scanned", v.scanned}, {"image_rank", v.image_rank}, {"stream_exhausted", v.stream_exhausted}};
  if (!v.points.empty()) j["points"] = io::to_json(v.points);
  if (v.annihilator) j["annihilator"] = io::to_json(*v.annihilator);
  return j;
}

inline json conditions_to_json(const IndependenceConditions& c) {
  auto opt = [](const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); };
  json j{{"functions_independent", opt(c.functions_independent)},
         {"no_vanishing_combination", opt(c.no_vanishing_combination)},
         {"image_spans", opt(c.image_spans)},
         {"consistent", c.consistent()}};
  if (c.vanishing_combination) j["vanishing_combination"] = io::to_json(*c.vanishing_combination);
  return j;
}

/// Everything a command needs: the instance (or raw family), its sample, and
/// the enumerated trace family.
struct Workload {
  json spec;
  std::optional<Instance> inst;
  std::optional<IndependenceVerdict> verdict;
  std::optional<DualBasis> basis;
  std::optional<Sample> sample;
  std::string sample_origin;
  std::optional<ZeroSetFamily> zfam;
  std::optional<MaxLittlestoneTree> max_tree;
  std::optional<CoverCertificate> cover;
  SetFamily family;

  bool independent() const { return verdict && verdict->kind == IndependenceVerdict::Kind::independent; }
  std::size_t dim() const { return inst ? inst->dim : 0; }
};

namespace detail {

inline std::vector<Point> extend_from_stream(const Instance& inst, std::vector<Point> pts, std::size_t extra) {
  std::set<std::string> have;
  for (const auto& p : pts) have.insert(point_label(p));
  auto next = inst.stream.open();
  std::size_t added = 0;
  while (added < extra && pts.size() < kGroundSoftLimit) {
    auto p = next();
    if (!p) break;
    if (have.insert(point_label(*p)).second) {
      pts.push_back(std::move(*p));
      ++added;
    }
  }
  return pts;
}

inline std::vector<Point> finite_prefix(const Instance& inst, std::size_t n) { return inst.stream.prefix(n); }

}  // namespace detail

inline Workload prepare(const RunConfig& cfg) {
  Workload w;
  if (!cfg.family.is_null()) {
    w.family = io::family_from_json(cfg.family);
    w.sample_origin = "explicit family";
    return w;
  }
  w.spec = cfg.instance.is_string() ? resolve_instance_arg(cfg.instance.get<std::string>()) : cfg.instance;
  w.inst = io::instance_from_json(w.spec);
  const Instance& inst = *w.inst;
  w.verdict = linearly_independent(inst, std::max(cfg.budget, inst.dim));
  if (!cfg.cover.is_null()) w.cover = io::cover_from_json(cfg.cover, inst.field, inst.dim);

  const json& s = cfg.sample;
  std::vector<Point> pts;
  if (s.is_null() || s.contains("dual_basis")) {
    const std::size_t wanted = cfg.n_max > inst.dim ? cfg.n_max - inst.dim : 0;
    const std::size_t extra = s.is_null() ? std::max<std::size_t>(2, wanted) : s.at("dual_basis").value("extra", std::size_t{2});
    if (w.independent()) {
      w.basis = dual_basis(inst, cfg.budget);
      pts = detail::extend_from_stream(inst, w.basis->points, extra);
      w.sample_origin = "dual basis points plus " + std::to_string(pts.size() - inst.dim) + " stream points";
    } else if (s.is_null()) {
      pts = detail::finite_prefix(inst, std::max(inst.dim + 2, cfg.n_max));
      w.sample_origin = "stream prefix";
    } else {
      throw InvalidInput("a dual-basis sample needs a linearly independent instance");
    }
  } else if (s.contains("points")) {
    for (const auto& p : s.at("points")) pts.push_back(io::point_from_json(inst.field, p));
    w.sample_origin = "explicit points";
  } else if (s.contains("prefix")) {
    pts = detail::finite_prefix(inst, s.at("prefix").get<std::size_t>());
    w.sample_origin = "stream prefix";
  } else if (s.contains("independence_sequence")) {
    const auto n = s.at("independence_sequence").get<std::size_t>();
    pts = independence_sequence(inst, n, cfg.budget).points;
    w.sample_origin = "independence sequence";
  } else if (s.contains("max_tree")) {
    if (!w.spec.is_object() || w.spec.value("builtin", "") != "high_vcden") {
      throw InvalidInput("a max_tree sample needs the high_vcden builtin");
    }
    w.max_tree = high_vcden_max_tree(inst.field, inst.dim, s.at("max_tree").get<std::size_t>());
    pts = w.max_tree->sample.points;
    w.sample_origin = "maximal Littlestone tree points";
  } else if (s.contains("certificate")) {
    if (!w.cover) throw InvalidInput("a certificate sample needs a cover");
    pts = detail::finite_prefix(inst, w.cover->k() * (inst.dim - 1) + 1);
    w.sample_origin = "certificate sample";
  } else {
    throw InvalidInput("unknown sample kind " + s.dump());
  }
  if (pts.empty()) throw InvalidInput("empty sample");
  if (pts.size() > kGroundSoftLimit * 2 + 1 && !w.max_tree) {
    throw ResourceLimit("sample of " + std::to_string(pts.size()) + " points too large");
  }
  w.sample = make_sample(inst, std::move(pts));
  w.zfam = enumerate_family(inst, *w.sample);
  w.family = w.zfam->family;
  return w;
}

inline json workload_to_json(const Workload& w) {
  json j;
  if (w.inst) {
    j["instance"] = {{"name", w.inst->name},
                     {"field", io::to_json(w.inst->field)},
                     {"d", w.inst->dim},
                     {"stream", w.inst->stream.description()},
                     {"spec", w.spec}};
  }
  if (w.verdict) j["independence"] = verdict_to_json(*w.verdict);
  j["sample_origin"] = w.sample_origin;
  if (w.sample) j["sample"] = io::to_json(w.sample->points);
  j["family"] = io::family_to_json(w.family);
  if (w.zfam) j["family"]["method"] = w.zfam->method == EnumerationMethod::flat_lattice ? "flat_lattice" : "projective_bruteforce";
  j["family_size"] = w.family.size();
  return j;
}

/// d-1 for instances; for a raw family its own VC dimension (-1 when empty).
inline long long reference_dim(const Workload& w) {
  if (w.inst) return static_cast<long long>(w.dim()) - 1;
  const Dim vc = vcdim(w.family);
  return vc.is_neg_infinity() ? -1 : vc.value();
}

inline std::size_t default_n_max(const RunConfig& cfg, const Workload& w) {
  if (cfg.n_max) return std::min(cfg.n_max, w.family.width());
  return std::min<std::size_t>(w.family.width(), 8);
}

inline std::vector<io::ShatterRow> shatter_rows(const SetFamily& fam, std::size_t n_max, std::size_t depth_cap,
                                                long long dminus1) {
  LittlestoneSearch search(fam, depth_cap);
  std::vector<io::ShatterRow> rows;
  for (std::size_t n = 0; n <= n_max; ++n) {
    rows.push_back(io::ShatterRow{n, pi(fam, n), search.rho(n), dminus1 < 0 ? 0 : binom_le(n, dminus1)});
  }
  return rows;
}

/// The bound checks shared by analyze and shatter-fn.
inline void profile_checks(Report& r, const SetFamily& fam, const std::vector<io::ShatterRow>& rows, Dim vc, Dim ld,
                           std::optional<std::size_t> theorem_d) {
  bool pi_le_rho = true, sauer = true, bhaskar = true, upper = true;
  json violations = json::array();
  for (const auto& row : rows) {
    if (row.pi > row.rho) pi_le_rho = false;
    if (!vc.is_neg_infinity() && row.pi > binom_le(row.n, vc.value())) sauer = false;
    if (!ld.is_neg_infinity() && row.rho > binom_le(row.n, ld.value())) bhaskar = false;
    if (theorem_d && (row.pi > row.binom_le_dminus1 || row.rho > row.binom_le_dminus1)) {
      upper = false;
      violations.push_back(io::to_json(row));
    }
  }
  r.check("pi(n) <= rho(n) for every n", "setsystem.pi, littlestone.rho", pi_le_rho);
  r.check("pi(n) <= C(n, <= vcdim)", "setsystem.pi, setsystem.vcdim", sauer);
  r.check("rho(n) <= C(n, <= ldim)", "littlestone.rho, littlestone.ldim", bhaskar);
  r.check("vcdim <= ldim", "setsystem.vcdim, littlestone.ldim", vc <= ld, {{"vcdim", vc.str()}, {"ldim", ld.str()}});
  if (theorem_d) {
    r.check("pi and rho bounded by C(n, <= d-1)", "zerosets.enumerate_family", upper, violations);
  }
  (void)fam;
}

inline Report cmd_analyze(const RunConfig& cfg) {
  Report r{"analyze", cfg.echo()};
  Workload w;
  {
    Stopwatch t(r, "prepare");
    w = prepare(cfg);
  }
  r.results = workload_to_json(w);
  const SetFamily& fam = w.family;
  Dim vc = Dim::neg_infinity(), ld = Dim::neg_infinity();
  std::vector<io::ShatterRow> rows;
  {
    Stopwatch t(r, "dimensions");
    vc = vcdim(fam);
    ld = ldim(fam);
    rows = shatter_rows(fam, default_n_max(cfg, w), cfg.depth_cap, reference_dim(w));
  }
  r.results["vcdim"] = vc.str();
  r.results["ldim"] = ld.str();
  if (auto s = largest_shattered_set(fam)) r.results["largest_shattered_set"] = mask_indices(*s);
  json prof = json::array();
  for (const auto& row : rows) prof.push_back(io::to_json(row));
  r.results["profiles"] = prof;

  if (w.inst) {
    const IndependenceConditions cond = independence_conditions(*w.inst, cfg.budget);
    r.results["conditions"] = conditions_to_json(cond);
    r.check("independence conditions agree", "zerosets.independence_conditions", cond.consistent());
    r.check("witnesses reproduce membership", "zerosets.enumerate_family", witnesses_verify(*w.zfam));
  }
  const bool independent = w.independent();
  profile_checks(r, fam, rows, vc, ld, independent ? std::optional(w.dim()) : std::nullopt);
  if (independent) {
    const int target = static_cast<int>(w.dim()) - 1;
    r.check("vcdim <= d-1", "setsystem.vcdim", vc <= Dim::of(target), {{"vcdim", vc.str()}, {"d", w.dim()}});
    r.check("ldim <= d-1", "littlestone.ldim", ld <= Dim::of(target), {{"ldim", ld.str()}, {"d", w.dim()}});
    if (w.basis) {
      const ShatteredSet sh = shattered_set(*w.basis);
      r.results["construction"] = {{"dual_basis_points", io::to_json(w.basis->points)},
                                   {"kronecker", io::to_json(w.basis->kronecker_transcript())},
                                   {"shattered_points", io::to_json(sh.points)}};
      json g = json::array();
      for (std::size_t j = 0; j < w.dim(); ++j) g.push_back(io::to_json(w.basis->coeffs.row(j)));
      r.results["construction"]["G"] = g;
      Mask shattered = low_bits(w.dim() - 1);
      r.check("dual basis Kronecker property", "constructions.dual_basis", w.basis->kronecker_holds());
      r.check("first d-1 dual basis points shattered", "constructions.shattered_set",
              transcript_holds(sh.transcript) && shatters(fam, shattered));
      r.check("vcdim = d-1", "setsystem.vcdim", vc == Dim::of(target), {{"vcdim", vc.str()}});
      r.check("ldim = d-1", "littlestone.ldim", ld == Dim::of(target), {{"ldim", ld.str()}});
    }
  }
  return r;
}

inline Report cmd_shatter_fn(const RunConfig& cfg) {
  Report r{"shatter-fn", cfg.echo()};
  Workload w;
  {
    Stopwatch t(r, "prepare");
    w = prepare(cfg);
  }
  r.results = workload_to_json(w);
  r.results.erase("family");
  const long long dminus1 = reference_dim(w);
  std::vector<io::ShatterRow> rows;
  Dim vc = Dim::neg_infinity(), ld = Dim::neg_infinity();
  {
    Stopwatch t(r, "profiles");
    rows = shatter_rows(w.family, default_n_max(cfg, w), cfg.depth_cap, dminus1);
    vc = vcdim(w.family);
    ld = ldim(w.family);
  }
  json table = json::array();
  for (const auto& row : rows) table.push_back(io::to_json(row));
  r.results["table"] = table;
  r.results["csv"] = io::shatter_csv(rows);
  r.results["vcdim"] = vc.str();
  r.results["ldim"] = ld.str();
  profile_checks(r, w.family, rows, vc, ld, w.independent() ? std::optional(w.dim()) : std::nullopt);
  if (w.max_tree) {
    const auto leaves = count_well_labeled(w.max_tree->tree, w.max_tree->family);
    const auto n = w.max_tree->tree.depth();
    r.results["max_tree_well_labeled"] = leaves;
    r.check("explicit tree has C(n, <= d-1) well-labeled leaves", "constructions.high_vcden_max_tree",
            leaves == binom_le(n, dminus1), {{"n", n}, {"leaves", leaves}});
  }
  return r;
}

inline std::string write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const auto path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("write to '" + path + "' failed");
  return path;
}

inline Report cmd_export(const RunConfig& cfg) {
  if (cfg.out.empty()) throw InvalidInput("export needs --out");
  Report r{"export", cfg.echo()};
  Workload w;
  {
    Stopwatch t(r, "prepare");
    w = prepare(cfg);
  }
  const long long dminus1 = reference_dim(w);
  const auto rows = shatter_rows(w.family, default_n_max(cfg, w), cfg.depth_cap, dminus1);
  json files = json::array();
  files.push_back(write_file(cfg.out, "shatter.csv", io::shatter_csv(rows)));

  json fam_json = w.zfam ? io::zero_set_family_to_json(w.spec, *w.zfam) : io::family_to_json(w.family);
  files.push_back(write_file(cfg.out, "family.json", fam_json.dump(2) + "\n"));
  if (w.zfam) {
    r.check("witness bundle re-verifies every membership bit", "zerosets.zero_set",
            io::zero_set_family_reverifies(json::parse(fam_json.dump())));
  }

  LabeledTree tree;
  SetFamily tree_family;
  if (w.max_tree) {
    tree = w.max_tree->tree;
    tree_family = w.max_tree->family;
  } else if (!w.family.empty()) {
    tree = ldim_witness(w.family);
    tree_family = w.family;
  }
  if (!tree_family.empty() || w.max_tree) {
    const std::string text = io::tree_to_json(tree, tree_family).dump(2) + "\n";
    files.push_back(write_file(cfg.out, "tree.json", text));
    const auto back = io::tree_from_json(json::parse(text));
    const std::string again = io::tree_to_json(back.tree, back.family).dump(2) + "\n";
    r.check("tree round trip is byte-identical", "littlestone.leaf_well_labeled", again == text,
            {{"well_labeled", count_well_labeled(back.tree, back.family)}});
  }

  if (w.basis) {
    const ShatteredSet sh = shattered_set(*w.basis);
    json bundle{{"kind", "construction"},
                {"instance", w.spec},
                {"dual_basis_points", io::to_json(w.basis->points)},
                {"kronecker", io::to_json(w.basis->kronecker_transcript())},
                {"shattered_points", io::to_json(sh.points)},
                {"shattering", io::to_json(sh.transcript)}};
    bool ok = w.basis->kronecker_holds() && transcript_holds(sh.transcript);
    try {
      const std::size_t n = std::min<std::size_t>(rows.empty() ? 0 : rows.back().n, 6);
      const auto seq = independence_sequence(*w.inst, max_vc_trace_length(n, w.dim()), cfg.budget);
      const auto mt = max_vc_trace(seq, n);
      bundle["independence_sequence"] = io::to_json(seq.points);
      bundle["max_vc_trace"] = io::family_to_json(mt.family);
      bundle["max_vc_transcript"] = io::to_json(mt.transcript);
      ok = ok && transcript_holds(mt.transcript);
    } catch (const SearchExhausted& e) {
      bundle["independence_sequence_exhausted"] = {{"message", e.what()},
                                                   {"partial", io::to_json(e.partial())},
                                                   {"blocking", e.blocking()}};
    }
    files.push_back(write_file(cfg.out, "construction.json", bundle.dump(2) + "\n"));
    r.check("construction transcripts hold", "constructions", ok);
  }
  if (w.cover) {
    const auto v = non_maximality_certificate(*w.inst, *w.cover, cfg.budget);
    json cert = io::cover_to_json(*w.cover);
    cert["kind"] = "cover_certificate";
    cert["status"] = v.status == NonMaximalityVerdict::Status::certified ? "certified" : "refuted";
    cert["n"] = v.n;
    cert["trace_count"] = v.trace_count;
    cert["bound"] = v.bound;
    if (v.escaping_point) cert["escaping_point"] = io::to_json(*v.escaping_point);
    files.push_back(write_file(cfg.out, "cover.json", cert.dump(2) + "\n"));
  }
  r.results["files"] = files;
  return r;
}

/// Re-checks a previously exported bundle (tree, zero-set family or plain family).
inline Report cmd_verify_bundle(const std::string& path) {
  Report r{"verify-bundle", {{"path", path}}};
  const json j = read_json_file(path);
  const std::string kind = j.value("kind", "");
  r.results["kind"] = kind.empty() ? "family" : kind;
  if (kind == "labeled_tree") {
    const auto back = io::tree_from_json(j);
    r.results["well_labeled"] = count_well_labeled(back.tree, back.family);
    r.check("claimed well-labeled leaves re-verify", "littlestone.leaf_well_labeled", true);
    r.check("canonical JSON is byte-identical", "io.tree_to_json",
            io::tree_to_json(back.tree, back.family).dump() == j.dump());
  } else if (kind == "zero_set_family") {
    r.check("every membership bit re-derives from its witness", "zerosets.zero_set", io::zero_set_family_reverifies(j));
  } else {
    const SetFamily fam = io::family_from_json(j);
    r.results["size"] = fam.size();
    r.check("family parses with distinct sets", "setsystem.SetFamily", true);
  }
  return r;
}

}  // namespace zsdim::cli
