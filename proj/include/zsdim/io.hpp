#pragma once

// JSON and CSV formats: instance specifications, trace families with
// witnesses, labeled trees, cover certificates and shatter tables.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "zsdim/constructions.hpp"
#include "zsdim/error.hpp"
#include "zsdim/exactalg.hpp"
#include "zsdim/littlestone.hpp"
#include "zsdim/maximality.hpp"
#include "zsdim/setsystem.hpp"
#include "zsdim/zerosets.hpp"

namespace zsdim::io {

using nlohmann::json;

inline Field field_from_json(const json& j) {
  if (j.is_object()) {
    if (!j.contains("prime")) throw InvalidInput("field object needs a 'prime' entry");
    return Field::prime(j.at("prime").get<std::uint64_t>());
  }
  if (!j.is_string()) throw InvalidInput("field must be \"Q\", \"rational\", \"F_p\" or {\"prime\": p}");
  const auto s = j.get<std::string>();
  if (s == "Q" || s == "rational") return Field::rational();
  if (s.rfind("F_", 0) == 0) {
    try {
      return Field::prime(std::stoull(s.substr(2)));
    } catch (const std::logic_error&) {
      throw InvalidInput("bad field '" + s + "'");
    }
  }
  throw InvalidInput("unknown field '" + s + "'");
}

inline json to_json(const Field& f) { return f.name(); }

inline Scalar scalar_from_json(const Field& f, const json& j) {
  if (j.is_number_integer()) return Scalar(f, j.get<long long>());
  if (j.is_string()) return Scalar::parse(f, j.get<std::string>());
  throw InvalidInput("scalar must be an integer or a rational string, got " + j.dump());
}

inline json to_json(const Scalar& s) { return s.str(); }

inline json to_json(const std::vector<Scalar>& v) {
  json out = json::array();
  for (const auto& s : v) out.push_back(to_json(s));
  return out;
}

inline json to_json(const Vector& v) { return to_json(std::vector<Scalar>(v.begin(), v.end())); }

inline Vector vector_from_json(const Field& f, const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidInput("vector must be a non-empty array");
  std::vector<Scalar> out;
  for (const auto& e : j) out.push_back(scalar_from_json(f, e));
  return Vector(std::move(out));
}

/// A bare scalar is a one-coordinate point.
inline Point point_from_json(const Field& f, const json& j) {
  if (!j.is_array()) return Point{scalar_from_json(f, j)};
  Point p;
  for (const auto& e : j) p.push_back(scalar_from_json(f, e));
  if (p.empty()) throw InvalidInput("point must have at least one coordinate");
  return p;
}

inline std::vector<std::size_t> mask_to_indices(Mask m) { return mask_indices(m); }

inline Mask indices_to_mask(const json& j, std::size_t width) {
  Mask m = 0;
  for (const auto& e : j) {
    const auto i = e.get<std::size_t>();
    if (i >= width) throw InvalidInput("set index " + std::to_string(i) + " outside a ground set of " + std::to_string(width));
    m |= Mask{1} << i;
  }
  return m;
}

/// Named presets accepted by --instance: NAME or NAME:d.
inline json preset_instance(const std::string& spec) {
  std::string name = spec;
  std::optional<std::size_t> d;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    name = spec.substr(0, colon);
    try {
      d = std::stoul(spec.substr(colon + 1));
    } catch (const std::logic_error&) {
      throw InvalidInput("bad dimension in '" + spec + "'");
    }
  }
  if (name == "moment_curve") return {{"field", "Q"}, {"builtin", "moment_curve"}, {"d", d.value_or(3)}};
  if (name == "high_vcden") return {{"field", "Q"}, {"builtin", "high_vcden"}, {"d", d.value_or(3)}};
  if (d) throw InvalidInput("preset '" + name + "' takes no dimension");
  if (name == "conics") return {{"field", "Q"}, {"builtin", "conics"}};
  if (name == "ellipse") return {{"field", "Q"}, {"builtin", "ellipse_carrier"}};
  if (name == "affine_f3") return {{"field", "F_3"}, {"variables", {"x"}}, {"polynomials", {"1", "x"}}};
  if (name == "x_2x") return {{"field", "Q"}, {"variables", {"x"}}, {"polynomials", {"x", "2*x"}}};
  if (name == "x_x3_f3") return {{"field", "F_3"}, {"variables", {"x"}}, {"polynomials", {"x", "x^3"}}};
  if (name == "two_lines") {
    return {{"field", "Q"}, {"vectors", {{1, 0}, {2, 0}, {3, 0}, {0, 1}, {0, 2}, {0, 3}}}};
  }
  throw InvalidInput("unknown instance preset '" + name + "'");
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"moment_curve", "conics", "ellipse", "high_vcden", "affine_f3",
                                              "x_2x", "x_x3_f3", "two_lines"};
  return names;
}

inline Instance instance_from_json(const json& spec) {
  if (spec.is_string()) return instance_from_json(preset_instance(spec.get<std::string>()));
  if (!spec.is_object()) throw InvalidInput("instance must be a preset name or an object");
  for (const auto& [key, value] : spec.items()) {
    static const std::set<std::string> known{"field", "builtin", "d", "polynomials", "variables", "vectors", "name", "stream"};
    if (!known.count(key)) throw InvalidInput("unknown instance key '" + key + "'");
  }
  const Field f = field_from_json(spec.value("field", json("Q")));
  Instance inst;
  if (spec.contains("builtin")) {
    const auto b = spec.at("builtin").get<std::string>();
    const auto d = spec.value("d", std::size_t{3});
    if (b == "moment_curve") {
      inst = moment_curve(f, d);
    } else if (b == "conics") {
      inst = conics(f);
    } else if (b == "ellipse_carrier") {
      inst = ellipse_carrier(f);
    } else if (b == "high_vcden") {
      inst = high_vcden(f, d);
    } else {
      throw InvalidInput("unknown builtin family '" + b + "'");
    }
  } else if (spec.contains("polynomials")) {
    const auto vars = spec.value("variables", std::vector<std::string>{"x"});
    const auto polys = spec.at("polynomials").get<std::vector<std::string>>();
    std::string label = "(";
    for (std::size_t i = 0; i < polys.size(); ++i) label += (i ? ", " : "") + polys[i];
    inst = polynomial_instance(spec.value("name", label + ") over " + f.name()), f, vars, polys);
  } else if (spec.contains("vectors")) {
    std::vector<Vector> vs;
    for (const auto& v : spec.at("vectors")) vs.push_back(vector_from_json(f, v));
    if (vs.empty()) throw InvalidInput("explicit instance needs at least one vector");
    const std::size_t d = vs.front().size();
    inst = explicit_vectors(spec.value("name", "explicit vectors over " + f.name()), f, d, std::move(vs));
  } else {
    throw InvalidInput("instance needs 'builtin', 'polynomials' or 'vectors'");
  }
  if (spec.contains("name")) inst.name = spec.at("name").get<std::string>();
  if (spec.contains("stream")) {
    std::vector<Point> pts;
    for (const auto& p : spec.at("stream")) pts.push_back(point_from_json(f, p));
    inst.stream = PointStream::explicit_points(std::move(pts));
  }
  return inst;
}

inline json to_json(const std::vector<Point>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back(to_json(p));
  return out;
}

inline json family_to_json(const SetFamily& fam) {
  json sets = json::array();
  json witnesses = json::array();
  std::optional<Field> field;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    sets.push_back(mask_to_indices(fam.sets()[i]));
    if (fam.witness(i)) {
      field = fam.witness(i)->field();
      witnesses.push_back(to_json(*fam.witness(i)));
    } else {
      witnesses.push_back(nullptr);
    }
  }
  json out{{"ground", fam.ground().labels()}, {"sets", sets}};
  if (field) {
    out["field"] = to_json(*field);
    out["witnesses"] = witnesses;
  }
  return out;
}

inline SetFamily family_from_json(const json& j, std::optional<Field> witness_field = std::nullopt) {
  if (!witness_field && j.contains("field")) witness_field = field_from_json(j.at("field"));
  SetFamily fam{GroundSet(j.at("ground").get<std::vector<std::string>>())};
  const auto& sets = j.at("sets");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    std::optional<Vector> w;
    if (witness_field && j.contains("witnesses") && !j.at("witnesses").at(i).is_null()) {
      w = vector_from_json(*witness_field, j.at("witnesses").at(i));
    }
    if (!fam.insert(indices_to_mask(sets[i], fam.width()), std::move(w))) {
      throw InvalidInput("duplicate set at position " + std::to_string(i));
    }
  }
  return fam;
}

inline json zero_set_family_to_json(const json& instance_spec, const ZeroSetFamily& z) {
  json out = family_to_json(z.family);
  out["kind"] = "zero_set_family";
  out["instance"] = instance_spec;
  out["sample"] = to_json(z.sample.points);
  out["method"] = z.method == EnumerationMethod::flat_lattice ? "flat_lattice" : "projective_bruteforce";
  return out;
}

/// Rebuilds the instance and sample and re-derives every membership bit from
/// the stored witnesses.
inline bool zero_set_family_reverifies(const json& j) {
  const Instance inst = instance_from_json(j.at("instance"));
  std::vector<Point> pts;
  for (const auto& p : j.at("sample")) pts.push_back(point_from_json(inst.field, p));
  const Sample sample = make_sample(inst, std::move(pts));
  const auto& sets = j.at("sets");
  const auto& witnesses = j.at("witnesses");
  if (sets.size() != witnesses.size()) return false;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const Vector w = vector_from_json(inst.field, witnesses[i]);
    if (w.is_zero() || trace_of(sample, w) != indices_to_mask(sets[i], sample.size())) return false;
  }
  return true;
}

inline json tree_to_json(const LabeledTree& tree, const SetFamily& fam) {
  json nodes = json::object();
  for (std::size_t k = 0; k < tree.depth(); ++k) {
    for (std::size_t i = 0; i < (std::size_t{1} << k); ++i) nodes[LabeledTree::path(k, i)] = tree.node(k, i);
  }
  json leaves = json::object();
  json good = json::array();
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) {
    const std::string key = LabeledTree::path(tree.depth(), i);
    leaves[key] = tree.leaf(i);
    if (leaf_well_labeled(tree, fam, i)) good.push_back(key);
  }
  return {{"kind", "labeled_tree"},
          {"depth", tree.depth()},
          {"family", family_to_json(fam)},
          {"nodes", nodes},
          {"leaves", leaves},
          {"well_labeled", good},
          {"well_labeled_count", good.size()}};
}

struct ImportedTree {
  LabeledTree tree;
  SetFamily family;
};

/// Parses a tree bundle and re-checks the claimed well-labeled leaves.
inline ImportedTree tree_from_json(const json& j) {
  if (j.value("kind", "") != "labeled_tree") throw InvalidInput("not a labeled tree bundle");
  const auto depth = j.at("depth").get<std::size_t>();
  SetFamily fam = family_from_json(j.at("family"));
  LabeledTree tree(depth);
  const auto& nodes = j.at("nodes");
  const auto& leaves = j.at("leaves");
  if (nodes.size() != (std::size_t{1} << depth) - 1 || leaves.size() != (std::size_t{1} << depth)) {
    throw InvalidInput("tree of depth " + std::to_string(depth) + " is not totally labeled");
  }
  for (const auto& [key, value] : nodes.items()) {
    if (key.size() >= depth) throw InvalidInput("node key '" + key + "' too long");
    tree.set_node(key.size(), LabeledTree::path_index(key), value.get<std::size_t>());
  }
  for (const auto& [key, value] : leaves.items()) {
    if (key.size() != depth) throw InvalidInput("leaf key '" + key + "' has the wrong length");
    tree.set_leaf(LabeledTree::path_index(key), value.get<std::size_t>());
  }
  tree.validate(fam);
  std::vector<std::string> claimed = j.value("well_labeled", std::vector<std::string>{});
  std::vector<std::string> actual;
  for (std::size_t i = 0; i < tree.leaf_count(); ++i) {
    if (leaf_well_labeled(tree, fam, i)) actual.push_back(LabeledTree::path(depth, i));
  }
  if (claimed != actual) throw InvalidInput("claimed well-labeled leaves do not re-verify");
  return ImportedTree{std::move(tree), std::move(fam)};
}

inline json cover_to_json(const CoverCertificate& c) {
  json subs = json::array();
  for (const auto& s : c.subspaces) {
    json span = json::array();
    for (const auto& v : s) span.push_back(to_json(v));
    subs.push_back(span);
  }
  return {{"field", to_json(c.field)}, {"dim", c.dim}, {"subspaces", subs}};
}

inline CoverCertificate cover_from_json(const json& j, const Field& f, std::size_t d) {
  CoverCertificate c{f, d, {}};
  const json& subs = j.is_array() ? j : j.at("subspaces");
  for (const auto& s : subs) {
    std::vector<Vector> span;
    for (const auto& v : s) span.push_back(vector_from_json(f, v));
    c.subspaces.push_back(std::move(span));
  }
  c.validate();
  return c;
}

inline json to_json(const DotClaim& c) {
  const char* expect = c.expect == DotClaim::Expect::zero ? "= 0" : c.expect == DotClaim::Expect::one ? "= 1" : "!= 0";
  return {{"witness", c.witness}, {"point", c.point}, {"value", to_json(c.value)}, {"claim", expect}, {"holds", c.holds()}};
}

inline json to_json(const Transcript& t) {
  json out = json::array();
  for (const auto& c : t) out.push_back(to_json(c));
  return out;
}

struct ShatterRow {
  std::size_t n = 0;
  std::uint64_t pi = 0;
  std::uint64_t rho = 0;
  std::uint64_t binom_le_dminus1 = 0;
  bool maximal_vc() const noexcept { return pi == binom_le_dminus1; }
  bool maximal_ldim() const noexcept { return rho == binom_le_dminus1; }
};

inline std::string shatter_csv(const std::vector<ShatterRow>& rows) {
  std::ostringstream out;
  out << "n,pi,rho,binom_le_dminus1,maximal_vc,maximal_ldim\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.pi << ',' << r.rho << ',' << r.binom_le_dminus1 << ',' << (r.maximal_vc() ? "true" : "false")
        << ',' << (r.maximal_ldim() ? "true" : "false") << '\n';
  }
  return out.str();
}

inline json to_json(const ShatterRow& r) {
  return {{"n", r.n},
          {"pi", r.pi},
          {"rho", r.rho},
          {"binom_le_dminus1", r.binom_le_dminus1},
          {"maximal_vc", r.maximal_vc()},
          {"maximal_ldim", r.maximal_ldim()}};
}

}  // namespace zsdim::io
