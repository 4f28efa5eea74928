#include "systemflow/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "systemflow/error.hpp"
#include "systemflow/random.hpp"
#include "systemflow/units.hpp"

namespace systemflow {

namespace fs = std::filesystem;

namespace {

constexpr int kMaxExtendsDepth = 16;

// ---------------------------------------------------------------- reading

class Issues {
 public:
  void add(const YAML::Node& at, const std::string& field, const std::string& message) {
    ConfigIssue issue{field, -1, -1, message};
    if (at.IsDefined()) {
      const YAML::Mark m = at.Mark();
      if (m.line >= 0) {
        issue.line = m.line + 1;
        issue.column = m.column + 1;
      }
    }
    list.push_back(std::move(issue));
  }
  void add(const std::string& field, const std::string& message) {
    list.push_back({field, -1, -1, message});
  }

  std::vector<ConfigIssue> list;
};

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

std::optional<std::string> scalar(const YAML::Node& n, const std::string& field, Issues& issues) {
  if (!n.IsScalar()) {
    issues.add(n, field, "expected a scalar value");
    return std::nullopt;
  }
  return n.Scalar();
}

std::optional<double> value_of(const YAML::Node& n, const std::string& field, Dimension dim,
                               Issues& issues) {
  auto s = scalar(n, field, issues);
  if (!s) return std::nullopt;
  try {
    return parse_as(*s, dim);
  } catch (const UnitError& e) {
    issues.add(n, field, e.what());
    return std::nullopt;
  }
}

std::optional<double> ratio_of(const YAML::Node& n, const std::string& field, Issues& issues) {
  auto s = scalar(n, field, issues);
  if (!s) return std::nullopt;
  try {
    double r = parse_ratio(*s);
    if (!(r > 1)) {
      issues.add(n, field, "reduction ratio must exceed 1");
      return std::nullopt;
    }
    return r;
  } catch (const UnitError& e) {
    issues.add(n, field, e.what());
    return std::nullopt;
  }
}

/// A YAML mapping whose keys are checked against the ones actually read.
class Section {
 public:
  Section(YAML::Node node, std::string path, Issues& issues)
      : node_(std::move(node)), path_(std::move(path)), issues_(issues) {
    if (node_.IsDefined() && !node_.IsNull() && !node_.IsMap()) {
      issues_.add(node_, path_, "expected a mapping");
      valid_ = false;
    }
  }
  Section(const Section&) = delete;
  ~Section() {
    if (!valid_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.Scalar();
      if (!used_.count(key)) issues_.add(kv.first, join(path_, key), "unknown field '" + key + "'");
    }
  }

  bool valid() const { return valid_; }
  const std::string& path() const { return path_; }
  std::string field(const std::string& key) const { return join(path_, key); }
  const YAML::Node& node() const { return node_; }

  YAML::Node get(const std::string& key) {
    used_.insert(key);
    if (!valid_ || !node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    return node_[key];
  }
  bool has(const std::string& key) const {
    return valid_ && node_.IsMap() && node_[key].IsDefined() && !node_[key].IsNull();
  }

  std::optional<std::string> str(const std::string& key) {
    YAML::Node n = get(key);
    if (!n.IsDefined() || n.IsNull()) return std::nullopt;
    return scalar(n, field(key), issues_);
  }
  std::string str(const std::string& key, const std::string& fallback) {
    return str(key).value_or(fallback);
  }
  std::string required_str(const std::string& key) {
    if (!has(key)) {
      missing(key);
      get(key);
      return {};
    }
    return str(key).value_or("");
  }

  std::optional<double> quantity(const std::string& key, Dimension dim) {
    YAML::Node n = get(key);
    if (!n.IsDefined() || n.IsNull()) return std::nullopt;
    return value_of(n, field(key), dim, issues_);
  }
  double quantity(const std::string& key, Dimension dim, double fallback) {
    return quantity(key, dim).value_or(fallback);
  }
  double required(const std::string& key, Dimension dim) {
    if (!has(key)) {
      missing(key);
      get(key);
      return 0;
    }
    return quantity(key, dim).value_or(0);
  }

  std::optional<double> ratio(const std::string& key) {
    YAML::Node n = get(key);
    if (!n.IsDefined() || n.IsNull()) return std::nullopt;
    return ratio_of(n, field(key), issues_);
  }

  std::optional<bool> boolean(const std::string& key) {
    YAML::Node n = get(key);
    if (!n.IsDefined() || n.IsNull()) return std::nullopt;
    auto s = scalar(n, field(key), issues_);
    if (!s) return std::nullopt;
    if (*s == "true" || *s == "yes" || *s == "on") return true;
    if (*s == "false" || *s == "no" || *s == "off") return false;
    issues_.add(n, field(key), "expected true or false, got '" + *s + "'");
    return std::nullopt;
  }

  std::optional<std::uint64_t> unsigned_int(const std::string& key) {
    YAML::Node n = get(key);
    if (!n.IsDefined() || n.IsNull()) return std::nullopt;
    return parse_unsigned(n, field(key), issues_);
  }

  static std::optional<std::uint64_t> parse_unsigned(const YAML::Node& n, const std::string& f,
                                                     Issues& issues) {
    auto s = scalar(n, f, issues);
    if (!s) return std::nullopt;
    if (s->empty() || s->find_first_not_of("0123456789") != std::string::npos) {
      issues.add(n, f, "expected a nonnegative integer, got '" + *s + "'");
      return std::nullopt;
    }
    try {
      return std::stoull(*s);
    } catch (const std::exception&) {
      issues.add(n, f, "integer out of range: '" + *s + "'");
      return std::nullopt;
    }
  }

  void missing(const std::string& key) {
    issues_.add(node_, field(key), "required field '" + key + "' is missing");
  }

  Issues& issues() { return issues_; }

 private:
  YAML::Node node_;
  std::string path_;
  Issues& issues_;
  std::set<std::string> used_;
  bool valid_ = true;
};

std::vector<YAML::Node> sequence(const YAML::Node& n, const std::string& field, Issues& issues) {
  std::vector<YAML::Node> out;
  if (!n.IsDefined() || n.IsNull()) return out;
  if (!n.IsSequence()) {
    issues.add(n, field, "expected a list");
    return out;
  }
  for (const auto& item : n) out.push_back(item);
  return out;
}

std::optional<MergeMode> merge_of(Section& s) {
  auto m = s.str("merge");
  if (!m) return MergeMode::event_building;
  if (*m == "event_building") return MergeMode::event_building;
  if (*m == "stream") return MergeMode::stream;
  s.issues().add(s.get("merge"), s.field("merge"),
                 "merge must be event_building or stream, got '" + *m + "'");
  return std::nullopt;
}

std::optional<ScalarFunction> parse_function(const YAML::Node& n, const std::string& path,
                                             Dimension x_dim, Dimension y_dim, Issues& issues) {
  if (n.IsScalar()) {
    if (n.Scalar() == "identity") return ScalarFunction::identity();
    issues.add(n, path, "expected 'identity' or a mapping with a 'form' field");
    return std::nullopt;
  }
  Section s(n, path, issues);
  if (!s.valid()) return std::nullopt;
  const std::string form = s.required_str("form");
  try {
    if (form == "identity") return ScalarFunction::identity();
    if (form == "constant") return ScalarFunction::constant(s.required("value", y_dim));
    if (form == "linear")
      return ScalarFunction::linear(s.required("slope", Dimension::dimensionless),
                                    s.quantity("intercept", y_dim, 0.0));
    if (form == "power_law") {
      double coefficient = s.required("coefficient", y_dim);
      double exponent = s.required("exponent", Dimension::dimensionless);
      double reference = s.quantity("reference", x_dim).value_or(1.0);
      if (!(reference > 0)) {
        issues.add(s.get("reference"), s.field("reference"), "reference must be positive");
        return std::nullopt;
      }
      return ScalarFunction::power_law(coefficient, exponent, reference);
    }
    if (form == "table") {
      std::vector<double> xs, ys;
      auto points = sequence(s.get("points"), s.field("points"), issues);
      if (points.empty()) {
        issues.add(n, s.field("points"), "table needs at least one point");
        return std::nullopt;
      }
      for (std::size_t i = 0; i < points.size(); ++i) {
        const std::string f = indexed(s.field("points"), i);
        if (!points[i].IsSequence() || points[i].size() != 2) {
          issues.add(points[i], f, "expected a [x, y] pair");
          return std::nullopt;
        }
        auto x = value_of(points[i][0], f + "[0]", x_dim, issues);
        auto y = value_of(points[i][1], f + "[1]", y_dim, issues);
        if (!x || !y) return std::nullopt;
        xs.push_back(*x);
        ys.push_back(*y);
      }
      return ScalarFunction::table(std::move(xs), std::move(ys));
    }
    if (!form.empty())
      issues.add(s.get("form"), s.field("form"),
                 "unknown form '" + form + "' (expected identity, constant, linear, power_law or table)");
  } catch (const std::invalid_argument& e) {
    issues.add(n, path, e.what());
  }
  return std::nullopt;
}

std::optional<DistributionDecl> parse_distribution(const YAML::Node& n, const std::string& path,
                                                   const fs::path& base_dir, Issues& issues) {
  Section s(n, path, issues);
  if (!s.valid()) return std::nullopt;
  if (!n.IsDefined() || n.IsNull()) {
    issues.add(path, "distribution is missing");
    return std::nullopt;
  }
  DistributionDecl d;
  d.family = s.required_str("family");
  auto num = [&](const char* key) { return s.required(key, Dimension::dimensionless); };
  if (d.family == "normal") {
    d.parameters = {num("mean"), num("sigma")};
  } else if (d.family == "logistic") {
    d.parameters = {num("location"), num("scale")};
  } else if (d.family == "uniform") {
    d.parameters = {num("lo"), num("hi")};
  } else if (d.family == "empirical") {
    std::string file = s.required_str("file");
    if (!file.empty()) {
      fs::path p(file);
      if (p.is_relative()) p = base_dir / p;
      d.file = p.lexically_normal().string();
    }
  } else if (!d.family.empty()) {
    issues.add(s.get("family"), s.field("family"),
               "unknown family '" + d.family + "' (expected normal, logistic, uniform or empirical)");
    return std::nullopt;
  }
  return d;
}

std::optional<CalibrationSpec> parse_calibration(const YAML::Node& n, const std::string& path,
                                                 Issues& issues) {
  Section s(n, path, issues);
  if (!s.valid()) return std::nullopt;
  CalibrationSpec spec;
  const std::string mode = s.str("mode", "summed");
  if (mode == "summed")
    spec.mode = ScoreMode::summed;
  else if (mode == "one_at_a_time")
    spec.mode = ScoreMode::one_at_a_time;
  else
    issues.add(s.get("mode"), s.field("mode"),
               "mode must be summed or one_at_a_time, got '" + mode + "'");
  if (auto k = s.unsigned_int("samples")) {
    if (*k < ScoreDistribution::kMinEmpiricalSamples)
      issues.add(s.get("samples"), s.field("samples"),
                 "samples must be at least " + std::to_string(ScoreDistribution::kMinEmpiricalSamples));
    spec.samples = static_cast<std::size_t>(*k);
  }
  auto paths = sequence(s.get("paths"), s.field("paths"), issues);
  if (paths.empty()) issues.add(n, s.field("paths"), "calibration needs at least one path");
  std::set<std::string> names;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    Section p(paths[i], indexed(s.field("paths"), i), issues);
    if (!p.valid()) continue;
    TriggerPath t;
    t.name = p.required_str("name");
    if (!t.name.empty() && !names.insert(t.name).second)
      issues.add(p.get("name"), p.field("name"), "duplicate path name '" + t.name + "'");
    t.curve.object_name = t.name;
    t.curve.threshold = p.required("threshold_gev", Dimension::momentum);
    t.curve.width = p.quantity("width_gev", Dimension::momentum, 0.05 * t.curve.threshold);
    t.curve.plateau = p.quantity("plateau", Dimension::dimensionless, 0.95);
    t.empirical_rate = p.required("empirical_rate_hz", Dimension::frequency);
    t.input_rate = p.required("input_rate_hz", Dimension::frequency);
    t.resolution = p.quantity("resolution", Dimension::dimensionless, 0.0);
    if (!(t.curve.threshold >= 0)) issues.add(paths[i], p.field("threshold_gev"), "must be >= 0");
    if (!(t.curve.width >= 0)) issues.add(paths[i], p.field("width_gev"), "must be >= 0");
    if (!(t.curve.plateau > 0 && t.curve.plateau <= 1))
      issues.add(paths[i], p.field("plateau"), "must lie in (0, 1]");
    if (!(t.empirical_rate > 0 && t.empirical_rate <= t.input_rate))
      issues.add(paths[i], p.field("empirical_rate_hz"), "must lie in (0, input_rate_hz]");
    if (!(t.resolution >= 0)) issues.add(paths[i], p.field("resolution"), "must be >= 0");
    spec.paths.push_back(std::move(t));
  }
  return spec;
}

// ---------------------------------------------------------------- extends

YAML::Node merge_yaml(const YAML::Node& base, const YAML::Node& over) {
  if (!base.IsMap() || !over.IsMap()) return YAML::Clone(over);
  YAML::Node out = YAML::Clone(base);
  for (const auto& kv : over) {
    const std::string key = kv.first.Scalar();
    if (out[key].IsDefined() && out[key].IsMap() && kv.second.IsMap())
      out[key] = merge_yaml(out[key], kv.second);
    else
      out[key] = YAML::Clone(kv.second);
  }
  return out;
}

YAML::Node load_yaml(const std::string& text, const std::string& origin) {
  try {
    YAML::Node root = YAML::Load(text);
    if (root.IsNull()) return YAML::Node(YAML::NodeType::Map);
    return root;
  } catch (const YAML::Exception& e) {
    ConfigIssue issue{origin, e.mark.line >= 0 ? e.mark.line + 1 : -1,
                      e.mark.column >= 0 ? e.mark.column + 1 : -1, "syntax error: " + e.msg};
    throw ConfigError({issue});
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

YAML::Node resolve_extends(YAML::Node root, const fs::path& base_dir, int depth) {
  if (!root.IsMap() || !root["extends"].IsDefined()) return root;
  if (depth >= kMaxExtendsDepth) throw ConfigError("extends", "extends chain is too deep (cycle?)");
  const YAML::Node ext = root["extends"];
  if (!ext.IsScalar()) {
    Issues issues;
    issues.add(ext, "extends", "expected a file path");
    throw ConfigError(issues.list);
  }
  fs::path parent(ext.Scalar());
  if (parent.is_relative()) parent = base_dir / parent;
  YAML::Node base = load_yaml(read_file(parent), parent.string());
  base = resolve_extends(base, parent.parent_path(), depth + 1);
  YAML::Node own(YAML::NodeType::Map);
  for (const auto& kv : root)
    if (kv.first.Scalar() != "extends") own[kv.first.Scalar()] = kv.second;
  return merge_yaml(base, own);
}

// ---------------------------------------------------------------- sections

void parse_nodes(Section& root, ModelConfig& cfg, Issues& issues) {
  auto nodes = sequence(root.get("nodes"), "nodes", issues);
  if (nodes.empty()) issues.add(root.node(), "nodes", "config declares no nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Section s(nodes[i], indexed("nodes", i), issues);
    if (!s.valid()) continue;
    const std::string kind = s.required_str("kind");
    const std::string id = s.required_str("id");
    if (kind == "sensor") {
      SensorDecl d;
      d.id = id;
      d.sample_size = s.quantity("sample_size", Dimension::bits);
      d.sample_rate = s.required("sample_rate", Dimension::frequency);
      d.relevant_fraction = s.quantity("relevant_fraction", Dimension::dimensionless, 0.0);
      if (s.has("pileup_scaling"))
        d.pileup_scaling = parse_function(s.get("pileup_scaling"), s.field("pileup_scaling"),
                                          Dimension::dimensionless, Dimension::bits, issues);
      else
        s.get("pileup_scaling");
      if (!d.sample_size && !d.pileup_scaling) s.missing("sample_size");
      d.min_pileup = s.quantity("min_pileup", Dimension::dimensionless, 0.0);
      d.constant_power = s.quantity("constant_power", Dimension::power, 0.0);
      cfg.nodes.push_back(d);
    } else if (kind == "process") {
      ProcessDecl d;
      d.id = id;
      if (s.has("complexity")) {
        if (auto f = parse_function(s.get("complexity"), s.field("complexity"), Dimension::bits,
                                    Dimension::operations, issues))
          d.complexity = *f;
      }
      s.get("complexity");
      if (s.has("output_size")) {
        if (auto f = parse_function(s.get("output_size"), s.field("output_size"), Dimension::bits,
                                    Dimension::bits, issues))
          d.output_size = *f;
      }
      s.get("output_size");
      d.energy_per_op = s.quantity("energy_per_op", Dimension::energy_per_op);
      d.power_at_reference = s.quantity("power_at_reference", Dimension::power);
      if (d.energy_per_op && d.power_at_reference)
        issues.add(nodes[i], s.field("energy_per_op"),
                   "give either energy_per_op or power_at_reference, not both");
      d.classifier = s.str("classifier", "");
      d.reduction_target = s.ratio("reduction_target");
      if (auto m = merge_of(s)) d.merge = *m;
      d.ops_factor = s.quantity("ops_factor", Dimension::dimensionless, 1.0);
      d.constant_power = s.quantity("constant_power", Dimension::power, 0.0);
      d.device_power = s.quantity("device_power", Dimension::power, 0.0);
      cfg.nodes.push_back(d);
    } else if (kind == "output") {
      OutputDecl d;
      d.id = id;
      if (auto m = merge_of(s)) d.merge = *m;
      cfg.nodes.push_back(d);
    } else if (!kind.empty()) {
      issues.add(s.get("kind"), s.field("kind"),
                 "unknown node kind '" + kind + "' (expected sensor, process or output)");
    }
  }
}

void parse_links(Section& root, ModelConfig& cfg, Issues& issues) {
  auto links = sequence(root.get("links"), "links", issues);
  for (std::size_t i = 0; i < links.size(); ++i) {
    Section s(links[i], indexed("links", i), issues);
    if (!s.valid()) continue;
    CommLink l;
    l.source = s.required_str("source");
    l.target = s.required_str("target");
    l.id = s.str("id", l.source + "->" + l.target);
    l.energy_per_bit = s.required("energy_per_bit", Dimension::energy_per_bit);
    l.bandwidth_per_channel = s.required("bandwidth_per_channel", Dimension::bit_rate);
    l.latency = s.quantity("latency", Dimension::time, 0.0);
    l.shoreline = s.quantity("shoreline", Dimension::length_per_channel, 0.0);
    cfg.links.push_back(l);
  }
}

void parse_conditions(Section& root, ModelConfig& cfg, Issues& issues) {
  Section s(root.get("conditions"), "conditions", issues);
  ExperimentConditions& c = cfg.conditions;
  c.pileup = s.quantity("pileup", Dimension::dimensionless, c.pileup);
  c.reference_pileup = s.quantity("reference_pileup", Dimension::dimensionless, c.reference_pileup);
  c.bunch_rate = s.quantity("bunch_rate", Dimension::frequency);
  c.l1_reduction = s.ratio("l1_reduction").value_or(c.l1_reduction);
  c.hlt_reduction = s.ratio("hlt_reduction").value_or(c.hlt_reduction);
  c.reference_l1_reduction = s.ratio("reference_l1_reduction").value_or(c.reference_l1_reduction);
  c.reference_hlt_reduction = s.ratio("reference_hlt_reduction").value_or(c.reference_hlt_reduction);
  if (!(c.pileup > 0)) issues.add(s.get("pileup"), s.field("pileup"), "pile-up must be positive");
  if (!(c.reference_pileup > 0))
    issues.add(s.get("reference_pileup"), s.field("reference_pileup"), "must be positive");
  if (s.has("relevant_fraction")) {
    YAML::Node n = s.get("relevant_fraction");
    if (n.IsScalar() && n.Scalar() == "matched") {
      c.relevance = RelevanceMode::matched;
    } else if (auto v = value_of(n, s.field("relevant_fraction"), Dimension::dimensionless, issues)) {
      c.relevance = RelevanceMode::fixed;
      c.relevant_fraction = *v;
      if (!(*v >= 0 && *v <= 1))
        issues.add(n, s.field("relevant_fraction"), "must be 'matched' or lie in [0, 1]");
    }
  } else {
    s.get("relevant_fraction");
  }
}

void parse_era(Section& root, ModelConfig& cfg, Issues& issues) {
  Section s(root.get("era"), "era", issues);
  TechnologyEra& e = cfg.era;
  auto year = [&](const char* key, int fallback) {
    auto v = s.unsigned_int(key);
    return v ? static_cast<int>(*v) : fallback;
  };
  e.year = year("year", e.year);
  e.baseline_year = year("baseline_year", e.baseline_year);
  e.efficiency_factor = s.quantity("efficiency_factor", Dimension::dimensionless, 1.0);
  e.apply_to_links = s.boolean("apply_to_links").value_or(false);
  if (!(e.efficiency_factor >= 1))
    issues.add(s.get("efficiency_factor"), s.field("efficiency_factor"), "must be >= 1");
  if (e.year == e.baseline_year && e.efficiency_factor != 1.0)
    issues.add(s.get("efficiency_factor"), s.field("efficiency_factor"),
               "must be 1 when year equals baseline_year");
}

void parse_variants(Section& root, ModelConfig& cfg, Issues& issues) {
  Section s(root.get("variants"), "variants", issues);
  VariantConfig& v = cfg.variants;
  {
    Section g(s.get("gpu_hlt"), "variants.gpu_hlt", issues);
    v.gpu_hlt.enabled = g.boolean("enabled").value_or(false);
    v.gpu_hlt.throughput_gain = g.quantity("throughput_gain", Dimension::dimensionless, 0.5);
    v.gpu_hlt.unit_power = g.quantity("unit_power", Dimension::power, 400.0);
    if (!(v.gpu_hlt.throughput_gain > 0))
      issues.add(g.get("throughput_gain"), g.field("throughput_gain"), "must be positive");
  }
  {
    Section l(s.get("l1_tracks"), "variants.l1_tracks", issues);
    v.l1_tracks.enabled = l.boolean("enabled").value_or(false);
    v.l1_tracks.skill_factor = l.quantity("skill_factor", Dimension::dimensionless, 1.4);
    if (!(v.l1_tracks.skill_factor >= 0))
      issues.add(l.get("skill_factor"), l.field("skill_factor"), "must be >= 0");
  }
  {
    Section p(s.get("smart_pixels"), "variants.smart_pixels", issues);
    SmartPixelsVariant& sp = v.smart_pixels;
    sp.enabled = p.boolean("enabled").value_or(false);
    sp.data_reduction = p.quantity("data_reduction", Dimension::dimensionless, 0.54);
    sp.detector_power = p.quantity("detector_power", Dimension::power);
    sp.group_power = p.quantity("group_power", Dimension::power, sp.group_power);
    sp.pixels_per_group = p.quantity("pixels_per_group", Dimension::dimensionless, sp.pixels_per_group);
    sp.pixel_count = p.quantity("pixel_count", Dimension::dimensionless, sp.pixel_count);
    if (!(sp.data_reduction >= 0 && sp.data_reduction < 1))
      issues.add(p.get("data_reduction"), p.field("data_reduction"), "must lie in [0, 1)");
    if (sp.detector_power && !(*sp.detector_power >= 0))
      issues.add(p.get("detector_power"), p.field("detector_power"), "must be >= 0");
    if (!(sp.pixels_per_group > 0))
      issues.add(p.get("pixels_per_group"), p.field("pixels_per_group"), "must be positive");
  }
}

void parse_sweep(Section& root, ModelConfig& cfg, Issues& issues) {
  Section s(root.get("sweep"), "sweep", issues);
  auto numbers = [&](const char* key, std::vector<double>& out, bool is_ratio) {
    auto items = sequence(s.get(key), s.field(key), issues);
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string f = indexed(s.field(key), i);
      auto v = is_ratio ? ratio_of(items[i], f, issues)
                        : value_of(items[i], f, Dimension::dimensionless, issues);
      if (v) out.push_back(*v);
    }
  };
  numbers("pileup", cfg.sweep.pileup, false);
  numbers("reduction", cfg.sweep.reduction, true);
  numbers("skill", cfg.sweep.skill, false);
  auto vars = sequence(s.get("variants"), s.field("variants"), issues);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string f = indexed(s.field("variants"), i);
    auto label = scalar(vars[i], f, issues);
    if (!label) continue;
    try {
      VariantConfig::from_label(*label, cfg.variants);
      cfg.sweep.variants.push_back(*label);
    } catch (const std::invalid_argument& e) {
      issues.add(vars[i], f, e.what());
    }
  }
}

void parse_report(Section& root, ModelConfig& cfg, Issues& issues) {
  auto rows = sequence(root.get("report"), "report", issues);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Section s(rows[i], indexed("report", i), issues);
    if (!s.valid()) continue;
    ReportRow r;
    r.label = s.required_str("label");
    r.pileup = s.quantity("pileup", Dimension::dimensionless, cfg.conditions.pileup);
    r.reduction = s.ratio("reduction").value_or(cfg.conditions.l1_reduction);
    r.variants = s.str("variants", "baseline");
    r.skill = s.quantity("skill", Dimension::dimensionless, 1.0);
    try {
      VariantConfig::from_label(r.variants, cfg.variants);
    } catch (const std::invalid_argument& e) {
      issues.add(s.get("variants"), s.field("variants"), e.what());
    }
    cfg.report.push_back(r);
  }
}

void check_references(const YAML::Node& root, ModelConfig& cfg, Issues& issues) {
  std::map<std::string, std::size_t> kinds;  // id -> variant index
  const YAML::Node nodes = root["nodes"];
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
    const std::string& id = std::visit([](const auto& d) -> const std::string& { return d.id; },
                                       cfg.nodes[i]);
    if (id.empty()) continue;
    if (!kinds.emplace(id, cfg.nodes[i].index()).second)
      issues.add(nodes.IsSequence() && i < nodes.size() ? nodes[i] : YAML::Node(),
                 indexed("nodes", i) + ".id", "duplicate node id '" + id + "'");
  }
  const YAML::Node links = root["links"];
  std::set<std::string> link_ids;
  for (std::size_t i = 0; i < cfg.links.size(); ++i) {
    const auto& l = cfg.links[i];
    YAML::Node at = links.IsSequence() && i < links.size() ? links[i] : YAML::Node();
    if (!link_ids.insert(l.id).second)
      issues.add(at, indexed("links", i) + ".id", "duplicate link id '" + l.id + "'");
    if (!l.source.empty() && !kinds.count(l.source))
      issues.add(at.IsDefined() ? at["source"] : at, indexed("links", i) + ".source",
                 "link source '" + l.source + "' does not name a node");
    if (!l.target.empty() && !kinds.count(l.target))
      issues.add(at.IsDefined() ? at["target"] : at, indexed("links", i) + ".target",
                 "link target '" + l.target + "' does not name a node");
  }
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
    auto* p = std::get_if<ProcessDecl>(&cfg.nodes[i]);
    if (!p || p->classifier.empty()) continue;
    if (!cfg.calibration.count(p->classifier) && !cfg.classifiers.count(p->classifier))
      issues.add(nodes.IsSequence() && i < nodes.size() ? nodes[i]["classifier"] : YAML::Node(),
                 indexed("nodes", i) + ".classifier",
                 "classifier '" + p->classifier + "' is not declared in calibration or classifiers");
  }
  for (const auto& name : cfg.calibration)
    if (cfg.classifiers.count(name.first))
      issues.add("classifiers." + name.first, "name also used by a calibration block");

  const YAML::Node roles = root["roles"];
  auto check_role = [&](const std::string& id, const char* key, std::size_t kind, const char* what) {
    if (id.empty()) return;
    auto it = kinds.find(id);
    YAML::Node at = roles.IsMap() ? roles[key] : YAML::Node();
    if (it == kinds.end())
      issues.add(at, std::string("roles.") + key, "role names unknown node '" + id + "'");
    else if (it->second != kind)
      issues.add(at, std::string("roles.") + key, "role must name a " + std::string(what) + " node");
  };
  check_role(cfg.roles.l1t, "l1t", 1, "process");
  check_role(cfg.roles.hlt, "hlt", 1, "process");
  check_role(cfg.roles.pixel_sensor, "pixel_sensor", 0, "sensor");
  if (cfg.variants.gpu_hlt.enabled && cfg.roles.hlt.empty())
    issues.add("roles.hlt", "gpu_hlt variant needs the hlt role");
  if (cfg.variants.l1_tracks.enabled && cfg.roles.l1t.empty())
    issues.add("roles.l1t", "l1_tracks variant needs the l1t role");
  if (cfg.variants.smart_pixels.enabled && cfg.roles.pixel_sensor.empty())
    issues.add("roles.pixel_sensor", "smart_pixels variant needs the pixel_sensor role");
}

ModelConfig parse_root(const YAML::Node& root_node, const fs::path& base_dir) {
  Issues issues;
  ModelConfig cfg;
  {
    Section root(root_node, "", issues);
    if (!root.valid()) throw ConfigError(issues.list);
    cfg.schema_version = root.str("schema_version", "");
    if (cfg.schema_version.empty())
      root.missing("schema_version");
    else if (cfg.schema_version != kSchemaVersion)
      issues.add(root.get("schema_version"), "schema_version",
                 "unrecognised schema_version '" + cfg.schema_version + "' (expected " +
                     kSchemaVersion + ")");
    {
      Section r(root.get("roles"), "roles", issues);
      cfg.roles.l1t = r.str("l1t", "");
      cfg.roles.hlt = r.str("hlt", "");
      cfg.roles.pixel_sensor = r.str("pixel_sensor", "");
    }
    parse_nodes(root, cfg, issues);
    parse_links(root, cfg, issues);
    {
      Section c(root.get("calibration"), "calibration", issues);
      if (c.valid() && c.node().IsMap())
        for (const auto& kv : c.node()) {
          const std::string name = kv.first.Scalar();
          if (auto spec = parse_calibration(c.get(name), c.field(name), issues))
            cfg.calibration[name] = *spec;
        }
    }
    {
      Section c(root.get("classifiers"), "classifiers", issues);
      if (c.valid() && c.node().IsMap())
        for (const auto& kv : c.node()) {
          const std::string name = kv.first.Scalar();
          Section d(c.get(name), c.field(name), issues);
          auto pos = parse_distribution(d.get("positive"), d.field("positive"), base_dir, issues);
          auto neg = parse_distribution(d.get("negative"), d.field("negative"), base_dir, issues);
          if (pos && neg) cfg.classifiers[name] = ClassifierDecl{*pos, *neg};
        }
    }
    parse_conditions(root, cfg, issues);
    parse_era(root, cfg, issues);
    parse_variants(root, cfg, issues);
    parse_sweep(root, cfg, issues);
    {
      Section s(root.get("seeds"), "seeds", issues);
      if (s.valid() && s.node().IsMap())
        for (const auto& kv : s.node()) {
          const std::string name = kv.first.Scalar();
          if (auto v = s.unsigned_int(name)) cfg.seeds[name] = *v;
        }
    }
    parse_report(root, cfg, issues);
  }  // Section destructors report unknown fields.
  if (issues.list.empty()) check_references(root_node, cfg, issues);
  if (!issues.list.empty()) throw ConfigError(issues.list);
  return cfg;
}

// ---------------------------------------------------------------- writing

std::string num(double v) { return format_number(v); }

std::string q(double v, Dimension d) { return format_quantity(v, d); }

void emit_function(YAML::Emitter& out, const ScalarFunction& f, Dimension x, Dimension y) {
  using F = ScalarFunction::Form;
  if (f.form() == F::identity) {
    out << "identity";
    return;
  }
  out << YAML::Flow << YAML::BeginMap;
  switch (f.form()) {
    case F::constant:
      out << YAML::Key << "form" << YAML::Value << "constant";
      out << YAML::Key << "value" << YAML::Value << q(f.params()[0], y);
      break;
    case F::linear:
      out << YAML::Key << "form" << YAML::Value << "linear";
      out << YAML::Key << "slope" << YAML::Value << num(f.params()[0]);
      out << YAML::Key << "intercept" << YAML::Value << q(f.params()[1], y);
      break;
    case F::power_law:
      out << YAML::Key << "form" << YAML::Value << "power_law";
      out << YAML::Key << "coefficient" << YAML::Value << q(f.params()[0], y);
      out << YAML::Key << "exponent" << YAML::Value << num(f.params()[1]);
      out << YAML::Key << "reference" << YAML::Value << q(f.params()[2], x);
      break;
    case F::table:
      out << YAML::Key << "form" << YAML::Value << "table";
      out << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
      for (std::size_t i = 0; i < f.xs().size(); ++i)
        out << YAML::Flow << YAML::BeginSeq << q(f.xs()[i], x) << q(f.ys()[i], y) << YAML::EndSeq;
      out << YAML::EndSeq;
      break;
    default:
      throw std::invalid_argument("function form cannot be written to a config: " + f.describe());
  }
  out << YAML::EndMap;
}

const char* merge_name(MergeMode m) { return m == MergeMode::stream ? "stream" : "event_building"; }

void emit_distribution(YAML::Emitter& out, const DistributionDecl& d) {
  out << YAML::BeginMap << YAML::Key << "family" << YAML::Value << d.family;
  static const std::map<std::string, std::pair<const char*, const char*>> names = {
      {"normal", {"mean", "sigma"}}, {"logistic", {"location", "scale"}}, {"uniform", {"lo", "hi"}}};
  if (auto it = names.find(d.family); it != names.end() && d.parameters.size() == 2) {
    out << YAML::Key << it->second.first << YAML::Value << num(d.parameters[0]);
    out << YAML::Key << it->second.second << YAML::Value << num(d.parameters[1]);
  }
  if (d.family == "empirical") out << YAML::Key << "file" << YAML::Value << d.file;
  out << YAML::EndMap;
}

}  // namespace

ModelConfig parse_config(const std::string& text, const std::string& base_dir) {
  YAML::Node root = load_yaml(text, "");
  root = resolve_extends(root, fs::path(base_dir), 0);
  return parse_root(root, fs::absolute(fs::path(base_dir)));
}

ModelConfig load_config(const std::string& path) {
  fs::path p(path);
  try {
    return parse_config(read_file(p), p.parent_path().empty() ? "." : p.parent_path().string());
  } catch (const ConfigError& e) {
    std::vector<ConfigIssue> issues = e.issues();
    for (auto& i : issues)
      if (i.field.empty() || i.line > 0) i.message = "[" + path + "] " + i.message;
    throw ConfigError(issues);
  }
}

std::string serialize_config(const ModelConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "schema_version" << YAML::Value << c.schema_version;
  out << YAML::Key << "roles" << YAML::Value << YAML::BeginMap;
  if (!c.roles.l1t.empty()) out << YAML::Key << "l1t" << YAML::Value << c.roles.l1t;
  if (!c.roles.hlt.empty()) out << YAML::Key << "hlt" << YAML::Value << c.roles.hlt;
  if (!c.roles.pixel_sensor.empty())
    out << YAML::Key << "pixel_sensor" << YAML::Value << c.roles.pixel_sensor;
  out << YAML::EndMap;

  out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
  for (const auto& n : c.nodes) {
    out << YAML::BeginMap;
    if (auto* s = std::get_if<SensorDecl>(&n)) {
      out << YAML::Key << "kind" << YAML::Value << "sensor";
      out << YAML::Key << "id" << YAML::Value << s->id;
      if (s->sample_size) out << YAML::Key << "sample_size" << YAML::Value << q(*s->sample_size, Dimension::bits);
      out << YAML::Key << "sample_rate" << YAML::Value << q(s->sample_rate, Dimension::frequency);
      out << YAML::Key << "relevant_fraction" << YAML::Value << num(s->relevant_fraction);
      if (s->pileup_scaling) {
        out << YAML::Key << "pileup_scaling" << YAML::Value;
        emit_function(out, *s->pileup_scaling, Dimension::dimensionless, Dimension::bits);
      }
      out << YAML::Key << "min_pileup" << YAML::Value << num(s->min_pileup);
      out << YAML::Key << "constant_power" << YAML::Value << q(s->constant_power, Dimension::power);
    } else if (auto* p = std::get_if<ProcessDecl>(&n)) {
      out << YAML::Key << "kind" << YAML::Value << "process";
      out << YAML::Key << "id" << YAML::Value << p->id;
      out << YAML::Key << "complexity" << YAML::Value;
      emit_function(out, p->complexity, Dimension::bits, Dimension::operations);
      if (p->energy_per_op)
        out << YAML::Key << "energy_per_op" << YAML::Value << q(*p->energy_per_op, Dimension::energy_per_op);
      if (p->power_at_reference)
        out << YAML::Key << "power_at_reference" << YAML::Value << q(*p->power_at_reference, Dimension::power);
      out << YAML::Key << "output_size" << YAML::Value;
      emit_function(out, p->output_size, Dimension::bits, Dimension::bits);
      if (!p->classifier.empty()) out << YAML::Key << "classifier" << YAML::Value << p->classifier;
      if (p->reduction_target)
        out << YAML::Key << "reduction_target" << YAML::Value << format_ratio_exact(*p->reduction_target);
      out << YAML::Key << "merge" << YAML::Value << merge_name(p->merge);
      out << YAML::Key << "ops_factor" << YAML::Value << num(p->ops_factor);
      out << YAML::Key << "constant_power" << YAML::Value << q(p->constant_power, Dimension::power);
      out << YAML::Key << "device_power" << YAML::Value << q(p->device_power, Dimension::power);
    } else {
      const auto& o = std::get<OutputDecl>(n);
      out << YAML::Key << "kind" << YAML::Value << "output";
      out << YAML::Key << "id" << YAML::Value << o.id;
      out << YAML::Key << "merge" << YAML::Value << merge_name(o.merge);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "links" << YAML::Value << YAML::BeginSeq;
  for (const auto& l : c.links) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << l.id;
    out << YAML::Key << "source" << YAML::Value << l.source;
    out << YAML::Key << "target" << YAML::Value << l.target;
    out << YAML::Key << "energy_per_bit" << YAML::Value << q(l.energy_per_bit, Dimension::energy_per_bit);
    out << YAML::Key << "bandwidth_per_channel" << YAML::Value << q(l.bandwidth_per_channel, Dimension::bit_rate);
    out << YAML::Key << "latency" << YAML::Value << q(l.latency, Dimension::time);
    out << YAML::Key << "shoreline" << YAML::Value << q(l.shoreline, Dimension::length_per_channel);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  if (!c.calibration.empty()) {
    out << YAML::Key << "calibration" << YAML::Value << YAML::BeginMap;
    for (const auto& [name, spec] : c.calibration) {
      out << YAML::Key << name << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "mode" << YAML::Value
          << (spec.mode == ScoreMode::summed ? "summed" : "one_at_a_time");
      out << YAML::Key << "samples" << YAML::Value << std::to_string(spec.samples);
      out << YAML::Key << "paths" << YAML::Value << YAML::BeginSeq;
      for (const auto& p : spec.paths) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << p.name;
        out << YAML::Key << "threshold_gev" << YAML::Value << q(p.curve.threshold, Dimension::momentum);
        out << YAML::Key << "width_gev" << YAML::Value << q(p.curve.width, Dimension::momentum);
        out << YAML::Key << "plateau" << YAML::Value << num(p.curve.plateau);
        out << YAML::Key << "empirical_rate_hz" << YAML::Value << q(p.empirical_rate, Dimension::frequency);
        out << YAML::Key << "input_rate_hz" << YAML::Value << q(p.input_rate, Dimension::frequency);
        out << YAML::Key << "resolution" << YAML::Value << num(p.resolution);
        out << YAML::EndMap;
      }
      out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndMap;
  }

  if (!c.classifiers.empty()) {
    out << YAML::Key << "classifiers" << YAML::Value << YAML::BeginMap;
    for (const auto& [name, d] : c.classifiers) {
      out << YAML::Key << name << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "positive" << YAML::Value;
      emit_distribution(out, d.positive);
      out << YAML::Key << "negative" << YAML::Value;
      emit_distribution(out, d.negative);
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }

  const auto& cd = c.conditions;
  out << YAML::Key << "conditions" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "pileup" << YAML::Value << num(cd.pileup);
  out << YAML::Key << "reference_pileup" << YAML::Value << num(cd.reference_pileup);
  if (cd.bunch_rate) out << YAML::Key << "bunch_rate" << YAML::Value << q(*cd.bunch_rate, Dimension::frequency);
  out << YAML::Key << "l1_reduction" << YAML::Value << format_ratio_exact(cd.l1_reduction);
  out << YAML::Key << "hlt_reduction" << YAML::Value << format_ratio_exact(cd.hlt_reduction);
  out << YAML::Key << "reference_l1_reduction" << YAML::Value << format_ratio_exact(cd.reference_l1_reduction);
  out << YAML::Key << "reference_hlt_reduction" << YAML::Value << format_ratio_exact(cd.reference_hlt_reduction);
  if (cd.relevance == RelevanceMode::matched)
    out << YAML::Key << "relevant_fraction" << YAML::Value << "matched";
  else if (cd.relevance == RelevanceMode::fixed)
    out << YAML::Key << "relevant_fraction" << YAML::Value << num(cd.relevant_fraction);
  out << YAML::EndMap;

  out << YAML::Key << "era" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "year" << YAML::Value << std::to_string(c.era.year);
  out << YAML::Key << "baseline_year" << YAML::Value << std::to_string(c.era.baseline_year);
  out << YAML::Key << "efficiency_factor" << YAML::Value << num(c.era.efficiency_factor);
  out << YAML::Key << "apply_to_links" << YAML::Value << (c.era.apply_to_links ? "true" : "false");
  out << YAML::EndMap;

  const auto& v = c.variants;
  out << YAML::Key << "variants" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "gpu_hlt" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << (v.gpu_hlt.enabled ? "true" : "false");
  out << YAML::Key << "throughput_gain" << YAML::Value << num(v.gpu_hlt.throughput_gain);
  out << YAML::Key << "unit_power" << YAML::Value << q(v.gpu_hlt.unit_power, Dimension::power);
  out << YAML::EndMap;
  out << YAML::Key << "l1_tracks" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << (v.l1_tracks.enabled ? "true" : "false");
  out << YAML::Key << "skill_factor" << YAML::Value << num(v.l1_tracks.skill_factor);
  out << YAML::EndMap;
  out << YAML::Key << "smart_pixels" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << (v.smart_pixels.enabled ? "true" : "false");
  out << YAML::Key << "data_reduction" << YAML::Value << num(v.smart_pixels.data_reduction);
  if (v.smart_pixels.detector_power)
    out << YAML::Key << "detector_power" << YAML::Value << q(*v.smart_pixels.detector_power, Dimension::power);
  out << YAML::Key << "group_power" << YAML::Value << q(v.smart_pixels.group_power, Dimension::power);
  out << YAML::Key << "pixels_per_group" << YAML::Value << num(v.smart_pixels.pixels_per_group);
  out << YAML::Key << "pixel_count" << YAML::Value << num(v.smart_pixels.pixel_count);
  out << YAML::EndMap;
  out << YAML::EndMap;

  out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  auto list = [&](const char* key, const std::vector<double>& xs, bool ratio) {
    out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double x : xs) out << (ratio ? format_ratio_exact(x) : num(x));
    out << YAML::EndSeq;
  };
  list("pileup", c.sweep.pileup, false);
  list("reduction", c.sweep.reduction, true);
  list("skill", c.sweep.skill, false);
  out << YAML::Key << "variants" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& s : c.sweep.variants) out << s;
  out << YAML::EndSeq;
  out << YAML::EndMap;

  out << YAML::Key << "seeds" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, s] : c.seeds) out << YAML::Key << k << YAML::Value << std::to_string(s);
  out << YAML::EndMap;

  if (!c.report.empty()) {
    out << YAML::Key << "report" << YAML::Value << YAML::BeginSeq;
    for (const auto& r : c.report) {
      out << YAML::BeginMap;
      out << YAML::Key << "label" << YAML::Value << r.label;
      out << YAML::Key << "pileup" << YAML::Value << num(r.pileup);
      out << YAML::Key << "reduction" << YAML::Value << format_ratio_exact(r.reduction);
      out << YAML::Key << "variants" << YAML::Value << r.variants;
      out << YAML::Key << "skill" << YAML::Value << num(r.skill);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::vector<double> read_scores(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open score file");
  std::vector<double> out;
  if (fs::path(path).extension() == ".bin") {
    std::ostringstream os;
    os << in.rdbuf();
    const std::string bytes = os.str();
    if (bytes.size() % 8 != 0) throw ConfigError(path, "binary score file size is not a multiple of 8");
    out.resize(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::uint64_t bits = 0;
      for (int b = 7; b >= 0; --b)
        bits = (bits << 8) | static_cast<unsigned char>(bytes[i * 8 + static_cast<std::size_t>(b)]);
      std::memcpy(&out[i], &bits, sizeof bits);
    }
    return out;
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      double v = std::stod(line, &used);
      if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("");
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError({ConfigIssue{path, lineno, 1, "not a number: '" + line + "'"}});
    }
  }
  return out;
}

namespace {

ScoreDistribution make_distribution(const DistributionDecl& d, const std::string& field) {
  try {
    if (d.family == "normal") return ScoreDistribution::normal(d.parameters[0], d.parameters[1]);
    if (d.family == "logistic") return ScoreDistribution::logistic(d.parameters[0], d.parameters[1]);
    if (d.family == "uniform") return ScoreDistribution::uniform(d.parameters[0], d.parameters[1]);
    if (d.family == "empirical") return ScoreDistribution::empirical(read_scores(d.file));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
  throw ConfigError(field, "unknown family '" + d.family + "'");
}

}  // namespace

Model build_model(const ModelConfig& cfg, std::optional<std::uint64_t> seed) {
  Model m;
  m.config = cfg;
  m.seed = seed ? *seed : (cfg.seeds.count("calibration") ? cfg.seeds.at("calibration") : kDefaultSeed);

  for (const auto& [name, spec] : cfg.calibration) {
    try {
      const std::uint64_t s = splitmix64(m.seed ^ fnv1a("calibration/" + name));
      m.classifiers[name] = std::make_shared<const ClassifierModel>(build_classifier(spec, s));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("calibration." + name, e.what());
    }
  }
  for (const auto& [name, decl] : cfg.classifiers)
    m.classifiers[name] = std::make_shared<const ClassifierModel>(
        make_distribution(decl.positive, "classifiers." + name + ".positive"),
        make_distribution(decl.negative, "classifiers." + name + ".negative"));

  PipelineGraph& g = m.graph;
  g.roles = cfg.roles;
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
    const std::string field = indexed("nodes", i);
    if (auto* s = std::get_if<SensorDecl>(&cfg.nodes[i])) {
      SensorNode n;
      n.id = s->id;
      n.sample_rate = s->sample_rate;
      n.relevant_fraction = s->relevant_fraction;
      n.min_pileup = s->min_pileup;
      n.constant_power = s->constant_power;
      if (s->pileup_scaling) {
        const double at_ref = (*s->pileup_scaling)(cfg.conditions.reference_pileup);
        if (!(at_ref > 0))
          throw ConfigError(field + ".pileup_scaling", "must be positive at the reference pile-up");
        n.pileup_scaling = ScalarFunction::scaled(*s->pileup_scaling, 1.0, at_ref);
        n.sample_size = s->sample_size.value_or(at_ref);
      } else {
        n.sample_size = s->sample_size.value_or(0);
      }
      g.nodes.push_back(n);
    } else if (auto* p = std::get_if<ProcessDecl>(&cfg.nodes[i])) {
      ProcessNode n;
      n.id = p->id;
      n.complexity = p->complexity;
      n.energy_per_op = p->energy_per_op.value_or(0);
      n.power_at_reference = p->power_at_reference;
      n.output_size = p->output_size;
      if (!p->classifier.empty()) n.classifier = m.classifiers.at(p->classifier);
      n.reduction_target = p->reduction_target;
      n.merge = p->merge;
      n.ops_factor = p->ops_factor;
      n.constant_power = p->constant_power;
      n.device_power = p->device_power;
      g.nodes.push_back(n);
    } else {
      const auto& o = std::get<OutputDecl>(cfg.nodes[i]);
      g.nodes.push_back(OutputNode{o.id, o.merge});
    }
  }
  g.links = cfg.links;

  m.scenario.conditions = cfg.conditions;
  m.scenario.era = cfg.era;
  m.scenario.variants = cfg.variants;

  auto to_issues = [](const ValidationReport& r, const std::string& when) {
    std::vector<ConfigIssue> issues;
    for (const auto& v : r.violations)
      issues.push_back({"graph" + (v.subject.empty() ? "" : "." + v.subject), -1, -1,
                        violation_kind_name(v.kind) + " " + when + ": " + v.message});
    return issues;
  };
  const auto structural = validate_graph(g);
  if (structural.has(Violation::Kind::cycle) || structural.has(Violation::Kind::missing_output) ||
      structural.has(Violation::Kind::multiple_outputs) ||
      structural.has(Violation::Kind::dangling_reference) || structural.has(Violation::Kind::duplicate_id))
    throw ConfigError(to_issues(structural, "in the declared graph"));
  const auto at_conditions = validate_graph(apply_conditions(g, cfg.conditions));
  if (!at_conditions.ok()) throw ConfigError(to_issues(at_conditions, "at the configured conditions"));
  const auto at_reference = validate_graph(apply_conditions(g, cfg.conditions.reference()));
  if (!at_reference.ok()) throw ConfigError(to_issues(at_reference, "at the reference conditions"));

  g = calibrate_energy(g, cfg.conditions);
  return m;
}

}  // namespace systemflow
