// Copyright 2026 The qsn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qsn/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <toml.hpp>

#include "qsn/cv_gaussian.hpp"
#include "qsn/error.hpp"
#include "qsn/metrology_engine.hpp"
#include "qsn/noise_channels.hpp"

namespace qsn {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::qfi: return "qfi";
    case Task::qfi_multi: return "qfi_multi";
    case Task::echo: return "echo";
    case Task::sweep_K: return "sweep_K";
    case Task::rayleigh: return "rayleigh";
    case Task::nogo_passive: return "nogo_passive";
    case Task::cv_advantage: return "cv_advantage";
  }
  return "?";
}

std::string_view to_string(NoisePattern pattern) {
  switch (pattern) {
    case NoisePattern::max_correlated: return "max_correlated";
    case NoisePattern::identity: return "identity";
    case NoisePattern::custom: return "custom";
  }
  return "?";
}

std::string_view to_string(OracleChannel channel) {
  switch (channel) {
    case OracleChannel::exact: return "exact";
    case OracleChannel::quadrature: return "quadrature";
    case OracleChannel::monte_carlo: return "monte_carlo";
  }
  return "?";
}

std::optional<Task> parse_task(std::string_view name) {
  for (auto t : {Task::qfi, Task::qfi_multi, Task::echo, Task::sweep_K, Task::rayleigh, Task::nogo_passive,
                 Task::cv_advantage}) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

namespace {

std::string location(const toml::node* node) {
  if (!node || !node->source().begin) return "";
  return " (line " + std::to_string(node->source().begin.line) + ", column " +
         std::to_string(node->source().begin.column) + ")";
}

[[noreturn]] void field_error(const std::string& field, const std::string& what, const toml::node* node = nullptr) {
  fail(ErrorCode::ValidationError, field + ": " + what + location(node));
}

void check_keys(const toml::table& t, const std::string& prefix, std::initializer_list<std::string_view> allowed) {
  for (auto&& [key, node] : t) {
    const std::string_view k = key.str();
    if (std::find(allowed.begin(), allowed.end(), k) != allowed.end()) continue;
    std::string_view best;
    std::size_t best_dist = std::string_view::npos;
    for (std::string_view cand : allowed) {
      const std::size_t d = levenshtein(k, cand);
      if (d < best_dist) {
        best_dist = d;
        best = cand;
      }
    }
    std::string msg = "unknown key '" + prefix + std::string(k) + "'";
    if (best_dist <= std::max<std::size_t>(2, k.size() / 3)) msg += "; did you mean '" + std::string(best) + "'?";
    fail(ErrorCode::ValidationError, msg + location(&node));
  }
}

class Reader {
 public:
  Reader(const toml::table* table, std::string prefix, std::vector<std::string>& filled)
      : table_(table), prefix_(std::move(prefix)), filled_(filled) {}

  const toml::node* node(std::string_view key) const { return table_ ? table_->get(key) : nullptr; }
  std::string path(std::string_view key) const { return prefix_ + std::string(key); }
  bool has(std::string_view key) const { return node(key) != nullptr; }

  double number(std::string_view key, double def) {
    const toml::node* n = node(key);
    if (!n) return defaulted(key, def);
    if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) return *v;
    field_error(path(key), "expected a number", n);
  }

  std::int64_t integer(std::string_view key, std::int64_t def, std::int64_t min) {
    const toml::node* n = node(key);
    if (!n) return defaulted(key, def);
    if (!n->is_integer()) field_error(path(key), "expected an integer", n);
    const std::int64_t v = *n->value<std::int64_t>();
    if (v < min) field_error(path(key), "must be at least " + std::to_string(min), n);
    return v;
  }

  std::string string(std::string_view key, std::string def) {
    const toml::node* n = node(key);
    if (!n) return defaulted(key, std::move(def));
    if (!n->is_string()) field_error(path(key), "expected a string", n);
    return *n->value<std::string>();
  }

  bool boolean(std::string_view key, bool def) {
    const toml::node* n = node(key);
    if (!n) return defaulted(key, def);
    if (!n->is_boolean()) field_error(path(key), "expected true or false", n);
    return *n->value<bool>();
  }

  // A scalar or an array of numbers.
  std::vector<double> numbers(std::string_view key, std::vector<double> def) {
    const toml::node* n = node(key);
    if (!n) return defaulted(key, std::move(def));
    if (n->is_number()) return {*n->value<double>()};
    const toml::array* arr = n->as_array();
    if (!arr) field_error(path(key), "expected a number or an array of numbers", n);
    std::vector<double> out;
    for (const toml::node& e : *arr) {
      if (!e.is_number()) field_error(path(key), "array entries must be numbers", &e);
      out.push_back(*e.value<double>());
    }
    return out;
  }

  std::vector<int> integers(std::string_view key) {
    std::vector<int> out;
    const toml::node* n = node(key);
    if (!n) return defaulted(key, out);
    const toml::array* arr = n->as_array();
    if (!arr) field_error(path(key), "expected an array of integers", n);
    for (const toml::node& e : *arr) {
      if (!e.is_integer()) field_error(path(key), "array entries must be integers", &e);
      out.push_back(static_cast<int>(*e.value<std::int64_t>()));
    }
    return out;
  }

  std::optional<RMatrix> matrix(std::string_view key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    const toml::array* rows = n->as_array();
    if (!rows || rows->empty()) field_error(path(key), "expected a non-empty array of rows", n);
    const auto r = static_cast<Eigen::Index>(rows->size());
    RMatrix m;
    for (Eigen::Index i = 0; i < r; ++i) {
      const toml::node& row_node = *rows->get(static_cast<std::size_t>(i));
      const toml::array* row = row_node.as_array();
      if (!row) field_error(path(key), "row " + std::to_string(i) + " is not an array", &row_node);
      if (i == 0) m.resize(r, static_cast<Eigen::Index>(row->size()));
      if (static_cast<Eigen::Index>(row->size()) != m.cols()) field_error(path(key), "rows have unequal lengths", &row_node);
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const toml::node& e = *row->get(static_cast<std::size_t>(j));
        if (!e.is_number()) field_error(path(key), "matrix entries must be numbers", &e);
        m(i, j) = *e.value<double>();
      }
    }
    return m;
  }

 private:
  template <class T>
  T defaulted(std::string_view key, T value) {
    filled_.push_back(path(key));
    return value;
  }

  const toml::table* table_;
  std::string prefix_;
  std::vector<std::string>& filled_;
};

const toml::table* section(const toml::table& root, std::string_view key) {
  const toml::node* n = root.get(key);
  if (!n) return nullptr;
  if (!n->is_table()) field_error(std::string(key), "expected a table", n);
  return n->as_table();
}

SiteSpec read_site(Reader& r, const std::string& field) {
  const std::string kind_name = r.string("kind", "qubit");
  const auto kind = parse_site_kind(kind_name);
  if (!kind) field_error(field + "kind", "unknown site kind '" + kind_name + "'", r.node("kind"));
  SiteSpec site;
  site.kind = *kind;
  const std::string gen_name = r.string("generator", std::string(to_string(default_generator(*kind))));
  const auto gen = parse_generator_kind(gen_name);
  if (!gen) field_error(field + "generator", "unknown generator '" + gen_name + "'", r.node("generator"));
  site.generator = *gen;
  site.truncation = site.kind == SiteKind::boson ? 0 : 2;
  return site;
}

int derived_truncation(const ProbeSpec& probe) {
  switch (probe.family) {
    case ProbeFamily::boson_ghz:
    case ProbeFamily::product_zeroN: return probe.photons + 1;
    case ProbeFamily::fock_product:
      return probe.occupations.empty() ? 1 : *std::max_element(probe.occupations.begin(), probe.occupations.end()) + 1;
    case ProbeFamily::squeezed_vacuum_product: return squeezed_vacuum_truncation(probe.nbar);
    default: return 0;
  }
}

}  // namespace

RMatrix build_v(const Scenario& s, std::size_t k) {
  const auto n = static_cast<Eigen::Index>(k);
  switch (s.noise.pattern) {
    case NoisePattern::max_correlated: return RMatrix::Ones(n, n);
    case NoisePattern::identity: return RMatrix::Identity(n, n);
    case NoisePattern::custom:
      if (s.noise.v.rows() != n) {
        fail(ErrorCode::ValidationError, "noise.v: custom v is " + std::to_string(s.noise.v.rows()) + "x" +
                                             std::to_string(s.noise.v.cols()) + " but the space has " +
                                             std::to_string(k) + " sites");
      }
      return s.noise.v;
  }
  return {};
}

SpaceSpec build_space(const Scenario& s, std::optional<std::size_t> k) {
  if (!s.space.per_site.empty()) {
    if (k && *k != s.space.per_site.size()) {
      fail(ErrorCode::ValidationError, "space.site: per-site lists cannot be resized by a sweep");
    }
    return SpaceSpec(s.space.per_site);
  }
  return SpaceSpec::uniform(k.value_or(s.space.sites), s.space.site);
}

Scenario parse_scenario(std::string_view text, std::string_view source_name) {
  toml::table root;
  try {
    root = toml::parse(text, source_name);
  } catch (const toml::parse_error& err) {
    const auto& where = err.source().begin;
    fail(ErrorCode::ParseError, std::string(source_name) + ":" + std::to_string(where.line) + ":" +
                                    std::to_string(where.column) + ": " + std::string(err.description()));
  }

  Scenario s;
  check_keys(root, "", {"name", "task", "output", "plots", "space", "probe", "noise", "method", "sweep", "multi", "cv", "nogo"});
  std::vector<std::string>& filled = s.defaults_filled;

  Reader top(&root, "", filled);
  const toml::node* task_node = root.get("task");
  if (!task_node) fail(ErrorCode::ValidationError, "task: required (one of qfi, qfi_multi, echo, sweep_K, rayleigh, nogo_passive, cv_advantage)");
  const std::string task_name = top.string("task", "");
  const auto task = parse_task(task_name);
  if (!task) field_error("task", "unknown task '" + task_name + "'", task_node);
  s.task = *task;
  s.name = top.string("name", "scenario");
  s.output = top.string("output", s.name);
  s.plots = top.boolean("plots", false);

  // probe first: boson truncations may derive from it
  const toml::table* probe_t = section(root, "probe");
  if (probe_t) check_keys(*probe_t, "probe.", {"family", "photons", "nbar", "occupations", "amplitudes", "amplitudes_im"});
  Reader probe(probe_t, "probe.", filled);
  const std::string family_name = probe.string("family", "qubit_ghz");
  const auto family = parse_probe_family(family_name);
  if (!family) field_error("probe.family", "unknown probe family '" + family_name + "'", probe.node("family"));
  s.probe.family = *family;
  s.probe.photons = static_cast<int>(probe.integer("photons", 1, 0));
  s.probe.nbar = probe.number("nbar", 1.0);
  if (s.probe.nbar < 0.0) field_error("probe.nbar", "must be non-negative", probe.node("nbar"));
  s.probe.occupations = probe.integers("occupations");
  if (*family == ProbeFamily::custom) {
    if (!probe.has("amplitudes")) field_error("probe.amplitudes", "required for the custom family");
    const std::vector<double> re = probe.numbers("amplitudes", {});
    const std::vector<double> im = probe.numbers("amplitudes_im", std::vector<double>(re.size(), 0.0));
    if (im.size() != re.size()) field_error("probe.amplitudes_im", "length differs from probe.amplitudes", probe.node("amplitudes_im"));
    s.probe.amplitudes = CVector(static_cast<Eigen::Index>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) s.probe.amplitudes(static_cast<Eigen::Index>(i)) = cplx(re[i], im[i]);
  } else if (probe.has("amplitudes") || probe.has("amplitudes_im")) {
    field_error("probe.amplitudes", "only allowed for the custom family", probe.node("amplitudes"));
  }

  const toml::table* space_t = section(root, "space");
  if (space_t) check_keys(*space_t, "space.", {"kind", "sites", "generator", "truncation", "site"});
  Reader space(space_t, "space.", filled);
  const int derived = derived_truncation(s.probe);
  if (space_t && space_t->get("site")) {
    if (space.has("kind") || space.has("sites") || space.has("generator") || space.has("truncation")) {
      field_error("space.site", "a per-site list excludes kind, sites, generator and truncation", space.node("site"));
    }
    const toml::array* arr = space_t->get("site")->as_array();
    if (!arr || arr->empty()) field_error("space.site", "expected a non-empty array of tables", space.node("site"));
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const toml::table* st = arr->get(i)->as_table();
      const std::string prefix = "space.site[" + std::to_string(i) + "].";
      if (!st) field_error(prefix, "expected a table", arr->get(i));
      check_keys(*st, prefix, {"kind", "generator", "truncation"});
      Reader sr(st, prefix, filled);
      SiteSpec site = read_site(sr, prefix);
      if (site.kind == SiteKind::boson) {
        site.truncation = static_cast<int>(sr.integer("truncation", derived, 1));
        if (site.truncation < 1) field_error(prefix + "truncation", "cannot be derived from the probe; set it explicitly");
      } else if (sr.has("truncation")) {
        field_error(prefix + "truncation", "only boson sites take a truncation", sr.node("truncation"));
      }
      s.space.per_site.push_back(site);
    }
    s.space.sites = s.space.per_site.size();
    s.space.auto_truncation = false;
  } else {
    s.space.site = read_site(space, "space.");
    s.space.sites = static_cast<std::size_t>(space.integer("sites", 2, 1));
    if (s.space.site.kind == SiteKind::boson) {
      s.space.auto_truncation = !space.has("truncation");
      s.space.site.truncation = static_cast<int>(space.integer("truncation", derived, 1));
      if (s.space.site.truncation < 1 && s.task != Task::cv_advantage) {
        field_error("space.truncation", "cannot be derived from the probe; set it explicitly");
      }
    } else if (space.has("truncation")) {
      field_error("space.truncation", "only boson sites take a truncation", space.node("truncation"));
    }
  }

  const toml::table* noise_t = section(root, "noise");
  if (noise_t) check_keys(*noise_t, "noise.", {"g", "pattern", "v", "sigma2", "background"});
  Reader noise(noise_t, "noise.", filled);
  s.noise.g = noise.numbers("g", {1e-3});
  if (s.noise.g.empty()) field_error("noise.g", "needs at least one value", noise.node("g"));
  for (double g : s.noise.g) {
    if (!(g >= 0.0)) field_error("noise.g", "values must be non-negative", noise.node("g"));
  }
  const std::string pattern = noise.string("pattern", noise.has("v") ? "custom" : "max_correlated");
  if (pattern == "max_correlated") {
    s.noise.pattern = NoisePattern::max_correlated;
  } else if (pattern == "identity") {
    s.noise.pattern = NoisePattern::identity;
  } else if (pattern == "custom") {
    s.noise.pattern = NoisePattern::custom;
  } else {
    field_error("noise.pattern", "unknown pattern '" + pattern + "' (max_correlated, identity, custom)", noise.node("pattern"));
  }
  if (auto v = noise.matrix("v")) {
    if (s.noise.pattern != NoisePattern::custom) field_error("noise.v", "only allowed with pattern = \"custom\"", noise.node("v"));
    require_symmetric_psd(*v, "noise.v");
    s.noise.v = *v;
  } else if (s.noise.pattern == NoisePattern::custom) {
    field_error("noise.v", "required for pattern = \"custom\"");
  }
  s.noise.sigma2 = noise.numbers("sigma2", {});
  for (double x : s.noise.sigma2) {
    if (!(x >= 0.0)) field_error("noise.sigma2", "values must be non-negative", noise.node("sigma2"));
  }
  if (auto b = noise.matrix("background")) {
    require_symmetric_psd(*b, "noise.background");
    s.noise.background = *b;
  }

  const toml::table* method_t = section(root, "method");
  if (method_t) {
    check_keys(*method_t, "method.", {"backend", "oracle", "oracle_channel", "quadrature_points", "samples", "shots",
                                      "seeds", "seed", "threads", "allow_saturation"});
  }
  Reader method(method_t, "method.", filled);
  const std::string backend = method.string("backend", "exact");
  const auto be = parse_echo_backend(backend);
  if (!be) field_error("method.backend", "unknown backend '" + backend + "' (first_order, exact)", method.node("backend"));
  s.method.backend = *be;
  s.method.oracle = method.boolean("oracle", true);
  const std::string oc = method.string("oracle_channel", "exact");
  if (oc == "exact") {
    s.method.oracle_channel = OracleChannel::exact;
  } else if (oc == "quadrature") {
    s.method.oracle_channel = OracleChannel::quadrature;
  } else if (oc == "monte_carlo") {
    s.method.oracle_channel = OracleChannel::monte_carlo;
  } else {
    field_error("method.oracle_channel", "unknown channel '" + oc + "' (exact, quadrature, monte_carlo)", method.node("oracle_channel"));
  }
  s.method.quadrature_points = static_cast<int>(method.integer("quadrature_points", 40, 1));
  s.method.samples = static_cast<std::size_t>(method.integer("samples", 100'000, 1));
  s.method.shots = static_cast<std::uint64_t>(method.integer("shots", 1'000'000, 1));
  s.method.seeds = static_cast<std::size_t>(method.integer("seeds", 200, 1));
  s.method.seed = static_cast<std::uint64_t>(method.integer("seed", 1, 0));
  s.method.threads = static_cast<std::size_t>(method.integer("threads", 1, 1));
  s.method.allow_saturation = method.boolean("allow_saturation", true);

  const toml::table* sweep_t = section(root, "sweep");
  if (sweep_t) check_keys(*sweep_t, "sweep.", {"k_min", "k_max", "entangled", "separable"});
  Reader sweep(sweep_t, "sweep.", filled);
  s.sweep.k_min = static_cast<std::size_t>(sweep.integer("k_min", 2, 1));
  s.sweep.k_max = static_cast<std::size_t>(sweep.integer("k_max", 6, 1));
  if (s.sweep.k_max < s.sweep.k_min) field_error("sweep.k_max", "must be at least sweep.k_min", sweep.node("k_max"));
  for (auto [key, target] : {std::pair{"entangled", &s.sweep.entangled}, std::pair{"separable", &s.sweep.separable}}) {
    const std::string def(to_string(*target));
    const std::string name = sweep.string(key, def);
    const auto f = parse_probe_family(name);
    if (!f || *f == ProbeFamily::custom) field_error(sweep.path(key), "unknown or unsupported family '" + name + "'", sweep.node(key));
    *target = *f;
  }

  const toml::table* multi_t = section(root, "multi");
  if (multi_t) check_keys(*multi_t, "multi.", {"w"});
  Reader multi(multi_t, "multi.", filled);
  if (multi.node("w") && multi.node("w")->is_array()) {
    s.multi.w = "custom";
    s.multi.W = *multi.matrix("w");
  } else {
    s.multi.w = multi.string("w", "identity");
    if (s.multi.w != "identity" && s.multi.w != "dct") {
      field_error("multi.w", "expected \"identity\", \"dct\" or a matrix", multi.node("w"));
    }
  }

  const toml::table* cv_t = section(root, "cv");
  if (cv_t) check_keys(*cv_t, "cv.", {"modes", "parameters", "nbar", "allocation"});
  Reader cv(cv_t, "cv.", filled);
  s.cv.modes = static_cast<std::size_t>(cv.integer("modes", 4, 1));
  s.cv.parameters = static_cast<std::size_t>(cv.integer("parameters", 2, 1));
  s.cv.nbar = cv.number("nbar", 100.0);
  s.cv.allocation = cv.numbers("allocation", {});
  if (s.cv.parameters > s.cv.modes) field_error("cv.parameters", "must not exceed cv.modes", cv.node("parameters"));
  if (s.cv.nbar < 0.0) field_error("cv.nbar", "must be non-negative", cv.node("nbar"));

  const toml::table* nogo_t = section(root, "nogo");
  if (nogo_t) check_keys(*nogo_t, "nogo.", {"networks", "layers"});
  Reader nogo(nogo_t, "nogo.", filled);
  s.nogo.networks = static_cast<std::size_t>(nogo.integer("networks", 20, 1));
  s.nogo.layers = static_cast<std::size_t>(nogo.integer("layers", 6, 1));

  // Cross-field checks that need the assembled scenario.
  const bool uses_space = s.task != Task::cv_advantage;
  if (uses_space && s.task != Task::sweep_K) {
    const SpaceSpec built = build_space(s);
    if (s.noise.pattern == NoisePattern::custom) build_v(s, built.num_sites());
    if (s.noise.background && s.noise.background->rows() != static_cast<Eigen::Index>(built.num_sites())) {
      fail(ErrorCode::ValidationError, "noise.background: size does not match the number of sites");
    }
    build_probe(s.probe, built);
  }
  if (s.task == Task::sweep_K && s.noise.pattern == NoisePattern::custom) {
    fail(ErrorCode::ValidationError, "noise.pattern: sweep_K needs a pattern that expands to every K");
  }
  if (s.task == Task::qfi_multi) {
    const std::size_t k = build_space(s).num_sites();
    if (s.multi.w == "custom" && s.multi.W.rows() != static_cast<Eigen::Index>(k)) {
      fail(ErrorCode::ValidationError, "multi.w: matrix size does not match the number of sites");
    }
    const RMatrix W = build_w(s, k);
    const double err = (W * W.transpose() - RMatrix::Identity(W.rows(), W.rows())).cwiseAbs().maxCoeff();
    if (err > 1e-10) fail(ErrorCode::NotOrthogonal, "multi.w: W W^T departs from identity by " + format_value(err));
  }
  if (s.task == Task::rayleigh) {
    if (s.noise.sigma2.empty()) fail(ErrorCode::ValidationError, "noise.sigma2: the rayleigh task needs a background grid");
    rank_one_factor(build_v(s, build_space(s).num_sites()));
  }
  if (s.task == Task::nogo_passive) {
    const SpaceSpec built = build_space(s);
    for (const SiteSpec& site : built.sites()) {
      if (site.kind != SiteKind::boson) fail(ErrorCode::NonBosonicSite, "space: nogo_passive needs boson sites");
    }
  }
  return s;
}

RMatrix build_w(const Scenario& s, std::size_t k) {
  if (s.multi.w == "custom") return s.multi.W;
  if (s.multi.w == "dct") return dct_orthonormal(k);
  return RMatrix::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ValidationError, "cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str(), path.string());
  s.source = path;
  return s;
}

namespace {

toml::array to_array(const std::vector<double>& xs) {
  toml::array arr;
  for (double x : xs) arr.push_back(x);
  return arr;
}

toml::array to_array(const RMatrix& m) {
  toml::array rows;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    toml::array row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

toml::table resolved_table(const Scenario& s) {
  toml::table root;
  root.insert_or_assign("name", s.name);
  root.insert_or_assign("task", std::string(to_string(s.task)));
  root.insert_or_assign("output", s.output);
  root.insert_or_assign("plots", s.plots);

  toml::table space;
  auto site_table = [](const SiteSpec& site) {
    toml::table t;
    t.insert_or_assign("kind", std::string(to_string(site.kind)));
    t.insert_or_assign("generator", std::string(to_string(site.generator)));
    if (site.kind == SiteKind::boson) t.insert_or_assign("truncation", static_cast<std::int64_t>(site.truncation));
    return t;
  };
  if (!s.space.per_site.empty()) {
    toml::array sites;
    for (const SiteSpec& site : s.space.per_site) sites.push_back(site_table(site));
    space.insert_or_assign("site", std::move(sites));
  } else {
    space = site_table(s.space.site);
    if (s.space.site.kind == SiteKind::boson && s.space.site.truncation < 1) space.erase("truncation");
    space.insert_or_assign("sites", static_cast<std::int64_t>(s.space.sites));
  }
  root.insert_or_assign("space", std::move(space));

  toml::table probe;
  probe.insert_or_assign("family", std::string(to_string(s.probe.family)));
  probe.insert_or_assign("photons", static_cast<std::int64_t>(s.probe.photons));
  probe.insert_or_assign("nbar", s.probe.nbar);
  toml::array occ;
  for (int o : s.probe.occupations) occ.push_back(static_cast<std::int64_t>(o));
  probe.insert_or_assign("occupations", std::move(occ));
  if (s.probe.family == ProbeFamily::custom) {
    std::vector<double> re, im;
    for (Eigen::Index i = 0; i < s.probe.amplitudes.size(); ++i) {
      re.push_back(s.probe.amplitudes(i).real());
      im.push_back(s.probe.amplitudes(i).imag());
    }
    probe.insert_or_assign("amplitudes", to_array(re));
    probe.insert_or_assign("amplitudes_im", to_array(im));
  }
  root.insert_or_assign("probe", std::move(probe));

  toml::table noise;
  noise.insert_or_assign("g", to_array(s.noise.g));
  noise.insert_or_assign("pattern", std::string(to_string(s.noise.pattern)));
  if (s.noise.pattern == NoisePattern::custom) noise.insert_or_assign("v", to_array(s.noise.v));
  noise.insert_or_assign("sigma2", to_array(s.noise.sigma2));
  if (s.noise.background) noise.insert_or_assign("background", to_array(*s.noise.background));
  root.insert_or_assign("noise", std::move(noise));

  toml::table method;
  method.insert_or_assign("backend", std::string(to_string(s.method.backend)));
  method.insert_or_assign("oracle", s.method.oracle);
  method.insert_or_assign("oracle_channel", std::string(to_string(s.method.oracle_channel)));
  method.insert_or_assign("quadrature_points", static_cast<std::int64_t>(s.method.quadrature_points));
  method.insert_or_assign("samples", static_cast<std::int64_t>(s.method.samples));
  method.insert_or_assign("shots", static_cast<std::int64_t>(s.method.shots));
  method.insert_or_assign("seeds", static_cast<std::int64_t>(s.method.seeds));
  method.insert_or_assign("seed", static_cast<std::int64_t>(s.method.seed));
  method.insert_or_assign("threads", static_cast<std::int64_t>(s.method.threads));
  method.insert_or_assign("allow_saturation", s.method.allow_saturation);
  root.insert_or_assign("method", std::move(method));

  toml::table sweep;
  sweep.insert_or_assign("k_min", static_cast<std::int64_t>(s.sweep.k_min));
  sweep.insert_or_assign("k_max", static_cast<std::int64_t>(s.sweep.k_max));
  sweep.insert_or_assign("entangled", std::string(to_string(s.sweep.entangled)));
  sweep.insert_or_assign("separable", std::string(to_string(s.sweep.separable)));
  root.insert_or_assign("sweep", std::move(sweep));

  toml::table multi;
  if (s.multi.w == "custom") {
    multi.insert_or_assign("w", to_array(s.multi.W));
  } else {
    multi.insert_or_assign("w", s.multi.w);
  }
  root.insert_or_assign("multi", std::move(multi));

  toml::table cv;
  cv.insert_or_assign("modes", static_cast<std::int64_t>(s.cv.modes));
  cv.insert_or_assign("parameters", static_cast<std::int64_t>(s.cv.parameters));
  cv.insert_or_assign("nbar", s.cv.nbar);
  cv.insert_or_assign("allocation", to_array(s.cv.allocation));
  root.insert_or_assign("cv", std::move(cv));

  toml::table nogo;
  nogo.insert_or_assign("networks", static_cast<std::int64_t>(s.nogo.networks));
  nogo.insert_or_assign("layers", static_cast<std::int64_t>(s.nogo.layers));
  root.insert_or_assign("nogo", std::move(nogo));
  return root;
}

}  // namespace

std::string resolved_toml(const Scenario& s) {
  std::ostringstream os;
  os << resolved_table(s) << '\n';
  return os.str();
}

std::string resolved_json(const Scenario& s) {
  std::ostringstream os;
  os << toml::json_formatter{resolved_table(s)};
  return os.str();
}

}  // namespace qsn
