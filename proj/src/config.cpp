#include "mineig/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace mineig {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

SymMatrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail("field '" + field + "' must be a nested array of rows");
  std::vector<std::vector<double>> rows;
  rows.reserve(j.size());
  for (const Json& row : j) {
    if (!row.is_array()) fail("field '" + field + "' must be a nested array of rows");
    rows.emplace_back();
    for (const Json& v : row) {
      if (!v.is_number()) fail("field '" + field + "' has a non-numeric entry");
      rows.back().push_back(v.get<double>());
    }
  }
  try {
    return SymMatrix::from_rows(rows);
  } catch (const std::exception& e) {
    fail("field '" + field + "': " + e.what());
  }
}

Json matrix_to_json(const SymMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.dim(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

DistSpec dist_from_json(const Json& j, const std::string& field) {
  DistSpec spec;
  if (!j.is_object() || !j.contains("kind")) fail("field '" + field + "' needs a 'kind' tag");
  spec.kind = j.at("kind").get<std::string>();
  if (spec.kind == "tight_example") {
    if (!j.contains("p")) fail("field '" + field + ".p' is required for tight_example");
    if (!j.contains("a")) fail("field '" + field + ".a' is required for tight_example");
    spec.p = j.at("p").get<double>();
    spec.a = matrix_from_json(j.at("a"), field + ".a");
  } else if (spec.kind == "bounded_iid") {
    if (!j.contains("m")) fail("field '" + field + ".m' is required for bounded_iid");
    spec.m = j.at("m").get<double>();
  } else if (spec.kind == "explicit_atoms") {
    if (!j.contains("atoms") || !j.at("atoms").is_array() || j.at("atoms").empty()) {
      fail("field '" + field + ".atoms' must be a nonempty array");
    }
    for (std::size_t i = 0; i < j.at("atoms").size(); ++i) {
      const Json& atom = j.at("atoms")[i];
      const std::string afield = field + ".atoms[" + std::to_string(i) + "]";
      if (!atom.contains("prob") || !atom.contains("value")) {
        fail("field '" + afield + "' needs 'prob' and 'value'");
      }
      spec.atoms.push_back(
          {atom.at("prob").get<double>(), matrix_from_json(atom.at("value"), afield + ".value")});
    }
  } else {
    fail("field '" + field + ".kind' has unknown value '" + spec.kind +
         "' (expected tight_example, bounded_iid, or explicit_atoms)");
  }
  return spec;
}

Json dist_to_json(const DistSpec& spec) {
  Json j;
  j["kind"] = spec.kind;
  if (spec.kind == "tight_example") {
    j["p"] = spec.p;
    j["a"] = matrix_to_json(*spec.a);
  } else if (spec.kind == "bounded_iid") {
    j["m"] = spec.m;
  } else {
    Json atoms = Json::array();
    for (const Atom& a : spec.atoms) {
      Json atom;
      atom["prob"] = a.prob;
      atom["value"] = matrix_to_json(a.value);
      atoms.push_back(atom);
    }
    j["atoms"] = atoms;
  }
  return j;
}

}  // namespace

DiscreteMatrixDist DistSpec::build(int dim) const {
  if (kind == "tight_example") {
    if (!a) fail("distribution: tight_example needs matrix 'a'");
    if (a->dim() != dim) fail("distribution: matrix 'a' dim does not match config dim");
    return tight_example_dist(*a, p);
  }
  if (kind == "bounded_iid") return bounded_iid_dist(dim, m);
  if (kind == "explicit_atoms") {
    DiscreteMatrixDist dist(atoms);
    if (dist.dim() != dim) fail("distribution: atom dim does not match config dim");
    return dist;
  }
  fail("distribution: unknown kind '" + kind + "'");
}

StoppingRule StoppingConfig::build() const {
  if (kind == "fixed_n") return StoppingRule::fixed(horizon);
  if (kind == "first_hit") return StoppingRule::first_hit_capped(horizon);
  fail("stopping.kind has unknown value '" + kind + "' (expected fixed_n or first_hit)");
}

SuperUniformSpec SuperUniformConfig::build(int dim) const {
  if (kind == "scalar_times_identity") return SuperUniformSpec::scalar_times_identity(dim);
  if (kind == "diagonal_plus_psd") return SuperUniformSpec::diagonal_plus_psd(dim, psd_part);
  if (kind == "identity") return SuperUniformSpec::identity(dim);
  fail("super_uniform.kind has unknown value '" + kind + "'");
}

bool ExperimentConfig::has_param(const std::string& name) const {
  return params.find(name) != params.end();
}

double ExperimentConfig::param(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end()) {
    fail("scenario '" + scenario + "': field 'params." + name + "' is required");
  }
  return it->second;
}

double ExperimentConfig::param_or(const std::string& name, double fallback) const {
  const auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

const SymMatrix& ExperimentConfig::matrix(const std::string& name) const {
  const auto it = matrices.find(name);
  if (it == matrices.end()) {
    fail("scenario '" + scenario + "': field 'matrices." + name + "' is required");
  }
  return it->second;
}

const std::vector<SymMatrix>& ExperimentConfig::matrix_list(const std::string& name) const {
  const auto it = matrix_lists.find(name);
  if (it == matrix_lists.end()) {
    fail("scenario '" + scenario + "': field 'matrix_lists." + name + "' is required");
  }
  return it->second;
}

const DistSpec& ExperimentConfig::dist_spec() const {
  if (!distribution) fail("scenario '" + scenario + "': field 'distribution' is required");
  return *distribution;
}

std::vector<std::string> known_scenarios() {
  return {"markov",
          "chebyshev",
          "chernoff",
          "chernoff_kl",
          "laplace",
          "master",
          "bernstein_bounded",
          "bernstein_subexp",
          "azuma",
          "mcdiarmid",
          "hoeffding",
          "doob",
          "ville",
          "eb",
          "randomized_markov",
          "randomized_chebyshev",
          "randomized_chernoff",
          "randomized_chernoff_hoeffding",
          "randomized_ville",
          "randomized_eb"};
}

ExperimentConfig parse_config(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const std::exception& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config root must be an object");

  static const char* kKnownKeys[] = {"scenario",     "dim",           "trials",
                                     "workers",      "ci_level",      "seed",
                                     "out",          "params",        "matrices",
                                     "matrix_lists", "distribution",  "distributions",
                                     "super_uniform", "factors",      "stopping",
                                     "gammas"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* k : kKnownKeys) known = known || key == k;
    if (!known) fail("config has unknown field '" + key + "'");
  }

  ExperimentConfig c;
  if (!j.contains("scenario")) fail("field 'scenario' is required");
  c.scenario = j.at("scenario").get<std::string>();
  if (!j.contains("dim")) fail("field 'dim' is required");
  c.dim = j.at("dim").get<int>();
  if (c.dim < 1) fail("field 'dim' must be >= 1");
  if (j.contains("trials")) c.trials = j.at("trials").get<std::int64_t>();
  if (c.trials < 0) fail("field 'trials' must be >= 0");
  if (j.contains("workers")) c.workers = j.at("workers").get<int>();
  if (c.workers < 1) fail("field 'workers' must be >= 1");
  if (j.contains("ci_level")) c.ci_level = j.at("ci_level").get<double>();
  if (!(c.ci_level > 0.0 && c.ci_level < 1.0)) fail("field 'ci_level' must lie in (0, 1)");
  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    if (!s.is_object()) fail("field 'seed' must be an object");
    if (s.contains("master_seed")) c.seed.master_seed = s.at("master_seed").get<std::uint64_t>();
    if (s.contains("stream_id")) c.seed.stream_id = s.at("stream_id").get<std::uint64_t>();
  }
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  if (j.contains("params")) {
    for (const auto& [key, value] : j.at("params").items()) {
      if (!value.is_number()) fail("field 'params." + key + "' must be numeric");
      c.params.emplace(key, value.get<double>());
    }
  }
  if (j.contains("matrices")) {
    for (const auto& [key, value] : j.at("matrices").items()) {
      c.matrices.emplace(key, matrix_from_json(value, "matrices." + key));
    }
  }
  if (j.contains("matrix_lists")) {
    for (const auto& [key, value] : j.at("matrix_lists").items()) {
      if (!value.is_array() || value.empty()) {
        fail("field 'matrix_lists." + key + "' must be a nonempty array of matrices");
      }
      std::vector<SymMatrix> mats;
      for (std::size_t i = 0; i < value.size(); ++i) {
        mats.push_back(
            matrix_from_json(value[i], "matrix_lists." + key + "[" + std::to_string(i) + "]"));
      }
      c.matrix_lists.emplace(key, std::move(mats));
    }
  }
  if (j.contains("distribution")) {
    c.distribution = dist_from_json(j.at("distribution"), "distribution");
  }
  if (j.contains("distributions")) {
    const Json& arr = j.at("distributions");
    if (!arr.is_array() || arr.empty()) fail("field 'distributions' must be a nonempty array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      c.distributions.push_back(
          dist_from_json(arr[i], "distributions[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("super_uniform")) {
    const Json& s = j.at("super_uniform");
    SuperUniformConfig su;
    if (!s.is_object() || !s.contains("kind")) fail("field 'super_uniform' needs a 'kind' tag");
    su.kind = s.at("kind").get<std::string>();
    if (s.contains("psd_part")) {
      su.psd_part = matrix_from_json(s.at("psd_part"), "super_uniform.psd_part");
    }
    c.super_uniform = su;
  }
  if (j.contains("factors")) {
    const Json& f = j.at("factors");
    if (!f.is_object() || !f.contains("probs") || !f.contains("values")) {
      fail("field 'factors' needs 'probs' and 'values' arrays");
    }
    ScalarDist dist;
    for (const Json& v : f.at("probs")) dist.probs.push_back(v.get<double>());
    for (const Json& v : f.at("values")) dist.values.push_back(v.get<double>());
    try {
      dist.validate();
    } catch (const std::exception& e) {
      fail(std::string("field 'factors': ") + e.what());
    }
    c.factors = dist;
  }
  if (j.contains("stopping")) {
    const Json& s = j.at("stopping");
    StoppingConfig sc;
    if (!s.is_object() || !s.contains("kind")) fail("field 'stopping' needs a 'kind' tag");
    sc.kind = s.at("kind").get<std::string>();
    if (s.contains("horizon")) sc.horizon = s.at("horizon").get<std::size_t>();
    if (sc.horizon < 1) fail("field 'stopping.horizon' must be >= 1");
    c.stopping = sc;
  }
  if (j.contains("gammas")) {
    for (const Json& v : j.at("gammas")) c.gammas.push_back(v.get<double>());
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const std::invalid_argument& e) {
    fail(path + ": " + e.what());
  }
}

std::string serialize_config(const ExperimentConfig& c) {
  Json j;
  j["scenario"] = c.scenario;
  j["dim"] = c.dim;
  j["trials"] = c.trials;
  // workers is a scheduling knob with a bit-identical-output contract, so it
  // is not part of a config's identity and is never echoed.
  j["ci_level"] = c.ci_level;
  j["seed"] = Json{{"master_seed", c.seed.master_seed}, {"stream_id", c.seed.stream_id}};
  if (!c.out.empty()) j["out"] = c.out;
  if (!c.params.empty()) {
    Json params;
    for (const auto& [key, value] : c.params) params[key] = value;
    j["params"] = params;
  }
  if (!c.matrices.empty()) {
    Json mats;
    for (const auto& [key, value] : c.matrices) mats[key] = matrix_to_json(value);
    j["matrices"] = mats;
  }
  if (!c.matrix_lists.empty()) {
    Json lists;
    for (const auto& [key, value] : c.matrix_lists) {
      Json arr = Json::array();
      for (const SymMatrix& m : value) arr.push_back(matrix_to_json(m));
      lists[key] = arr;
    }
    j["matrix_lists"] = lists;
  }
  if (c.distribution) j["distribution"] = dist_to_json(*c.distribution);
  if (!c.distributions.empty()) {
    Json arr = Json::array();
    for (const DistSpec& d : c.distributions) arr.push_back(dist_to_json(d));
    j["distributions"] = arr;
  }
  if (c.super_uniform) {
    Json s;
    s["kind"] = c.super_uniform->kind;
    if (c.super_uniform->psd_part) s["psd_part"] = matrix_to_json(*c.super_uniform->psd_part);
    j["super_uniform"] = s;
  }
  if (c.factors) {
    j["factors"] = Json{{"probs", c.factors->probs}, {"values", c.factors->values}};
  }
  if (c.stopping) {
    j["stopping"] = Json{{"kind", c.stopping->kind}, {"horizon", c.stopping->horizon}};
  }
  if (!c.gammas.empty()) j["gammas"] = c.gammas;
  return j.dump(2) + "\n";
}

namespace {

void check_dim(const ExperimentConfig& c, const std::string& field, const SymMatrix& m) {
  if (m.dim() != c.dim) {
    fail("scenario '" + c.scenario + "': field '" + field + "' has dim " +
         std::to_string(m.dim()) + " but config dim is " + std::to_string(c.dim));
  }
}

void check_list_dims(const ExperimentConfig& c, const std::string& name) {
  const auto& mats = c.matrix_list(name);
  for (std::size_t i = 0; i < mats.size(); ++i) {
    check_dim(c, "matrix_lists." + name + "[" + std::to_string(i) + "]", mats[i]);
  }
}

void require_param_in(const ExperimentConfig& c, const std::string& name, double lo, double hi,
                      bool lo_open, bool hi_open) {
  const double v = c.param(name);
  const bool lo_ok = lo_open ? v > lo : v >= lo;
  const bool hi_ok = hi_open ? v < hi : v <= hi;
  if (!lo_ok || !hi_ok) {
    std::ostringstream os;
    os << "scenario '" << c.scenario << "': field 'params." << name << "' = " << v
       << " outside " << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]");
    fail(os.str());
  }
}

void validate_gammas(const ExperimentConfig& c) {
  if (c.gammas.empty()) {
    fail("scenario '" + c.scenario + "': field 'gammas' is required and must be nonempty");
  }
  for (double g : c.gammas) {
    if (!(g > 0.0 && g < 1.0)) {
      fail("scenario '" + c.scenario + "': field 'gammas' entries must lie in (0, 1)");
    }
  }
}

}  // namespace

void validate_config(const ExperimentConfig& c) {
  bool known = false;
  for (const std::string& s : known_scenarios()) known = known || s == c.scenario;
  if (!known) {
    std::string names;
    for (const std::string& s : known_scenarios()) names += (names.empty() ? "" : ", ") + s;
    fail("unknown scenario tag '" + c.scenario + "' (known: " + names + ")");
  }

  const std::string& s = c.scenario;
  if (s == "markov" || s == "randomized_markov") {
    c.dist_spec();
    check_dim(c, "matrices.a", c.matrix("a"));
  } else if (s == "chebyshev" || s == "randomized_chebyshev") {
    c.dist_spec();
    check_dim(c, "matrices.a", c.matrix("a"));
    if (s == "chebyshev") {
      if (c.has_param("p")) require_param_in(c, "p", 1.0, 1e9, false, true);
      if (c.has_param("q")) require_param_in(c, "q", 0.0, 1.0, true, false);
    } else {
      require_param_in(c, "q", 0.0, 1.0, true, false);
    }
  } else if (s == "chernoff") {
    c.dist_spec();
    check_dim(c, "matrices.a", c.matrix("a"));
    check_dim(c, "matrices.t_conj", c.matrix("t_conj"));
    check_dim(c, "matrices.t_conj2", c.matrix("t_conj2"));
    require_param_in(c, "n", 1.0, 1e6, false, true);
  } else if (s == "chernoff_kl") {
    require_param_in(c, "n", 1.0, 1e6, false, true);
    require_param_in(c, "m", 0.0, 1.0, true, true);
    require_param_in(c, "a", c.param("m"), 1.0, false, true);
  } else if (s == "laplace") {
    c.dist_spec();
    c.param("t");
  } else if (s == "master") {
    if (c.distributions.empty()) {
      fail("scenario 'master': field 'distributions' is required and must be nonempty");
    }
    c.param("t");
  } else if (s == "bernstein_bounded" || s == "bernstein_subexp" || s == "azuma") {
    check_list_dims(c, "a_k");
    if (c.param("t") < 0.0) fail("scenario '" + s + "': field 'params.t' must be >= 0");
  } else if (s == "mcdiarmid") {
    check_list_dims(c, "b_k");
    if (c.param("t") < 0.0) fail("scenario 'mcdiarmid': field 'params.t' must be >= 0");
  } else if (s == "hoeffding") {
    check_list_dims(c, "b_i");
    if (c.param("t") < 0.0) fail("scenario 'hoeffding': field 'params.t' must be >= 0");
  } else if (s == "doob" || s == "ville" || s == "randomized_ville") {
    check_dim(c, "matrices.b", c.matrix("b"));
    check_dim(c, "matrices.a", c.matrix("a"));
    if (!c.factors) fail("scenario '" + s + "': field 'factors' is required");
    require_param_in(c, "horizon", 1.0, 64.0, false, false);
  } else if (s == "eb" || s == "randomized_eb") {
    c.dist_spec();
    validate_gammas(c);
    require_param_in(c, "alpha", 0.0, 1.0, true, true);
  } else if (s == "randomized_chernoff") {
    c.dist_spec();
    check_dim(c, "matrices.a", c.matrix("a"));
    c.param("gamma");
  } else if (s == "randomized_chernoff_hoeffding") {
    c.dist_spec();
    require_param_in(c, "n", 1.0, 1e6, false, true);
    if (!(c.param("gamma") > 0.0)) {
      fail("scenario 'randomized_chernoff_hoeffding': field 'params.gamma' must be > 0");
    }
    if (!(c.param("beta") > 0.0)) {
      fail("scenario 'randomized_chernoff_hoeffding': field 'params.beta' must be > 0");
    }
  }
}

}  // namespace mineig
