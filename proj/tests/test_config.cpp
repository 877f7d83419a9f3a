#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mineig/config.hpp"

using namespace mineig;

namespace {

// e.what() must mention every listed fragment; keeps error-message contracts
// (field paths, scenario prefixes) pinned without exact-string brittleness.
template <typename Fn>
void check_throws_with(Fn&& fn, const std::vector<std::string>& fragments) {
  try {
    fn();
    FAIL_CHECK("expected std::invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    for (const std::string& frag : fragments) {
      CAPTURE(what);
      CAPTURE(frag);
      CHECK_NE(what.find(frag), std::string::npos);
    }
  }
}

const char* kMarkovJson = R"({
  "scenario": "markov",
  "dim": 2,
  "trials": 5000,
  "workers": 7,
  "ci_level": 0.95,
  "seed": {"master_seed": 42, "stream_id": 3},
  "params": {"extra": 1.5},
  "matrices": {"a": [[2.0, 0.5], [0.5, 1.0]]},
  "distribution": {"kind": "tight_example", "p": 0.25, "a": [[2.0, 0.5], [0.5, 1.0]]}
})";

}  // namespace

TEST_CASE("known scenario tags") {
  const auto tags = known_scenarios();
  CHECK_EQ(tags.size(), 20);
  const std::set<std::string> uniq(tags.begin(), tags.end());
  CHECK_EQ(uniq.size(), tags.size());
  for (const char* expect : {"markov", "chebyshev", "master", "eb", "randomized_eb", "ville"}) {
    CHECK(uniq.count(expect) == 1);
  }
}

TEST_CASE("parse reads every field") {
  const ExperimentConfig c = parse_config(kMarkovJson);
  CHECK_EQ(c.scenario, "markov");
  CHECK_EQ(c.dim, 2);
  CHECK_EQ(c.trials, 5000);
  CHECK_EQ(c.workers, 7);
  CHECK_EQ(c.ci_level, 0.95);
  CHECK_EQ(c.seed.master_seed, 42);
  CHECK_EQ(c.seed.stream_id, 3);
  CHECK_EQ(c.param("extra"), 1.5);
  CHECK_EQ(c.param_or("absent", -2.0), -2.0);
  CHECK(c.has_param("extra"));
  CHECK_FALSE(c.has_param("absent"));
  CHECK_EQ(c.matrix("a")(0, 1), 0.5);
  CHECK_EQ(c.dist_spec().kind, "tight_example");
  CHECK_EQ(c.dist_spec().p, 0.25);
  validate_config(c);
}

TEST_CASE("defaults when fields are omitted") {
  const ExperimentConfig c = parse_config(R"({"scenario": "markov", "dim": 1})");
  CHECK_EQ(c.trials, 100000);
  CHECK_EQ(c.workers, 1);
  CHECK_EQ(c.ci_level, 0.99);
  CHECK_EQ(c.seed.master_seed, 0x5DEECE66DULL);
  CHECK_EQ(c.seed.stream_id, 0);
  CHECK(c.out.empty());
}

TEST_CASE("parse rejections name the offending field") {
  check_throws_with([] { parse_config("{not json"); }, {"config is not valid JSON"});
  check_throws_with([] { parse_config(R"(["scenario"])"); }, {"config root must be an object"});
  check_throws_with([] { parse_config(R"({"dim": 2})"); }, {"field 'scenario' is required"});
  check_throws_with([] { parse_config(R"({"scenario": "markov"})"); },
                    {"field 'dim' is required"});
  check_throws_with([] { parse_config(R"({"scenario": "markov", "dim": 0})"); },
                    {"field 'dim' must be >= 1"});
  check_throws_with([] { parse_config(R"({"scenario": "m", "dim": 1, "trials": -5})"); },
                    {"field 'trials' must be >= 0"});
  check_throws_with([] { parse_config(R"({"scenario": "m", "dim": 1, "workers": 0})"); },
                    {"field 'workers' must be >= 1"});
  check_throws_with([] { parse_config(R"({"scenario": "m", "dim": 1, "ci_level": 1.0})"); },
                    {"field 'ci_level' must lie in (0, 1)"});
  check_throws_with([] { parse_config(R"({"scenario": "m", "dim": 1, "trails": 7})"); },
                    {"config has unknown field 'trails'"});
  check_throws_with(
      [] { parse_config(R"({"scenario": "m", "dim": 1, "params": {"t": "one"}})"); },
      {"field 'params.t' must be numeric"});
  check_throws_with(
      [] { parse_config(R"({"scenario": "m", "dim": 1, "matrices": {"a": [[1, 2]]}})"); },
      {"field 'matrices.a'"});
  check_throws_with(
      [] {
        parse_config(R"({"scenario": "m", "dim": 1, "distribution": {"kind": "mystery"}})");
      },
      {"field 'distribution.kind' has unknown value 'mystery'"});
  check_throws_with(
      [] {
        parse_config(R"({"scenario": "m", "dim": 1, "distribution": {"kind": "tight_example"}})");
      },
      {"field 'distribution.p' is required"});
  check_throws_with(
      [] {
        parse_config(
            R"({"scenario": "m", "dim": 1, "stopping": {"kind": "fixed_n", "horizon": 0}})");
      },
      {"field 'stopping.horizon' must be >= 1"});
  check_throws_with(
      [] {
        parse_config(
            R"({"scenario": "m", "dim": 1, "factors": {"probs": [0.5], "values": [1.0, 2.0]}})");
      },
      {"field 'factors'"});
}

TEST_CASE("validate_config checks scenario requirements") {
  ExperimentConfig c = parse_config(R"({"scenario": "nonsense", "dim": 2})");
  check_throws_with([&] { validate_config(c); }, {"unknown scenario tag 'nonsense'", "markov"});

  // markov without its matrix.
  ExperimentConfig markov = parse_config(kMarkovJson);
  markov.matrices.clear();
  check_throws_with([&] { validate_config(markov); },
                    {"scenario 'markov': field 'matrices.a' is required"});
  markov = parse_config(kMarkovJson);
  markov.distribution.reset();
  check_throws_with([&] { validate_config(markov); },
                    {"scenario 'markov': field 'distribution' is required"});

  // chebyshev power must be >= 1, root order in (0, 1].
  ExperimentConfig cheb = parse_config(kMarkovJson);
  cheb.scenario = "chebyshev";
  cheb.params["p"] = 0.5;
  check_throws_with([&] { validate_config(cheb); },
                    {"scenario 'chebyshev': field 'params.p'", "outside"});
  cheb.params.erase("p");
  cheb.params["q"] = 1.5;
  check_throws_with([&] { validate_config(cheb); }, {"field 'params.q'"});
  cheb.params["q"] = 1.0;
  validate_config(cheb);

  // chernoff_kl threshold must dominate the mean.
  ExperimentConfig kl = parse_config(
      R"({"scenario": "chernoff_kl", "dim": 1, "params": {"n": 5, "m": 0.6, "a": 0.4}})");
  check_throws_with([&] { validate_config(kl); }, {"field 'params.a'"});
  kl.params["a"] = 0.8;
  validate_config(kl);

  // doob needs a factor distribution and a bounded horizon.
  ExperimentConfig doob = parse_config(R"({
    "scenario": "doob", "dim": 1,
    "matrices": {"b": [[1.0]], "a": [[2.0]]},
    "factors": {"probs": [0.5, 0.5], "values": [1.5, 0.5]},
    "params": {"horizon": 4}
  })");
  validate_config(doob);
  doob.params["horizon"] = 100.0;
  check_throws_with([&] { validate_config(doob); }, {"field 'params.horizon'"});
  doob.params["horizon"] = 4.0;
  doob.factors.reset();
  check_throws_with([&] { validate_config(doob); },
                    {"scenario 'doob': field 'factors' is required"});

  // eb gammas must sit strictly inside (0, 1).
  ExperimentConfig eb = parse_config(R"({
    "scenario": "eb", "dim": 1,
    "distribution": {"kind": "explicit_atoms",
                     "atoms": [{"prob": 0.5, "value": [[1.0]]},
                               {"prob": 0.5, "value": [[-1.0]]}]},
    "gammas": [0.5, 0.25],
    "params": {"alpha": 0.1}
  })");
  validate_config(eb);
  eb.gammas = {0.5, 1.0};
  check_throws_with([&] { validate_config(eb); }, {"'gammas' entries must lie in (0, 1)"});
  eb.gammas.clear();
  check_throws_with([&] { validate_config(eb); }, {"field 'gammas' is required"});
}

TEST_CASE("spec builders") {
  DistSpec tight;
  tight.kind = "tight_example";
  tight.p = 0.3;
  tight.a = SymMatrix::identity(2).scaled(2.0);
  CHECK_EQ(tight.build(2).atoms().size(), 2);
  check_throws_with([&] { tight.build(3); }, {"dim does not match"});

  DistSpec iid;
  iid.kind = "bounded_iid";
  iid.m = 0.4;
  CHECK_EQ(iid.build(3).exact_mean()(0, 0), doctest::Approx(0.4));

  DistSpec bogus;
  bogus.kind = "mystery";
  check_throws_with([&] { bogus.build(1); }, {"unknown kind 'mystery'"});

  StoppingConfig fixed;
  fixed.kind = "fixed_n";
  fixed.horizon = 5;
  CHECK_EQ(fixed.build().kind, StoppingRule::Kind::FixedN);
  CHECK_EQ(fixed.build().horizon, 5);
  StoppingConfig hit;
  hit.kind = "first_hit";
  hit.horizon = 9;
  CHECK_EQ(hit.build().kind, StoppingRule::Kind::FirstHitCapped);
  StoppingConfig badstop;
  badstop.kind = "whenever";
  check_throws_with([&] { badstop.build(); }, {"stopping.kind has unknown value"});

  SuperUniformConfig su;
  for (const char* kind : {"scalar_times_identity", "diagonal_plus_psd", "identity"}) {
    su.kind = kind;
    CHECK_EQ(su.build(2).dim, 2);
  }
  su.kind = "uniform_cube";
  check_throws_with([&] { su.build(2); }, {"super_uniform.kind has unknown value"});
}

TEST_CASE("serialize round-trips and drops the workers knob") {
  const ExperimentConfig c = parse_config(kMarkovJson);
  const std::string once = serialize_config(c);
  // workers is scheduling state, not config identity.
  CHECK_EQ(once.find("workers"), std::string::npos);
  const ExperimentConfig back = parse_config(once);
  CHECK_EQ(back.workers, 1);
  CHECK_EQ(back.scenario, c.scenario);
  CHECK_EQ(back.trials, c.trials);
  CHECK_EQ(back.seed.master_seed, c.seed.master_seed);
  CHECK_EQ(back.seed.stream_id, c.seed.stream_id);
  CHECK_EQ(serialize_config(back), once);
}

TEST_CASE("round-trip covers every optional section") {
  ExperimentConfig c;
  c.scenario = "master";
  c.dim = 2;
  c.trials = 777;
  c.ci_level = 0.9;
  c.seed = SeedSpec{9, 1};
  c.out = "report.json";
  c.params = {{"t", 0.4}, {"n", 3.0}};
  c.matrices.insert_or_assign("a", SymMatrix::from_rows({{1.0, 0.25}, {0.25, 2.0}}));
  c.matrix_lists["a_k"] = {SymMatrix::identity(2), SymMatrix::diagonal({2.0, 0.5})};
  DistSpec d1;
  d1.kind = "bounded_iid";
  d1.m = 0.3;
  DistSpec d2;
  d2.kind = "explicit_atoms";
  d2.atoms = {{0.4, SymMatrix::identity(2)}, {0.6, SymMatrix::zero(2)}};
  c.distribution = d1;
  c.distributions = {d1, d2};
  SuperUniformConfig su;
  su.kind = "diagonal_plus_psd";
  su.psd_part = SymMatrix::identity(2).scaled(0.5);
  c.super_uniform = su;
  ScalarDist factors;
  factors.probs = {0.5, 0.5};
  factors.values = {1.5, 0.5};
  c.factors = factors;
  StoppingConfig stop;
  stop.kind = "first_hit";
  stop.horizon = 6;
  c.stopping = stop;
  c.gammas = {0.2, 0.4};

  const std::string text = serialize_config(c);
  const ExperimentConfig back = parse_config(text);
  CHECK_EQ(serialize_config(back), text);
  CHECK_EQ(back.out, "report.json");
  CHECK_EQ(back.matrix_list("a_k").size(), 2);
  CHECK_EQ(back.distributions.size(), 2);
  CHECK_EQ(back.distributions[1].atoms.size(), 2);
  REQUIRE(back.super_uniform.has_value());
  CHECK(back.super_uniform->psd_part.has_value());
  REQUIRE(back.factors.has_value());
  CHECK_EQ(back.factors->values[0], 1.5);
  REQUIRE(back.stopping.has_value());
  CHECK_EQ(back.stopping->horizon, 6);
  CHECK_EQ(back.gammas, (std::vector<double>{0.2, 0.4}));
}

TEST_CASE("shipped configs load, validate, and reach a serialization fixpoint") {
  namespace fs = std::filesystem;
  const fs::path dir{MINEIG_CONFIG_DIR};
  REQUIRE(fs::is_directory(dir));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  CHECK_EQ(files.size(), 20);

  std::set<std::string> seen;
  for (const fs::path& file : files) {
    CAPTURE(file.string());
    const ExperimentConfig c = load_config_file(file.string());
    validate_config(c);
    seen.insert(c.scenario);
    const std::string once = serialize_config(c);
    CHECK_EQ(serialize_config(parse_config(once)), once);
  }
  // One shipped config per scenario tag.
  CHECK_EQ(seen.size(), known_scenarios().size());
}

TEST_CASE("load_config_file errors carry the path") {
  check_throws_with([] { load_config_file("/nonexistent/path/conf.json"); },
                    {"cannot open config file", "/nonexistent/path/conf.json"});
}
