#include <doctest.h>

#include <cmath>
#include <regex>
#include <string>
#include <vector>

#include "bgfit/errors.hpp"
#include "bgfit/simstudy.hpp"

using namespace bgfit;

namespace {

StudyConfig small_config(int reps, int threads) {
  StudyConfig c;
  c.laws = {{4.0, 36.0}, {4.0, 2.0}};
  c.sizes = {50, 200};
  c.replications = reps;
  c.base_seed = 99;
  c.estimators = {kAllEstimators.begin(), kAllEstimators.end()};
  c.threads = threads;
  return c;
}

int count_of(const std::string& haystack, const std::string& needle) {
  int n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("estimator keys and labels") {
  CHECK(label(Estimator::kBayes1) == "Bayes 1");
  CHECK(key(Estimator::kBayes2) == "bayes2");
  for (Estimator e : kAllEstimators) CHECK(estimator_from_key(key(e)) == e);
  CHECK_FALSE(estimator_from_key("bayes3"));
}

TEST_CASE("default configuration") {
  const auto c = default_study_config();
  REQUIRE(c.laws.size() == 4);
  CHECK(c.laws[0] == BetaGeometricLaw(4.0, 36.0));
  CHECK(c.laws[3] == BetaGeometricLaw(4.0, 2.0));
  CHECK(c.sizes == std::vector<std::int64_t>{100, 200, 300, 400, 500, 750, 1000});
  CHECK(c.replications == 5000);
  CHECK(c.base_seed == kDefaultSeed);
  CHECK(c.estimators.size() == 4);
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("replicates") {
  const auto rec = run_replicate({4.0, 36.0}, 1000, {kDefaultSeed, 3});
  for (Estimator e : kAllEstimators) {
    CAPTURE(label(e));
    REQUIRE(rec[e].has_value());
    CHECK(std::abs(*rec[e] - 0.1) < 0.05);
  }
  const auto again = run_replicate({4.0, 36.0}, 1000, {kDefaultSeed, 3});
  CHECK(again.theta_hat == rec.theta_hat);

  // Near the geometric limit the moment and likelihood fits may legitimately
  // fail; whatever succeeds sits near 0.5.
  const auto flat = run_replicate({1e6, 1e6}, 1000, {kDefaultSeed, 4});
  for (Estimator e : kAllEstimators) {
    if (flat[e]) CHECK(std::abs(*flat[e] - 0.5) < 0.05);
  }
  CHECK_THROWS_AS(run_replicate({4.0, 36.0}, 9, {}), DomainError);
}

TEST_CASE("one replication reproduces the replicate exactly") {
  StudyConfig c = small_config(1, 1);
  const auto table = run_study(c);
  for (std::size_t l = 0; l < c.laws.size(); ++l) {
    for (std::size_t s = 0; s < c.sizes.size(); ++s) {
      const auto rec = run_replicate(c.laws[l], c.sizes[s], {c.base_seed, replicate_stream(l, s, 0)});
      for (Estimator e : kAllEstimators) {
        const auto& cell = table.cell(l, s, e);
        if (!rec[e]) {
          CHECK(cell.failure_count == 1);
          continue;
        }
        const double bias = *rec[e] - table.theta_true(l);
        CHECK(cell.average_estimate == *rec[e]);
        CHECK(cell.bias == bias);
        CHECK(cell.mse == bias * bias);
        CHECK(std::isnan(cell.mc_standard_error));
      }
    }
  }
}

TEST_CASE("cell invariants and threading") {
  const auto one = run_study(small_config(60, 1));
  const auto three = run_study(small_config(60, 3));
  CHECK(one == three);
  CHECK(emit_tables(one, TableFormat::kTsv) == emit_tables(three, TableFormat::kTsv));
  CHECK(emit_tables(one, TableFormat::kJson) == emit_tables(three, TableFormat::kJson));
  for (std::size_t l = 0; l < one.laws().size(); ++l) {
    for (std::size_t s = 0; s < one.sizes().size(); ++s) {
      for (Estimator e : kAllEstimators) {
        const auto& c = one.cell(l, s, e);
        CHECK(c.successes + c.failure_count == 60);
        CHECK(c.bias == c.average_estimate - one.theta_true(l));
        CHECK(c.mse >= c.bias * c.bias * (1.0 - 1e-12));
        CHECK(c.mc_standard_error > 0.0);
      }
    }
  }
  CHECK_THROWS_AS(one.cell(5, 0, Estimator::kMme), std::out_of_range);
}

TEST_CASE("trend and sign on a short run") {
  StudyConfig c = small_config(300, 0);
  c.laws = {{4.0, 36.0}};
  c.sizes = {100, 1000};
  const auto t = run_study(c);
  for (Estimator e : kAllEstimators) CHECK(t.cell(0, 1, e).mse < t.cell(0, 0, e).mse);
  CHECK(t.cell(0, 0, Estimator::kMme).bias < 0.0);
  CHECK(t.cell(0, 1, Estimator::kMme).bias < 0.0);
  CHECK(t.cell(0, 1, Estimator::kMle).failure_count == 0);
}

TEST_CASE("json round trip") {
  const auto t = run_study(small_config(20, 0));
  const auto text = emit_tables(t, TableFormat::kJson);
  CHECK(text.find("bgfit-study/1") != std::string::npos);
  CHECK(parse_study_json(text) == t);
  CHECK_THROWS_AS(parse_study_json("{"), DomainError);
}

TEST_CASE("tsv layout") {
  StudyConfig c = small_config(5, 0);
  c.laws = default_study_config().laws;
  c.sizes = {20};
  const auto t = run_study(c);
  const auto tsv = emit_tables(t, TableFormat::kTsv);
  CHECK(count_of(tsv, "# alpha=") == 4);
  const auto header = tsv.substr(tsv.find("\nn\t") + 1, tsv.find('\n', tsv.find("\nn\t") + 1) - tsv.find("\nn\t") - 1);
  CHECK(header.find("AE MME\tAE MLE\tAE Bayes 1\tAE Bayes 2") != std::string::npos);
  CHECK(header.find("Bias MME") < header.find("MSE MME"));
  CHECK(emit_law_table(t, 2, TableFormat::kTsv).find("# alpha=4 beta=4 ") == 0);
  CHECK_THROWS_AS(emit_law_table(t, 4, TableFormat::kTsv), DomainError);

  const StudyTable empty({{4.0, 36.0}}, {100}, {}, 10, 1);
  CHECK_THROWS_AS(emit_tables(empty, TableFormat::kTsv), DomainError);
  const StudyTable unfilled({{4.0, 36.0}}, {100}, {Estimator::kMme}, 10, 1);
  CHECK_THROWS_AS(emit_tables(unfilled, TableFormat::kJson), DomainError);
}

TEST_CASE("mse plot carries the table's numbers") {
  const auto t = run_study(small_config(30, 0));
  const auto svg = emit_mse_plot(t, {4.0, 2.0});
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  for (Estimator e : kAllEstimators) CHECK(svg.find(std::string(label(e))) != std::string::npos);

  const std::regex point("data-n=\"(\\d+)\" data-mse=\"([^\"]+)\"");
  std::vector<double> mse;
  std::vector<std::int64_t> ns;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), point); it != std::sregex_iterator(); ++it) {
    ns.push_back(std::stoll((*it)[1]));
    mse.push_back(std::stod((*it)[2]));
  }
  REQUIRE(mse.size() == 4 * t.sizes().size());
  std::size_t i = 0;
  for (Estimator e : kAllEstimators) {
    for (std::size_t s = 0; s < t.sizes().size(); ++s, ++i) {
      CHECK(ns[i] == t.sizes()[s]);
      CHECK(mse[i] == t.cell(1, s, e).mse);
    }
  }
  CHECK_THROWS_AS(emit_mse_plot(t, {4.0, 4.0}), DomainError);

  StudyConfig single = small_config(10, 0);
  single.sizes = {100};
  const auto one_point = emit_mse_plot(run_study(single), {4.0, 36.0});
  CHECK(count_of(one_point, "data-mse=") == 4);
}

TEST_CASE("config parsing") {
  const auto c = parse_study_config(R"({
    "laws": [{"alpha": 4, "beta": 36}, {"alpha": 4, "beta": 2}],
    "sizes": [100, 500],
    "replications": 200,
    "seed": 7,
    "estimators": ["bayes2", "mme"],
    "threads": 2
  })");
  CHECK(c.laws.size() == 2);
  CHECK(c.sizes == std::vector<std::int64_t>{100, 500});
  CHECK(c.replications == 200);
  CHECK(c.base_seed == 7);
  CHECK(c.estimators == std::vector<Estimator>{Estimator::kMme, Estimator::kBayes2});
  CHECK(c.threads == 2);

  const auto defaults = parse_study_config("{}");
  CHECK(defaults.laws == default_study_config().laws);
  CHECK(defaults.replications == 5000);

  auto message = [](const char* text) {
    try {
      parse_study_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"laws": [{"alpha": 4, "beta": 36}, {"alpha": -1, "beta": 2}]})").find("laws[1].alpha") == 0);
  CHECK(message(R"({"laws": [{"alpha": 4}]})").find("laws[0]") == 0);
  CHECK(message(R"({"sizes": [100, 100]})").find("sizes[1]") == 0);
  CHECK(message(R"({"sizes": [5]})").find("sizes[0]") == 0);
  CHECK(message(R"({"replications": 0})").find("replications") == 0);
  CHECK(message(R"({"estimators": ["mme", "bayes3"]})").find("estimators[1]") == 0);
  CHECK(message(R"({"estimators": []})").find("estimators") == 0);
  CHECK(message(R"({"seed": -3})").find("seed") == 0);
  CHECK(message(R"({"replicates": 10})").find("replicates: unknown key") == 0);
  CHECK(message("[1, 2]").find("<root>") == 0);
  CHECK(message("{oops").find("<root>: invalid JSON") == 0);
}
