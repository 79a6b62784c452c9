#include "bgfit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "bgfit/bayes.hpp"
#include "bgfit/errors.hpp"
#include "bgfit/model.hpp"
#include "bgfit/sampling.hpp"
#include "bgfit/simstudy.hpp"

#ifndef BGFIT_VERSION
#define BGFIT_VERSION "0.0.0"
#endif

namespace bgfit::cli {

using nlohmann::json;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json interval_json(const Interval& i) { return json::array({finite_or_null(i.lo), finite_or_null(i.hi)}); }

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line, InputFormat format) {
  std::vector<std::string> fields;
  if (format == InputFormat::kCsv) {
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.emplace_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
  } else {
    std::istringstream in(line);
    std::string field;
    while (in >> field) fields.push_back(field);
  }
  return fields;
}

std::optional<std::int64_t> parse_integer(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

bool is_skippable(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

Ingested ingest_summary(std::istream& in) {
  std::optional<std::int64_t> n;
  std::optional<std::int64_t> sum_x;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    std::string_view view = trim(line);
    const auto sep = view.find_first_of("= \t:");
    if (sep == std::string_view::npos) throw ParseError("summary: expected 'key=value' on line " + std::to_string(line_no), line_no);
    const auto k = trim(view.substr(0, sep));
    std::string_view rest = view.substr(sep);
    const auto start = rest.find_first_not_of("=: \t");
    rest = start == std::string_view::npos ? std::string_view{} : rest.substr(start);
    const auto v = parse_integer(rest);
    if (!v) throw ParseError("summary: invalid integer on line " + std::to_string(line_no), line_no);
    if (k == "n") {
      n = *v;
    } else if (k == "sum_x") {
      sum_x = *v;
    } else {
      throw ParseError("summary: unknown key '" + std::string(k) + "' on line " + std::to_string(line_no), line_no);
    }
  }
  if (!n || !sum_x) throw ParseError("summary: both n and sum_x are required", line_no);
  if (*n < 1 || *sum_x < 0) throw ParseError("summary: need n >= 1 and sum_x >= 0", line_no);
  return {WaitSample::from_summary(*n, *sum_x), IngestAudit{*n, *n, 0}};
}

std::string_view format_name(InputFormat f) {
  switch (f) {
    case InputFormat::kCsv: return "csv";
    case InputFormat::kWhitespace: return "whitespace";
    case InputFormat::kSummary: return "summary";
  }
  return "?";
}

json law_summary(const BetaGeometricLaw& law) {
  json j{{"alpha", law.alpha()}, {"beta", law.beta()}, {"mean_fecundability", law.mean_fecundability()}};
  if (law.alpha() > 1.0) {
    const auto m = bg_moments(law);
    j["mean_delay"] = m.mean_delay();
    if (m.has_second_moment()) {
      j["variance"] = m.variance();
    } else {
      j["variance"] = "undefined, alpha <= 2";
    }
  } else {
    j["mean_delay"] = "undefined, alpha <= 1";
    j["variance"] = "undefined, alpha <= 2";
  }
  const auto wg = to_wg(law);
  j["wg"] = {{"pi", wg.pi}, {"shape", wg.shape}};
  return j;
}

json posterior_json(const BetaPrior& prior, const PosteriorSpec& post) {
  return {{"prior", {{"mu", prior.mu}, {"nu", prior.nu}, {"source", prior.source}}},
          {"posterior",
           {{"a_post", post.a_post},
            {"b_post", post.b_post},
            {"mean", post.mean},
            {"level", 1.0 - post.gamma},
            {"credible_interval", interval_json(post.credible_interval)}}}};
}

json error_json(const std::exception& e) {
  std::string type = "error";
  if (dynamic_cast<const MissingMomentsError*>(&e)) type = "missing_moments";
  else if (dynamic_cast<const InvalidMomentRegionError*>(&e)) type = "invalid_moment_region";
  else if (dynamic_cast<const DivergenceError*>(&e)) type = "divergence";
  else if (dynamic_cast<const NonConvergenceError*>(&e)) type = "non_convergence";
  else if (dynamic_cast<const DegenerateDataError*>(&e)) type = "degenerate_data";
  else if (dynamic_cast<const DomainError*>(&e)) type = "domain";
  return {{"error", {{"type", type}, {"message", e.what()}}}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << content;
}

}  // namespace

Ingested ingest(std::istream& in, const IngestSpec& spec) {
  if (spec.format == InputFormat::kSummary) return ingest_summary(in);

  std::vector<Delay> delays;
  IngestAudit audit;
  std::optional<std::size_t> column_index;
  const auto numeric_column = parse_integer(spec.column);
  if (numeric_column) {
    if (*numeric_column < 0) throw ParseError("column index must be >= 0", 0);
    column_index = static_cast<std::size_t>(*numeric_column);
  }

  std::string line;
  long line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    const auto fields = split_row(line, spec.format);
    if (first_row) {
      first_row = false;
      // A header row is recognised by a non-integer in the selected column.
      const bool header = !column_index || *column_index >= fields.size() || !parse_integer(fields[*column_index]);
      if (header && spec.format == InputFormat::kCsv) {
        if (!column_index) {
          const auto it = std::find(fields.begin(), fields.end(), spec.column);
          if (it == fields.end()) throw ParseError("column '" + spec.column + "' not found in header", line_no);
          column_index = static_cast<std::size_t>(it - fields.begin());
        }
        continue;
      }
      if (!column_index) throw ParseError("named column requires a CSV header row", line_no);
    }
    if (*column_index >= fields.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": missing column " + std::to_string(*column_index), line_no);
    }
    const auto value = parse_integer(fields[*column_index]);
    if (!value) {
      throw ParseError("line " + std::to_string(line_no) + ": not an integer: '" + fields[*column_index] + "'", line_no);
    }
    if (*value < 0) throw ParseError("line " + std::to_string(line_no) + ": negative delay", line_no);
    ++audit.rows_read;
    if (spec.max_delay && *value > *spec.max_delay) {
      ++audit.rows_dropped;
      continue;
    }
    ++audit.rows_kept;
    delays.push_back(*value);
  }
  if (delays.empty()) throw ParseError("no observations kept", line_no);
  return {WaitSample::from_delays(delays), audit};
}

Ingested ingest_file(const IngestSpec& spec) {
  std::ifstream f(spec.path);
  if (!f) throw ParseError("cannot open " + spec.path.string(), 0);
  return ingest(f, spec);
}

json fit_to_json(const FitResult& fit) {
  const auto& c = fit.covariance;
  return {{"method", std::string(to_string(fit.method))},
          {"alpha_hat", fit.alpha_hat},
          {"beta_hat", fit.beta_hat},
          {"theta_hat", fit.theta_hat},
          {"covariance", json::array({json::array({finite_or_null(c.a11), finite_or_null(c.a12)}),
                                      json::array({finite_or_null(c.a21), finite_or_null(c.a22)})})},
          {"se_alpha", finite_or_null(std::sqrt(c.a11))},
          {"se_beta", finite_or_null(std::sqrt(c.a22))},
          {"theta_se", finite_or_null(fit.theta_se)},
          {"level", 1.0 - fit.gamma},
          {"ci_alpha", interval_json(fit.ci_alpha)},
          {"ci_beta", interval_json(fit.ci_beta)},
          {"ci_theta", interval_json(fit.ci_theta)},
          {"diagnostics",
           {{"iterations", fit.diagnostics.iterations},
            {"score_norm", fit.diagnostics.score_norm},
            {"converged", fit.diagnostics.converged},
            {"bootstrap_resamples", fit.diagnostics.bootstrap_resamples},
            {"bootstrap_failures", fit.diagnostics.bootstrap_failures}}}};
}

json fit_report(const Ingested& data, const FitRequest& req, std::ostream& log) {
  const WaitSample& sample = data.sample;
  json report;
  report["audit"] = {{"rows_read", data.audit.rows_read},
                     {"rows_kept", data.audit.rows_kept},
                     {"rows_dropped", data.audit.rows_dropped}};
  report["summary"] = {{"n", sample.n()},
                       {"sum_x", sample.sum_x()},
                       {"m1", sample.m1()},
                       {"m2", sample.has_data() ? json(sample.m2()) : json(nullptr)}};
  report["gamma"] = req.gamma;
  report["geometric"] = {{"theta_hat", fit_geometric(sample).theta()}};
  json methods = json::object();
  const bool all = req.method == FitMethodChoice::kAll;

  std::optional<FitResult> mme;
  std::optional<FitResult> mle;
  auto run_mme = [&] {
    try {
      mme = fit_mme(sample, MmeOptions{req.gamma, req.bootstrap, SeedSpec{req.seed, 0}});
      methods["mme"] = fit_to_json(*mme);
    } catch (const Error& e) {
      if (!all) throw;
      methods["mme"] = error_json(e);
    }
  };
  auto run_mle = [&] {
    try {
      mle = fit_mle(sample, MleOptions{.init = std::nullopt, .gamma = req.gamma});
      methods["mle"] = fit_to_json(*mle);
      methods["mle"]["log_likelihood"] = log_likelihood(sample, mle->law());
    } catch (const Error& e) {
      if (!all) throw;
      methods["mle"] = error_json(e);
    }
  };

  std::optional<PriorChoice> prior_choice = req.prior;
  if (!prior_choice && (req.mu || req.nu)) prior_choice = PriorChoice::kExplicit;
  if (prior_choice == PriorChoice::kExplicit && !(req.mu && req.nu)) {
    throw UsageError("explicit prior needs both --mu and --nu");
  }

  if (req.method == FitMethodChoice::kMme || all) run_mme();
  if (req.method == FitMethodChoice::kMle || all) run_mle();

  if (req.method == FitMethodChoice::kBayes || all) {
    json bayes = json::array();
    auto add = [&](const BetaPrior& prior) {
      log << "bayes: prior mu=" << prior.mu << " nu=" << prior.nu << " (" << prior.source << ")\n";
      bayes.push_back(posterior_json(prior, posterior(prior, sample, req.gamma)));
    };
    if (all) {
      if (!sample.has_data() && !prior_choice) {
        throw UsageError("bayes on summary input requires an explicit prior (--mu, --nu)");
      }
      if (mme) add(empirical_prior(*mme));
      if (mle) add(empirical_prior(*mle));
      if (prior_choice == PriorChoice::kExplicit) add(BetaPrior(*req.mu, *req.nu));
    } else {
      const PriorChoice choice = prior_choice.value_or(PriorChoice::kMle);
      if (choice == PriorChoice::kExplicit) {
        add(BetaPrior(*req.mu, *req.nu));
      } else {
        if (!sample.has_data()) {
          throw UsageError("bayes on summary input requires an explicit prior (--mu, --nu)");
        }
        if (choice == PriorChoice::kMme) {
          add(empirical_prior(fit_mme(sample, MmeOptions{req.gamma, 0, SeedSpec{req.seed, 0}})));
        } else {
          add(empirical_prior(fit_mle(sample, MleOptions{.init = std::nullopt, .gamma = req.gamma})));
        }
      }
    }
    methods["bayes"] = bayes;
  }
  report["methods"] = methods;
  return report;
}

json describe_law(const BetaGeometricLaw& law, std::int64_t x_max) {
  if (x_max < 0) throw DomainError("describe: x_max must be >= 0");
  json rows = json::array();
  double pmf = std::exp(bg_log_pmf(law, 0));
  double cdf = 0.0;
  for (std::int64_t x = 0; x <= x_max; ++x) {
    if (x > 0) pmf = std::exp(bg_log_pmf(law, x));
    cdf += pmf;
    rows.push_back({{"x", x}, {"pmf", pmf}, {"cdf", std::min(cdf, 1.0)}});
  }
  json j = law_summary(law);
  j["table"] = rows;
  return j;
}

std::string describe_tsv(const json& d) {
  std::ostringstream out;
  out.precision(10);
  auto scalar = [](const json& v) {
    if (v.is_string()) return v.get<std::string>();
    std::ostringstream s;
    s.precision(10);
    s << v.get<double>();
    return s.str();
  };
  out << "# alpha=" << scalar(d["alpha"]) << " beta=" << scalar(d["beta"]) << "\n"
      << "# mean_fecundability=" << scalar(d["mean_fecundability"]) << "\n"
      << "# mean_delay=" << scalar(d["mean_delay"]) << "\n"
      << "# variance=" << scalar(d["variance"]) << "\n"
      << "# wg_pi=" << scalar(d["wg"]["pi"]) << " wg_shape=" << scalar(d["wg"]["shape"]) << "\n"
      << "x\tpmf\tcdf\n";
  for (const auto& row : d["table"]) {
    out << row["x"].get<std::int64_t>() << '\t' << row["pmf"].get<double>() << '\t' << row["cdf"].get<double>()
        << "\n";
  }
  return out.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Beta-geometric conception-delay model: fit, sample, simulate, describe", "bgfit"};
  app.set_version_flag("--version", BGFIT_VERSION);
  app.require_subcommand(1);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Estimate model parameters from delays or a summary");
  std::string input_path;
  std::string format_str = "whitespace";
  std::string column = "0";
  std::optional<std::int64_t> max_delay;
  std::optional<std::int64_t> summary_n;
  std::optional<std::int64_t> summary_sum;
  std::string method_str = "all";
  std::string prior_str;
  std::optional<double> mu;
  std::optional<double> nu;
  double gamma = 0.05;
  std::uint64_t seed = kDefaultSeed;
  int bootstrap = 500;
  std::string report_out;
  fit_cmd->add_option("input", input_path, "Delay file (or summary file with --format summary)");
  fit_cmd->add_option("--format", format_str, "Input format")
      ->check(CLI::IsMember({"csv", "whitespace", "summary"}));
  fit_cmd->add_option("--column", column, "CSV column name or zero-based index");
  fit_cmd->add_option("--max-delay", max_delay, "Drop delays above this many months (e.g. 180)");
  fit_cmd->add_option("--n", summary_n, "Summary mode: number of women");
  fit_cmd->add_option("--sum-x", summary_sum, "Summary mode: total delay");
  fit_cmd->add_option("--method", method_str, "Estimator")->check(CLI::IsMember({"mme", "mle", "bayes", "all"}));
  fit_cmd->add_option("--prior", prior_str, "Bayes prior source")->check(CLI::IsMember({"mme", "mle", "explicit"}));
  fit_cmd->add_option("--mu", mu, "Explicit prior shape mu");
  fit_cmd->add_option("--nu", nu, "Explicit prior shape nu");
  fit_cmd->add_option("--gamma", gamma, "Intervals are at level 1 - gamma");
  fit_cmd->add_option("--seed", seed, "Seed for the MME bootstrap");
  fit_cmd->add_option("--bootstrap", bootstrap, "MME bootstrap resamples (0 disables)");
  fit_cmd->add_option("--out", report_out, "Write the JSON report here instead of stdout");

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Draw beta-geometric delays");
  double s_alpha = 0;
  double s_beta = 0;
  std::int64_t s_n = 0;
  std::uint64_t s_seed = kDefaultSeed;
  std::string s_out;
  sample_cmd->add_option("--alpha", s_alpha)->required();
  sample_cmd->add_option("--beta", s_beta)->required();
  sample_cmd->add_option("--n", s_n, "Number of draws")->required();
  sample_cmd->add_option("--seed", s_seed);
  sample_cmd->add_option("--out", s_out, "Output file (default stdout)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run the Monte Carlo estimator comparison");
  std::string config_path;
  std::string out_dir;
  std::optional<int> threads;
  std::optional<std::uint64_t> sim_seed;
  sim_cmd->add_option("--config", config_path, "Study config (JSON); defaults to the built-in study");
  sim_cmd->add_option("--out-dir", out_dir)->required();
  sim_cmd->add_option("--threads", threads, "Worker threads (results do not depend on this)");
  sim_cmd->add_option("--seed", sim_seed, "Override the config seed");

  // describe
  auto* desc_cmd = app.add_subcommand("describe", "Tabulate pmf / cdf and summary moments");
  double d_alpha = 0;
  double d_beta = 0;
  std::int64_t x_max = 10;
  std::string d_format = "json";
  desc_cmd->add_option("--alpha", d_alpha)->required();
  desc_cmd->add_option("--beta", d_beta)->required();
  desc_cmd->add_option("--x-max", x_max);
  desc_cmd->add_option("--format", d_format)->check(CLI::IsMember({"json", "tsv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) {
      IngestSpec spec;
      spec.column = column;
      spec.max_delay = max_delay;
      Ingested data{WaitSample::from_summary(1, 0), {}};
      const bool summary_flags = summary_n || summary_sum;
      if (summary_flags) {
        if (!(summary_n && summary_sum)) throw UsageError("summary mode needs both --n and --sum-x");
        if (!input_path.empty()) throw UsageError("give either an input file or --n/--sum-x, not both");
        if (*summary_n < 1 || *summary_sum < 0) throw UsageError("summary mode needs --n >= 1 and --sum-x >= 0");
        data = {WaitSample::from_summary(*summary_n, *summary_sum), IngestAudit{*summary_n, *summary_n, 0}};
        spec.format = InputFormat::kSummary;
      } else {
        if (input_path.empty()) throw UsageError("fit needs an input file or --n/--sum-x");
        spec.path = input_path;
        spec.format = format_str == "csv"       ? InputFormat::kCsv
                      : format_str == "summary" ? InputFormat::kSummary
                                                : InputFormat::kWhitespace;
        try {
          data = ingest_file(spec);
        } catch (const Error& e) {
          err << "data error: " << e.what() << "\n";
          return kExitData;
        }
      }
      if (!(gamma > 0.0 && gamma < 1.0)) throw UsageError("--gamma must lie in (0, 1)");
      FitRequest req;
      req.method = method_str == "mme"     ? FitMethodChoice::kMme
                   : method_str == "mle"   ? FitMethodChoice::kMle
                   : method_str == "bayes" ? FitMethodChoice::kBayes
                                           : FitMethodChoice::kAll;
      if (!prior_str.empty()) {
        req.prior = prior_str == "mme" ? PriorChoice::kMme
                    : prior_str == "mle" ? PriorChoice::kMle
                                         : PriorChoice::kExplicit;
      }
      req.mu = mu;
      req.nu = nu;
      req.gamma = gamma;
      req.seed = seed;
      req.bootstrap = bootstrap;
      json report;
      try {
        report = fit_report(data, req, err);
      } catch (const UsageError&) {
        throw;
      } catch (const Error& e) {
        err << "estimation error: " << e.what() << "\n";
        return kExitEstimation;
      }
      report["input"] = {{"path", spec.path.string()},
                         {"format", std::string(format_name(spec.format))},
                         {"column", spec.column},
                         {"max_delay", max_delay ? json(*max_delay) : json(nullptr)}};
      const std::string text = report.dump(2) + "\n";
      if (report_out.empty()) {
        out << text;
      } else {
        write_file(report_out, text);
      }
      return kExitOk;
    }

    if (*sample_cmd) {
      if (s_n < 1) throw UsageError("--n must be >= 1");
      std::optional<BetaGeometricLaw> law;
      try {
        law.emplace(s_alpha, s_beta);
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
      const auto draws = sample_bg(*law, SeedSpec{s_seed, 0}, static_cast<std::size_t>(s_n));
      std::string body;
      body.reserve(draws.size() * 4);
      for (Delay d : draws) {
        body += std::to_string(d);
        body += '\n';
      }
      std::ostream& info = s_out.empty() ? err : out;
      if (s_out.empty()) {
        out << body;
      } else {
        write_file(s_out, body);
      }
      info << law_summary(*law).dump() << "\n";
      return kExitOk;
    }

    if (*sim_cmd) {
      StudyConfig config = default_study_config();
      if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw ConfigError("<file>: cannot open " + config_path);
        std::stringstream buf;
        buf << f.rdbuf();
        config = parse_study_config(buf.str());
      }
      if (threads) config.threads = *threads;
      if (sim_seed) config.base_seed = *sim_seed;
      validate(config);

      const auto started = std::chrono::steady_clock::now();
      const StudyTable table = run_study(config);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

      const std::filesystem::path dir(out_dir);
      std::filesystem::create_directories(dir);
      write_file(dir / "study.json", emit_tables(table, TableFormat::kJson));
      write_file(dir / "study.tsv", emit_tables(table, TableFormat::kTsv));
      json failures = json::array();
      for (std::size_t l = 0; l < table.laws().size(); ++l) {
        const std::string stem = "law" + std::to_string(l + 1);
        write_file(dir / ("table_" + stem + ".tsv"), emit_law_table(table, l, TableFormat::kTsv));
        write_file(dir / ("table_" + stem + ".json"), emit_law_table(table, l, TableFormat::kJson));
        write_file(dir / ("mse_" + stem + ".svg"), emit_mse_plot(table, table.laws()[l]));
        for (std::size_t s = 0; s < table.sizes().size(); ++s) {
          json f{{"alpha", table.laws()[l].alpha()}, {"beta", table.laws()[l].beta()}, {"n", table.sizes()[s]}};
          for (Estimator e : table.estimators()) f[std::string(key(e))] = table.cell(l, s, e).failure_count;
          failures.push_back(f);
        }
      }
      const unsigned used_threads =
          config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
      json meta{{"version", BGFIT_VERSION},
                {"seed", config.base_seed},
                {"replications", config.replications},
                {"threads", used_threads},
                {"wall_time_seconds", wall},
                {"failure_counts", failures},
                {"protocol",
                 {{"bayes_prior", "per-replicate empirical Bayes: Bayes 1 uses the replicate's MME fit as "
                                  "(mu, nu), Bayes 2 its MLE fit"},
                  {"failures", "failed estimator fits are excluded from that cell and counted"},
                  {"streams", "one random stream per (law, n, replicate)"}}}};
      write_file(dir / "metadata.json", meta.dump(2) + "\n");
      out << "wrote " << table.laws().size() << " tables and plots to " << dir.string() << "\n";
      return kExitOk;
    }

    if (*desc_cmd) {
      if (x_max < 0) throw UsageError("--x-max must be >= 0");
      std::optional<BetaGeometricLaw> law;
      try {
        law.emplace(d_alpha, d_beta);
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
      const json d = describe_law(*law, x_max);
      out << (d_format == "tsv" ? describe_tsv(d) : d.dump(2) + "\n");
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace bgfit::cli
