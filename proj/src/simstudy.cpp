#include "bgfit/simstudy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "bgfit/bayes.hpp"
#include "bgfit/errors.hpp"
#include "bgfit/estimate.hpp"

namespace bgfit {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::int64_t kMinReplicateSize = 10;

std::string fmt_double(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

std::vector<Estimator> canonical(std::vector<Estimator> es) {
  std::sort(es.begin(), es.end());
  es.erase(std::unique(es.begin(), es.end()), es.end());
  return es;
}

json cell_to_json(const StudyCell& c) {
  return {{"average_estimate", number_or_null(c.average_estimate)},
          {"bias", number_or_null(c.bias)},
          {"mse", number_or_null(c.mse)},
          {"mc_standard_error", number_or_null(c.mc_standard_error)},
          {"mse_standard_error", number_or_null(c.mse_standard_error)},
          {"successes", c.successes},
          {"failure_count", c.failure_count}};
}

json law_to_json(const StudyTable& t, std::size_t l) {
  json rows = json::array();
  for (std::size_t s = 0; s < t.sizes().size(); ++s) {
    json cells = json::object();
    for (Estimator e : t.estimators()) cells[std::string(key(e))] = cell_to_json(t.cell(l, s, e));
    rows.push_back({{"n", t.sizes()[s]}, {"cells", cells}});
  }
  return {{"alpha", t.laws()[l].alpha()},
          {"beta", t.laws()[l].beta()},
          {"theta_true", t.theta_true(l)},
          {"rows", rows}};
}

json table_header(const StudyTable& t) {
  json es = json::array();
  for (Estimator e : t.estimators()) es.push_back(std::string(key(e)));
  return {{"format", "bgfit-study/1"},
          {"replications", t.replications()},
          {"base_seed", t.base_seed()},
          {"sizes", t.sizes()},
          {"estimators", es}};
}

void require_complete(const StudyTable& t) {
  if (t.estimators().empty()) throw DomainError("emit: table has no estimators");
  if (t.laws().empty() || t.sizes().empty()) throw DomainError("emit: table has no cells");
  for (std::size_t l = 0; l < t.laws().size(); ++l) {
    for (std::size_t s = 0; s < t.sizes().size(); ++s) {
      for (Estimator e : t.estimators()) {
        const auto& c = t.cell(l, s, e);
        if (c.successes + c.failure_count != t.replications()) {
          throw DomainError("emit: incomplete table cell (law " + std::to_string(l) + ", n=" +
                            std::to_string(t.sizes()[s]) + ", " + std::string(key(e)) + ")");
        }
      }
    }
  }
}

std::string tsv_block(const StudyTable& t, std::size_t l) {
  std::ostringstream out;
  const auto& law = t.laws()[l];
  out << "# alpha=" << fmt_double("%.10g", law.alpha()) << " beta=" << fmt_double("%.10g", law.beta())
      << " theta=" << fmt_double("%.10g", t.theta_true(l)) << " replications=" << t.replications()
      << " seed=" << t.base_seed() << "\n";
  out << "n";
  for (const char* stat : {"AE", "Bias", "MSE", "MCSE", "Failures"}) {
    for (Estimator e : t.estimators()) out << '\t' << stat << ' ' << label(e);
  }
  out << "\n";
  for (std::size_t s = 0; s < t.sizes().size(); ++s) {
    out << t.sizes()[s];
    for (int stat = 0; stat < 5; ++stat) {
      for (Estimator e : t.estimators()) {
        const auto& c = t.cell(l, s, e);
        out << '\t';
        switch (stat) {
          case 0: out << fmt_double("%.8f", c.average_estimate); break;
          case 1: out << fmt_double("%.8f", c.bias); break;
          case 2: out << fmt_double("%.8e", c.mse); break;
          case 3: out << fmt_double("%.8e", c.mc_standard_error); break;
          default: out << c.failure_count; break;
        }
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace

std::string_view label(Estimator e) {
  switch (e) {
    case Estimator::kMme: return "MME";
    case Estimator::kMle: return "MLE";
    case Estimator::kBayes1: return "Bayes 1";
    case Estimator::kBayes2: return "Bayes 2";
  }
  return "?";
}

std::string_view key(Estimator e) {
  switch (e) {
    case Estimator::kMme: return "mme";
    case Estimator::kMle: return "mle";
    case Estimator::kBayes1: return "bayes1";
    case Estimator::kBayes2: return "bayes2";
  }
  return "?";
}

std::optional<Estimator> estimator_from_key(std::string_view k) {
  for (Estimator e : kAllEstimators) {
    if (key(e) == k) return e;
  }
  return std::nullopt;
}

StudyConfig default_study_config() {
  StudyConfig c;
  c.laws = {{4.0, 36.0}, {4.0, 12.0}, {4.0, 4.0}, {4.0, 2.0}};
  c.sizes = {100, 200, 300, 400, 500, 750, 1000};
  c.replications = 5000;
  c.base_seed = kDefaultSeed;
  c.estimators.assign(kAllEstimators.begin(), kAllEstimators.end());
  return c;
}

void validate(const StudyConfig& c) {
  if (c.laws.empty()) throw ConfigError("laws: at least one law is required");
  if (c.sizes.empty()) throw ConfigError("sizes: at least one sample size is required");
  for (std::size_t i = 0; i < c.sizes.size(); ++i) {
    const std::string path = "sizes[" + std::to_string(i) + "]";
    if (c.sizes[i] < kMinReplicateSize) throw ConfigError(path + ": sample size must be >= 10");
    if (i > 0 && c.sizes[i] <= c.sizes[i - 1]) throw ConfigError(path + ": sizes must be strictly increasing");
  }
  if (c.replications < 1) throw ConfigError("replications: must be >= 1");
  if (c.estimators.empty()) throw ConfigError("estimators: at least one estimator is required");
  if (c.threads < 0) throw ConfigError("threads: must be >= 0");
}

StudyConfig parse_study_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<root>: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("<root>: expected an object");
  StudyConfig c = default_study_config();

  static const std::vector<std::string> known{"laws", "sizes", "replications", "seed", "estimators", "threads"};
  for (const auto& [k, v] : j.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError(k + ": unknown key");
  }

  auto positive_number = [](const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path + ": expected a number");
    const double d = v.get<double>();
    if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError(path + ": must be finite and > 0");
    return d;
  };

  if (j.contains("laws")) {
    const auto& laws = j["laws"];
    if (!laws.is_array()) throw ConfigError("laws: expected an array");
    c.laws.clear();
    for (std::size_t i = 0; i < laws.size(); ++i) {
      const std::string path = "laws[" + std::to_string(i) + "]";
      const auto& entry = laws[i];
      if (!entry.is_object() || !entry.contains("alpha") || !entry.contains("beta")) {
        throw ConfigError(path + ": expected {\"alpha\": ..., \"beta\": ...}");
      }
      for (const auto& [k, v] : entry.items()) {
        if (k != "alpha" && k != "beta") throw ConfigError(path + "." + k + ": unknown key");
      }
      c.laws.emplace_back(positive_number(entry["alpha"], path + ".alpha"),
                          positive_number(entry["beta"], path + ".beta"));
    }
  }
  if (j.contains("sizes")) {
    const auto& sizes = j["sizes"];
    if (!sizes.is_array()) throw ConfigError("sizes: expected an array");
    c.sizes.clear();
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (!sizes[i].is_number_integer()) throw ConfigError("sizes[" + std::to_string(i) + "]: expected an integer");
      c.sizes.push_back(sizes[i].get<std::int64_t>());
    }
  }
  if (j.contains("replications")) {
    if (!j["replications"].is_number_integer()) throw ConfigError("replications: expected an integer");
    c.replications = j["replications"].get<int>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
    c.base_seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("threads")) {
    if (!j["threads"].is_number_integer()) throw ConfigError("threads: expected an integer");
    c.threads = j["threads"].get<int>();
  }
  if (j.contains("estimators")) {
    const auto& es = j["estimators"];
    if (!es.is_array()) throw ConfigError("estimators: expected an array");
    c.estimators.clear();
    for (std::size_t i = 0; i < es.size(); ++i) {
      const std::string path = "estimators[" + std::to_string(i) + "]";
      if (!es[i].is_string()) throw ConfigError(path + ": expected a string");
      const auto e = estimator_from_key(es[i].get<std::string>());
      if (!e) throw ConfigError(path + ": unknown estimator '" + es[i].get<std::string>() + "' (mme, mle, bayes1, bayes2)");
      c.estimators.push_back(*e);
    }
    c.estimators = canonical(std::move(c.estimators));
  }
  validate(c);
  return c;
}

std::uint64_t replicate_stream(std::size_t law_index, std::size_t size_index, std::uint64_t rep) {
  return (static_cast<std::uint64_t>(law_index) << 48) ^ (static_cast<std::uint64_t>(size_index) << 32) ^ rep;
}

ReplicateRecord run_replicate(const BetaGeometricLaw& law, std::int64_t n, SeedSpec seed) {
  if (n < kMinReplicateSize) throw DomainError("run_replicate: n must be >= 10");
  const auto draws = sample_bg(law, seed, static_cast<std::size_t>(n));
  const auto sample = WaitSample::from_delays(draws);

  ReplicateRecord rec;
  std::optional<FitResult> mme;
  std::optional<FitResult> mle;
  try {
    mme = fit_mme(sample, MmeOptions{.bootstrap_resamples = 0});
  } catch (const Error&) {
  }
  try {
    mle = fit_mle(sample);
  } catch (const Error&) {
  }
  auto bayes = [&](const std::optional<FitResult>& fit) -> std::optional<double> {
    if (!fit) return std::nullopt;
    return posterior_mean(empirical_prior(*fit), sample.n(), sample.sum_x());
  };
  if (mme) rec.theta_hat[static_cast<int>(Estimator::kMme)] = mme->theta_hat;
  if (mle) rec.theta_hat[static_cast<int>(Estimator::kMle)] = mle->theta_hat;
  rec.theta_hat[static_cast<int>(Estimator::kBayes1)] = bayes(mme);
  rec.theta_hat[static_cast<int>(Estimator::kBayes2)] = bayes(mle);
  return rec;
}

StudyTable::StudyTable(std::vector<BetaGeometricLaw> laws, std::vector<std::int64_t> sizes,
                       std::vector<Estimator> estimators, int replications, std::uint64_t base_seed)
    : laws_(std::move(laws)),
      sizes_(std::move(sizes)),
      estimators_(canonical(std::move(estimators))),
      replications_(replications),
      base_seed_(base_seed),
      cells_(laws_.size() * sizes_.size() * estimators_.size()) {}

bool StudyTable::has_estimator(Estimator e) const {
  return std::find(estimators_.begin(), estimators_.end(), e) != estimators_.end();
}

std::size_t StudyTable::slot(std::size_t l, std::size_t s, Estimator e) const {
  const auto it = std::find(estimators_.begin(), estimators_.end(), e);
  if (it == estimators_.end() || l >= laws_.size() || s >= sizes_.size()) {
    throw std::out_of_range("StudyTable: no such cell");
  }
  const auto ei = static_cast<std::size_t>(it - estimators_.begin());
  return (l * sizes_.size() + s) * estimators_.size() + ei;
}

StudyCell& StudyTable::cell(std::size_t l, std::size_t s, Estimator e) { return cells_[slot(l, s, e)]; }

const StudyCell& StudyTable::cell(std::size_t l, std::size_t s, Estimator e) const {
  return cells_[slot(l, s, e)];
}

std::optional<std::size_t> StudyTable::find_law(const BetaGeometricLaw& law) const {
  const auto it = std::find(laws_.begin(), laws_.end(), law);
  if (it == laws_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - laws_.begin());
}

StudyTable run_study(const StudyConfig& config) {
  validate(config);
  StudyTable table(config.laws, config.sizes, config.estimators, config.replications, config.base_seed);

  const std::size_t n_laws = config.laws.size();
  const std::size_t n_sizes = config.sizes.size();
  const auto reps = static_cast<std::size_t>(config.replications);
  const std::size_t total = n_laws * n_sizes * reps;
  std::vector<ReplicateRecord> records(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1, std::memory_order_relaxed);
      if (task >= total) return;
      const std::size_t rep = task % reps;
      const std::size_t cell = task / reps;
      const std::size_t s = cell % n_sizes;
      const std::size_t l = cell / n_sizes;
      records[task] = run_replicate(config.laws[l], config.sizes[s],
                                    SeedSpec{config.base_seed, replicate_stream(l, s, rep)});
    }
  };
  unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::size_t>(total, 1024))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  // Fixed-order reduction over replicate index.
  for (std::size_t l = 0; l < n_laws; ++l) {
    const double truth = table.theta_true(l);
    for (std::size_t s = 0; s < n_sizes; ++s) {
      const std::size_t base = (l * n_sizes + s) * reps;
      for (Estimator e : table.estimators()) {
        double sum = 0.0;
        double sum_sq_err = 0.0;
        std::int64_t ok = 0;
        for (std::size_t r = 0; r < reps; ++r) {
          const auto& v = records[base + r][e];
          if (!v) continue;
          sum += *v;
          sum_sq_err += (*v - truth) * (*v - truth);
          ++ok;
        }
        StudyCell& c = table.cell(l, s, e);
        c.successes = ok;
        c.failure_count = static_cast<std::int64_t>(reps) - ok;
        if (ok == 0) {
          c.average_estimate = c.bias = c.mse = c.mc_standard_error = c.mse_standard_error = kNaN;
          continue;
        }
        const double k = static_cast<double>(ok);
        c.average_estimate = sum / k;
        c.bias = c.average_estimate - truth;
        c.mse = sum_sq_err / k;
        if (ok < 2) {
          c.mc_standard_error = c.mse_standard_error = kNaN;
          continue;
        }
        // Second pass for centered sums.
        double var_est = 0.0;
        double var_sq = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
          const auto& v = records[base + r][e];
          if (!v) continue;
          const double d = *v - c.average_estimate;
          const double q = (*v - truth) * (*v - truth) - c.mse;
          var_est += d * d;
          var_sq += q * q;
        }
        c.mc_standard_error = std::sqrt(var_est / (k - 1.0) / k);
        c.mse_standard_error = std::sqrt(var_sq / (k - 1.0) / k);
      }
    }
  }
  return table;
}

std::string emit_tables(const StudyTable& table, TableFormat format) {
  require_complete(table);
  if (format == TableFormat::kJson) {
    json j = table_header(table);
    j["laws"] = json::array();
    for (std::size_t l = 0; l < table.laws().size(); ++l) j["laws"].push_back(law_to_json(table, l));
    return j.dump(2) + "\n";
  }
  std::string out;
  for (std::size_t l = 0; l < table.laws().size(); ++l) {
    if (l > 0) out += "\n";
    out += tsv_block(table, l);
  }
  return out;
}

std::string emit_law_table(const StudyTable& table, std::size_t law_index, TableFormat format) {
  require_complete(table);
  if (law_index >= table.laws().size()) throw DomainError("emit_law_table: law index out of range");
  if (format == TableFormat::kJson) {
    json j = table_header(table);
    j["laws"] = json::array({law_to_json(table, law_index)});
    return j.dump(2) + "\n";
  }
  return tsv_block(table, law_index);
}

StudyTable parse_study_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    std::vector<Estimator> es;
    for (const auto& k : j.at("estimators")) {
      const auto e = estimator_from_key(k.get<std::string>());
      if (!e) throw DomainError("parse_study_json: unknown estimator " + k.get<std::string>());
      es.push_back(*e);
    }
    std::vector<BetaGeometricLaw> laws;
    for (const auto& law : j.at("laws")) laws.emplace_back(law.at("alpha").get<double>(), law.at("beta").get<double>());
    StudyTable t(laws, j.at("sizes").get<std::vector<std::int64_t>>(), es, j.at("replications").get<int>(),
                 j.at("base_seed").get<std::uint64_t>());
    for (std::size_t l = 0; l < laws.size(); ++l) {
      const auto& rows = j["laws"][l].at("rows");
      if (rows.size() != t.sizes().size()) throw DomainError("parse_study_json: row count mismatch");
      for (std::size_t s = 0; s < rows.size(); ++s) {
        for (Estimator e : t.estimators()) {
          const auto& cj = rows[s].at("cells").at(std::string(key(e)));
          StudyCell& c = t.cell(l, s, e);
          c.average_estimate = number_or_nan(cj.at("average_estimate"));
          c.bias = number_or_nan(cj.at("bias"));
          c.mse = number_or_nan(cj.at("mse"));
          c.mc_standard_error = number_or_nan(cj.at("mc_standard_error"));
          c.mse_standard_error = number_or_nan(cj.at("mse_standard_error"));
          c.successes = cj.at("successes").get<std::int64_t>();
          c.failure_count = cj.at("failure_count").get<std::int64_t>();
        }
      }
    }
    return t;
  } catch (const json::exception& e) {
    throw DomainError(std::string("parse_study_json: ") + e.what());
  }
}

std::string emit_mse_plot(const StudyTable& table, const BetaGeometricLaw& law) {
  const auto found = table.find_law(law);
  if (!found) throw DomainError("emit_mse_plot: law not present in table");
  require_complete(table);
  const std::size_t l = *found;

  constexpr double kW = 720, kH = 460;
  constexpr double kLeft = 90, kRight = 170, kTop = 50, kBottom = 60;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;

  const auto& sizes = table.sizes();
  double x_lo = static_cast<double>(sizes.front());
  double x_hi = static_cast<double>(sizes.back());
  if (x_hi == x_lo) {
    x_lo -= 50.0;
    x_hi += 50.0;
  }
  double y_hi = 0.0;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    for (Estimator e : table.estimators()) {
      const double m = table.cell(l, s, e).mse;
      if (std::isfinite(m)) y_hi = std::max(y_hi, m);
    }
  }
  y_hi = y_hi > 0.0 ? 1.1 * y_hi : 1.0;
  auto px = [&](double n) { return kLeft + (n - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double m) { return kTop + ph - m / y_hi * ph; };

  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  static constexpr const char* kDash[] = {"", "6,3", "2,2", "8,3,2,3"};

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">MSE of theta vs n"
      << " (alpha=" << fmt_double("%g", law.alpha()) << ", beta=" << fmt_double("%g", law.beta())
      << ", theta=" << fmt_double("%.4f", table.theta_true(l)) << ")</text>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double m = y_hi * i / 5.0;
    const double y = py(m);
    out << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << fmt_double("%.2e", m)
        << "</text>\n";
  }
  for (auto n : sizes) {
    const double x = px(static_cast<double>(n));
    out << "<line x1=\"" << x << "\" y1=\"" << kTop + ph << "\" x2=\"" << x << "\" y2=\"" << kTop + ph + 4
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << x << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << n << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 15 << "\" text-anchor=\"middle\">sample size n</text>\n"
      << "<text x=\"20\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << kTop + ph / 2 << ")\">MSE</text>\n";

  int series = 0;
  for (Estimator e : table.estimators()) {
    const int idx = static_cast<int>(e);
    out << "<g data-estimator=\"" << key(e) << "\">\n<polyline fill=\"none\" stroke=\"" << kColors[idx]
        << "\" stroke-width=\"2\"";
    if (*kDash[idx] != '\0') out << " stroke-dasharray=\"" << kDash[idx] << "\"";
    out << " points=\"";
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      const double m = table.cell(l, s, e).mse;
      if (!std::isfinite(m)) continue;
      out << px(static_cast<double>(sizes[s])) << ',' << py(m) << ' ';
    }
    out << "\"/>\n";
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      const double m = table.cell(l, s, e).mse;
      if (!std::isfinite(m)) continue;
      out << "<circle cx=\"" << px(static_cast<double>(sizes[s])) << "\" cy=\"" << py(m) << "\" r=\"3\" fill=\""
          << kColors[idx] << "\" data-n=\"" << sizes[s] << "\" data-mse=\"" << fmt_double("%.17g", m)
          << "\"/>\n";
    }
    out << "</g>\n";
    const double ly = kTop + 10 + 20.0 * series;
    const double lx = kLeft + pw + 15;
    out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 30 << "\" y2=\"" << ly << "\" stroke=\""
        << kColors[idx] << "\" stroke-width=\"2\"";
    if (*kDash[idx] != '\0') out << " stroke-dasharray=\"" << kDash[idx] << "\"";
    out << "/>\n<text x=\"" << lx + 38 << "\" y=\"" << ly + 4 << "\">" << label(e) << "</text>\n";
    ++series;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace bgfit
