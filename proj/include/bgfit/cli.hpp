#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "bgfit/estimate.hpp"

namespace bgfit::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitEstimation = 4;

enum class InputFormat { kCsv, kWhitespace, kSummary };

struct IngestSpec {
  std::filesystem::path path;
  // Column name (CSV with header) or zero-based index.
  std::string column = "0";
  // Rows with delay > max_delay are dropped (e.g. 180 months).
  std::optional<std::int64_t> max_delay;
  InputFormat format = InputFormat::kWhitespace;
};

struct IngestAudit {
  std::int64_t rows_read = 0;
  std::int64_t rows_kept = 0;
  std::int64_t rows_dropped = 0;
};

struct Ingested {
  WaitSample sample;
  IngestAudit audit;
};

// Parses delays (csv / whitespace) or an "n=... / sum_x=..." summary.
// Throws ParseError with the 1-based line number.
Ingested ingest(std::istream& in, const IngestSpec& spec);
Ingested ingest_file(const IngestSpec& spec);

enum class FitMethodChoice { kMme, kMle, kBayes, kAll };
enum class PriorChoice { kMme, kMle, kExplicit };

struct FitRequest {
  FitMethodChoice method = FitMethodChoice::kAll;
  std::optional<PriorChoice> prior;
  std::optional<double> mu;
  std::optional<double> nu;
  double gamma = 0.05;
  std::uint64_t seed = kDefaultSeed;  // MME bootstrap
  int bootstrap = 500;
};

// Builds the JSON report. Throws the estimator's own error when a single
// requested method fails; with method=all failures are reported inline.
nlohmann::json fit_report(const Ingested& data, const FitRequest& request, std::ostream& log);

nlohmann::json fit_to_json(const FitResult& fit);

// pmf / cdf tabulation plus law summary.
nlohmann::json describe_law(const BetaGeometricLaw& law, std::int64_t x_max);
std::string describe_tsv(const nlohmann::json& described);

// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bgfit::cli
