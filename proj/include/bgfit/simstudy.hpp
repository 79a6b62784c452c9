#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bgfit/model.hpp"
#include "bgfit/sampling.hpp"

namespace bgfit {

enum class Estimator { kMme = 0, kMle = 1, kBayes1 = 2, kBayes2 = 3 };

inline constexpr std::array<Estimator, 4> kAllEstimators{Estimator::kMme, Estimator::kMle,
                                                         Estimator::kBayes1, Estimator::kBayes2};

// "MME", "MLE", "Bayes 1", "Bayes 2" (the table column labels).
std::string_view label(Estimator e);
// "mme", "mle", "bayes1", "bayes2" (config / JSON keys).
std::string_view key(Estimator e);
std::optional<Estimator> estimator_from_key(std::string_view k);

struct StudyConfig {
  std::vector<BetaGeometricLaw> laws;
  std::vector<std::int64_t> sizes;
  int replications = 5000;
  std::uint64_t base_seed = kDefaultSeed;
  // Always kept in the canonical order MME, MLE, Bayes 1, Bayes 2.
  std::vector<Estimator> estimators;
  // Worker threads; 0 picks std::thread::hardware_concurrency(). Results do
  // not depend on this value.
  int threads = 0;
};

// The four laws (4, 36), (4, 12), (4, 4), (4, 2); sizes 100..1000 including
// 300; 5000 replications; all four estimators.
StudyConfig default_study_config();

// Throws ConfigError("<field path>: <problem>") on invalid input.
StudyConfig parse_study_config(std::string_view json_text);
void validate(const StudyConfig& config);

// theta-hat per estimator for one simulated sample; nullopt marks a failure.
struct ReplicateRecord {
  std::array<std::optional<double>, 4> theta_hat;
  const std::optional<double>& operator[](Estimator e) const { return theta_hat[static_cast<int>(e)]; }
};

// Draws one sample of size n and evaluates every estimator on it. Bayes 1 and
// Bayes 2 use this sample's own MME / MLE fit as the prior.
ReplicateRecord run_replicate(const BetaGeometricLaw& law, std::int64_t n, SeedSpec seed);

// Stream id of replicate `rep` in cell (law_index, size_index).
std::uint64_t replicate_stream(std::size_t law_index, std::size_t size_index, std::uint64_t rep);

struct StudyCell {
  double average_estimate = 0.0;
  double bias = 0.0;  // average_estimate - theta_true
  double mse = 0.0;
  double mc_standard_error = 0.0;   // sd(theta_hat) / sqrt(successes)
  double mse_standard_error = 0.0;  // sd((theta_hat - theta)^2) / sqrt(successes)
  std::int64_t successes = 0;
  std::int64_t failure_count = 0;

  friend bool operator==(const StudyCell&, const StudyCell&) = default;
};

class StudyTable {
 public:
  StudyTable(std::vector<BetaGeometricLaw> laws, std::vector<std::int64_t> sizes,
             std::vector<Estimator> estimators, int replications, std::uint64_t base_seed);

  const std::vector<BetaGeometricLaw>& laws() const { return laws_; }
  const std::vector<std::int64_t>& sizes() const { return sizes_; }
  const std::vector<Estimator>& estimators() const { return estimators_; }
  int replications() const { return replications_; }
  std::uint64_t base_seed() const { return base_seed_; }
  double theta_true(std::size_t law_index) const { return laws_.at(law_index).mean_fecundability(); }

  bool has_estimator(Estimator e) const;
  // Throws std::out_of_range for an estimator outside the table.
  StudyCell& cell(std::size_t law_index, std::size_t size_index, Estimator e);
  const StudyCell& cell(std::size_t law_index, std::size_t size_index, Estimator e) const;
  // Index of `law` in laws(); nullopt when absent.
  std::optional<std::size_t> find_law(const BetaGeometricLaw& law) const;

  friend bool operator==(const StudyTable&, const StudyTable&) = default;

 private:
  std::size_t slot(std::size_t law_index, std::size_t size_index, Estimator e) const;

  std::vector<BetaGeometricLaw> laws_;
  std::vector<std::int64_t> sizes_;
  std::vector<Estimator> estimators_;
  int replications_;
  std::uint64_t base_seed_;
  std::vector<StudyCell> cells_;
};

// Deterministic in base_seed regardless of the thread count.
StudyTable run_study(const StudyConfig& config);

enum class TableFormat { kTsv, kJson };

// One block per law, columns AE / Bias / MSE for each estimator.
std::string emit_tables(const StudyTable& table, TableFormat format);
std::string emit_law_table(const StudyTable& table, std::size_t law_index, TableFormat format);
// Inverse of emit_tables(table, kJson).
StudyTable parse_study_json(std::string_view json_text);

// Standalone SVG: MSE against n, one line per estimator.
std::string emit_mse_plot(const StudyTable& table, const BetaGeometricLaw& law);

}  // namespace bgfit
