#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace curesurv {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Throws DataError.
Date parse_date(std::string_view text);
std::string format_date(const Date& date);

/// One patient row of a cohort file.
struct PatientRecord {
  std::string id;
  int age = 0;
  int sex = 0;  // 0 = male, 1 = female
  Date diagnosis_date;
  std::optional<Date> admission_date;

  friend bool operator==(const PatientRecord&, const PatientRecord&) = default;
};

/// Column names used when reading and writing patient files.
struct CsvSchema {
  std::string id = "id";
  std::string age = "age";
  std::string sex = "sex";
  std::string diagnosis_date = "diagnosis_date";
  std::string admission_date = "admission_date";
};

/// Administrative follow-up window of a study.
struct StudyWindow {
  Date start;
  Date end;
};

enum class CovariateKind { continuous, binary };

struct Covariate {
  std::vector<double> values;
  CovariateKind kind = CovariateKind::continuous;
};

using CovariateMap = std::map<std::string, Covariate, std::less<>>;

/// Right-censored sample: observed times T = min(Y, C), uncensoring
/// indicators delta = 1(Y <= C) and named covariate columns.
///
/// Invariants are checked on construction: n >= 1, all arrays aligned, all
/// times strictly positive and finite, deltas in {0, 1}.
class SurvivalSample {
public:
  SurvivalSample(std::vector<double> times, std::vector<int> deltas,
                 CovariateMap covariates = {});

  std::size_t size() const noexcept { return times_.size(); }
  std::span<const double> times() const noexcept { return times_; }
  std::span<const int> deltas() const noexcept { return deltas_; }

  bool has_covariate(std::string_view name) const;
  const Covariate& covariate(std::string_view name) const;  // throws DataError if absent
  const CovariateMap& covariates() const noexcept { return covariates_; }

  std::size_t uncensored_count() const noexcept;

  /// Copy with times replaced (same length); deltas and covariates are kept.
  SurvivalSample with_times(std::vector<double> times) const;
  /// Copy with one covariate column replaced or added.
  SurvivalSample with_covariate(const std::string& name, Covariate column) const;
  /// Sample made of the rows listed in `rows` (repetitions allowed).
  SurvivalSample subset(std::span<const std::size_t> rows) const;

private:
  std::vector<double> times_;
  std::vector<int> deltas_;
  CovariateMap covariates_;
};

std::vector<PatientRecord> load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
std::vector<PatientRecord> read_patients(std::istream& in, const CsvSchema& schema = {});
void write_patients(std::ostream& out, std::span<const PatientRecord> records,
                    const CsvSchema& schema = {});

/// Converts patient records into follow-up times in days.
///
/// Admitted patients contribute (admission - diagnosis, 1); the others are
/// censored at window.end. A zero-day time is replaced by 0.5 days.
SurvivalSample derive_survival_times(std::span<const PatientRecord> records, const StudyWindow& window);

/// Reads a sample file with header `time,delta[,covariate...]`.
/// Columns whose values are all 0/1 are typed as binary covariates.
SurvivalSample read_sample(std::istream& in);
SurvivalSample load_sample_csv(const std::filesystem::path& path);
/// Writes a sample using shortest round-trip number formatting.
void write_sample(std::ostream& out, const SurvivalSample& sample);

struct SexGroupStats {
  std::size_t count = 0;
  double percent = 0.0;
  std::optional<double> mean_age;
};

struct SummaryStats {
  std::size_t n = 0;
  std::optional<double> mean_age;
  std::optional<SexGroupStats> male;
  std::optional<SexGroupStats> female;
  std::size_t uncensored = 0;
  std::optional<double> min_uncensored_time;
  std::optional<double> max_uncensored_time;
  double censoring_proportion = 0.0;
};

/// Descriptive statistics; age/sex entries are present when the sample carries those columns.
SummaryStats summary_stats(const SurvivalSample& sample);

/// Breaks ties of integer-day data by adding U(-1, 1) noise to every time.
/// Requires all times >= 1. Deterministic in `seed`.
SurvivalSample jitter_times(const SurvivalSample& sample, std::uint64_t seed);

}  // namespace curesurv
