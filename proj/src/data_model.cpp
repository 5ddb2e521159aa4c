#include "curesurv/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "csv.hpp"
#include "curesurv/error.hpp"
#include "curesurv/format.hpp"
#include "curesurv/rng.hpp"

namespace curesurv {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

long days_between(const Date& from, const Date& to) {
  return (std::chrono::sys_days(to) - std::chrono::sys_days(from)).count();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read file " + path.string());
  return in;
}

}  // namespace

Date parse_date(std::string_view text) {
  const bool shape_ok = text.size() == 10 && text[4] == '-' && text[7] == '-' &&
                        std::all_of(text.begin(), text.begin() + 4, is_digit) &&
                        std::all_of(text.begin() + 5, text.begin() + 7, is_digit) &&
                        std::all_of(text.begin() + 8, text.end(), is_digit);
  if (!shape_ok) throw DataError(fmt::format("malformed date '{}'", text));
  auto number = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (text[i] - '0');
    return v;
  };
  const Date date{std::chrono::year(number(0, 4)), std::chrono::month(number(5, 2)),
                  std::chrono::day(number(8, 2))};
  if (!date.ok()) throw DataError(fmt::format("malformed date '{}'", text));
  return date;
}

std::string format_date(const Date& date) {
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(date.year()),
                     static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
}

// --- SurvivalSample ---------------------------------------------------------

SurvivalSample::SurvivalSample(std::vector<double> times, std::vector<int> deltas,
                               CovariateMap covariates)
    : times_(std::move(times)), deltas_(std::move(deltas)), covariates_(std::move(covariates)) {
  if (times_.empty()) throw DataError("survival sample must contain at least one observation");
  if (deltas_.size() != times_.size()) throw DataError("times and deltas differ in length");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || times_[i] <= 0.0) {
      throw DataError(fmt::format("time {} is not strictly positive", format_exact(times_[i])), i + 1);
    }
    if (deltas_[i] != 0 && deltas_[i] != 1) throw DataError("delta must be 0 or 1", i + 1);
  }
  for (const auto& [name, column] : covariates_) {
    if (column.values.size() != times_.size()) {
      throw DataError("covariate '" + name + "' is not aligned with times");
    }
    for (std::size_t i = 0; i < column.values.size(); ++i) {
      const double v = column.values[i];
      if (!std::isfinite(v)) throw DataError("covariate '" + name + "' is not finite", i + 1);
      if (column.kind == CovariateKind::binary && v != 0.0 && v != 1.0) {
        throw DataError("binary covariate '" + name + "' must be 0 or 1", i + 1);
      }
    }
  }
}

bool SurvivalSample::has_covariate(std::string_view name) const {
  return covariates_.find(name) != covariates_.end();
}

const Covariate& SurvivalSample::covariate(std::string_view name) const {
  auto it = covariates_.find(name);
  if (it == covariates_.end()) throw DataError(fmt::format("unknown covariate '{}'", name));
  return it->second;
}

std::size_t SurvivalSample::uncensored_count() const noexcept {
  return static_cast<std::size_t>(std::count(deltas_.begin(), deltas_.end(), 1));
}

SurvivalSample SurvivalSample::with_times(std::vector<double> times) const {
  return SurvivalSample(std::move(times), deltas_, covariates_);
}

SurvivalSample SurvivalSample::with_covariate(const std::string& name, Covariate column) const {
  auto covariates = covariates_;
  covariates[name] = std::move(column);
  return SurvivalSample(times_, deltas_, std::move(covariates));
}

SurvivalSample SurvivalSample::subset(std::span<const std::size_t> rows) const {
  std::vector<double> times;
  std::vector<int> deltas;
  times.reserve(rows.size());
  deltas.reserve(rows.size());
  for (auto r : rows) {
    times.push_back(times_.at(r));
    deltas.push_back(deltas_.at(r));
  }
  CovariateMap covariates;
  for (const auto& [name, column] : covariates_) {
    Covariate picked{{}, column.kind};
    picked.values.reserve(rows.size());
    for (auto r : rows) picked.values.push_back(column.values[r]);
    covariates.emplace(name, std::move(picked));
  }
  return SurvivalSample(std::move(times), std::move(deltas), std::move(covariates));
}

// --- patient files ----------------------------------------------------------

std::vector<PatientRecord> read_patients(std::istream& in, const CsvSchema& schema) {
  const auto table = detail::read_csv(in);
  auto require = [&](const std::string& name) {
    const int idx = detail::column_index(table.header, name);
    if (idx < 0) throw DataError("missing column '" + name + "'");
    return static_cast<std::size_t>(idx);
  };
  const auto c_id = require(schema.id);
  const auto c_age = require(schema.age);
  const auto c_sex = require(schema.sex);
  const auto c_diag = require(schema.diagnosis_date);
  const auto c_adm = require(schema.admission_date);

  std::vector<PatientRecord> records;
  records.reserve(table.rows.size());
  std::unordered_set<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const std::size_t row = r + 1;
    PatientRecord rec;
    rec.id = f[c_id];
    if (rec.id.empty()) throw DataError("empty id", row);
    if (!seen.insert(rec.id).second) throw DataError("duplicate id '" + rec.id + "'", row);

    const auto age = detail::parse_integer(f[c_age], row, schema.age);
    if (age < 0) throw DataError("negative age", row);
    rec.age = static_cast<int>(age);

    const auto sex = detail::parse_integer(f[c_sex], row, schema.sex);
    if (sex != 0 && sex != 1) throw DataError("sex must be 0 or 1", row);
    rec.sex = static_cast<int>(sex);

    try {
      rec.diagnosis_date = parse_date(f[c_diag]);
      if (!f[c_adm].empty()) rec.admission_date = parse_date(f[c_adm]);
    } catch (const DataError& e) {
      throw DataError(e.what(), row);
    }
    if (rec.admission_date && *rec.admission_date < rec.diagnosis_date) {
      throw DataError("admission before diagnosis", row);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<PatientRecord> load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  auto in = open_input(path);
  return read_patients(in, schema);
}

void write_patients(std::ostream& out, std::span<const PatientRecord> records,
                    const CsvSchema& schema) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  };
  out << schema.id << ',' << schema.age << ',' << schema.sex << ',' << schema.diagnosis_date << ','
      << schema.admission_date << '\n';
  for (const auto& r : records) {
    out << quote(r.id) << ',' << r.age << ',' << r.sex << ',' << format_date(r.diagnosis_date) << ','
        << (r.admission_date ? format_date(*r.admission_date) : std::string()) << '\n';
  }
}

SurvivalSample derive_survival_times(std::span<const PatientRecord> records, const StudyWindow& window) {
  if (window.end < window.start) throw DataError("study window ends before it starts");
  if (records.empty()) throw DataError("no patient records");
  std::vector<double> times;
  std::vector<int> deltas;
  Covariate age{{}, CovariateKind::continuous};
  Covariate sex{{}, CovariateKind::binary};
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const std::size_t row = i + 1;
    if (r.diagnosis_date < window.start) throw DataError("diagnosis before window start", row);
    if (r.diagnosis_date > window.end) throw DataError("diagnosis after window end", row);
    long days = 0;
    int delta = 0;
    if (r.admission_date) {
      if (*r.admission_date < r.diagnosis_date) throw DataError("admission before diagnosis", row);
      if (*r.admission_date > window.end) throw DataError("admission after window end", row);
      days = days_between(r.diagnosis_date, *r.admission_date);
      delta = 1;
    } else {
      days = days_between(r.diagnosis_date, window.end);
    }
    times.push_back(days == 0 ? 0.5 : static_cast<double>(days));
    deltas.push_back(delta);
    age.values.push_back(r.age);
    sex.values.push_back(r.sex);
  }
  CovariateMap covariates;
  covariates.emplace("age", std::move(age));
  covariates.emplace("sex", std::move(sex));
  return SurvivalSample(std::move(times), std::move(deltas), std::move(covariates));
}

// --- sample files -----------------------------------------------------------

SurvivalSample read_sample(std::istream& in) {
  const auto table = detail::read_csv(in);
  const int c_time = detail::column_index(table.header, "time");
  const int c_delta = detail::column_index(table.header, "delta");
  if (c_time < 0 || c_delta < 0) throw DataError("sample file needs 'time' and 'delta' columns");
  if (table.rows.empty()) throw DataError("sample file has no data rows");

  std::vector<double> times;
  std::vector<int> deltas;
  std::vector<std::vector<double>> columns(table.header.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const std::size_t row = r + 1;
    for (std::size_t c = 0; c < f.size(); ++c) {
      const int ci = static_cast<int>(c);
      if (ci == c_time) {
        times.push_back(detail::parse_double(f[c], row, "time"));
        if (!(times.back() > 0.0)) throw DataError("time must be strictly positive", row);
      } else if (ci == c_delta) {
        const auto d = detail::parse_integer(f[c], row, "delta");
        if (d != 0 && d != 1) throw DataError("delta must be 0 or 1", row);
        deltas.push_back(static_cast<int>(d));
      } else {
        columns[c].push_back(detail::parse_double(f[c], row, table.header[c]));
      }
    }
  }
  CovariateMap covariates;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const int ci = static_cast<int>(c);
    if (ci == c_time || ci == c_delta) continue;
    const bool binary = std::all_of(columns[c].begin(), columns[c].end(),
                                    [](double v) { return v == 0.0 || v == 1.0; });
    covariates.emplace(table.header[c],
                       Covariate{std::move(columns[c]),
                                 binary ? CovariateKind::binary : CovariateKind::continuous});
  }
  return SurvivalSample(std::move(times), std::move(deltas), std::move(covariates));
}

SurvivalSample load_sample_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_sample(in);
}

void write_sample(std::ostream& out, const SurvivalSample& sample) {
  out << "time,delta";
  for (const auto& [name, column] : sample.covariates()) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out << format_exact(sample.times()[i]) << ',' << sample.deltas()[i];
    for (const auto& [name, column] : sample.covariates()) out << ',' << format_exact(column.values[i]);
    out << '\n';
  }
}

// --- descriptive statistics -------------------------------------------------

SummaryStats summary_stats(const SurvivalSample& sample) {
  SummaryStats s;
  s.n = sample.size();
  const auto times = sample.times();
  const auto deltas = sample.deltas();
  for (std::size_t i = 0; i < s.n; ++i) {
    if (deltas[i] != 1) continue;
    ++s.uncensored;
    s.min_uncensored_time = std::min(s.min_uncensored_time.value_or(times[i]), times[i]);
    s.max_uncensored_time = std::max(s.max_uncensored_time.value_or(times[i]), times[i]);
  }
  s.censoring_proportion = static_cast<double>(s.n - s.uncensored) / static_cast<double>(s.n);

  const Covariate* age = sample.has_covariate("age") ? &sample.covariate("age") : nullptr;
  if (age) {
    s.mean_age = std::accumulate(age->values.begin(), age->values.end(), 0.0) / static_cast<double>(s.n);
  }
  if (sample.has_covariate("sex")) {
    const auto& sex = sample.covariate("sex").values;
    SexGroupStats groups[2];
    double age_sum[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < s.n; ++i) {
      const int g = sex[i] == 1.0 ? 1 : 0;
      ++groups[g].count;
      if (age) age_sum[g] += age->values[i];
    }
    for (int g = 0; g < 2; ++g) {
      groups[g].percent = 100.0 * static_cast<double>(groups[g].count) / static_cast<double>(s.n);
      if (age && groups[g].count > 0) groups[g].mean_age = age_sum[g] / static_cast<double>(groups[g].count);
    }
    s.male = groups[0];
    s.female = groups[1];
  }
  return s;
}

SurvivalSample jitter_times(const SurvivalSample& sample, std::uint64_t seed) {
  const auto times = sample.times();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 1.0) {
      throw DataError("jitter requires every time >= 1 (got " + format_exact(times[i]) + ")", i + 1);
    }
  }
  auto engine = substream(seed, 0);
  std::vector<double> jittered(times.begin(), times.end());
  for (auto& t : jittered) {
    // Redraw in the (rare) case rounding lands on the closed boundary.
    double moved = t;
    do {
      moved = t + (2.0 * uniform_open01(engine) - 1.0);
    } while (!(std::abs(moved - t) < 1.0) || !(moved > 0.0));
    t = moved;
  }
  return sample.with_times(std::move(jittered));
}

}  // namespace curesurv
