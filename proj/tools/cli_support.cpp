#include "cli_support.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <system_error>

#include <unistd.h>

#include "curesurv/error.hpp"
#include "curesurv/format.hpp"

namespace curesurv::cli {

namespace fs = std::filesystem;

void OutputSet::add(fs::path path, std::string content) {
  pending_.push_back({std::move(path), std::move(content)});
}

void OutputSet::commit() {
  std::vector<fs::path> temporaries;
  auto discard = [&] {
    std::error_code ignored;
    for (const auto& t : temporaries) fs::remove(t, ignored);
  };
  for (const auto& file : pending_) {
    fs::path temp = file.path;
    temp += ".tmp." + std::to_string(::getpid());
    temporaries.push_back(temp);
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << file.content;
    out.close();
    if (!out) {
      discard();
      throw DataError("cannot write output file '" + file.path.string() + "'");
    }
  }
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    std::error_code ec;
    fs::rename(temporaries[i], pending_[i].path, ec);
    if (ec) {
      discard();
      throw DataError("cannot move output into place at '" + pending_[i].path.string() + "': " + ec.message());
    }
  }
  pending_.clear();
}

Json resolved_config(const CLI::App& command) {
  Json config = Json::object();
  for (const CLI::Option* opt : command.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->get_expected_max() == 0) {
      config[name] = opt->count() > 0;
      continue;
    }
    const auto& given = opt->results();
    if (!given.empty()) {
      if (opt->get_expected_max() > 1 || given.size() > 1) {
        config[name] = given;
      } else {
        config[name] = given.front();
      }
    } else if (!opt->get_default_str().empty()) {
      config[name] = opt->get_default_str();
    } else {
      config[name] = nullptr;
    }
  }
  return config;
}

Json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  if (value == std::trunc(value) && std::abs(value) < 9007199254740992.0) return static_cast<std::int64_t>(value);
  return round_significant(value);
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "structured") return ReportFormat::structured;
  if (name == "table") return ReportFormat::table;
  throw UsageError("unknown report format '" + name + "' (expected structured or table)");
}

namespace {

std::string scalar_text(const Json& value) {
  if (value.is_null()) return "NA";
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_float()) return format_number(value.get<double>());
  return value.dump();
}

void flatten(const Json& value, const std::string& prefix, std::string& out) {
  if (value.is_object()) {
    for (const auto& [key, child] : value.items()) flatten(child, prefix.empty() ? key : prefix + "." + key, out);
  } else if (value.is_array() && !value.empty() && (value.front().is_object() || value.front().is_array())) {
    for (std::size_t i = 0; i < value.size(); ++i) flatten(value[i], prefix + "." + std::to_string(i), out);
  } else if (value.is_array()) {
    std::string joined;
    for (const auto& item : value) joined += (joined.empty() ? "" : ";") + scalar_text(item);
    out += prefix + "," + joined + "\n";
  } else {
    out += prefix + "," + scalar_text(value) + "\n";
  }
}

}  // namespace

std::string render_report(const Json& report, ReportFormat format) {
  if (format == ReportFormat::structured) return report.dump(2) + "\n";
  std::string out = "key,value\n";
  flatten(report, "", out);
  return out;
}

}  // namespace curesurv::cli
