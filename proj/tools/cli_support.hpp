#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace curesurv::cli {

using Json = nlohmann::ordered_json;

/// Bad or inconsistent command-line flags (exit code 2).
class UsageError : public std::runtime_error {
public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Files produced by one run, written together once every one of them is ready.
///
/// Each file goes to a temporary sibling first and is renamed into place only
/// after all temporaries were written, so a failed run leaves no output behind.
class OutputSet {
public:
  void add(std::filesystem::path path, std::string content);
  void commit();

private:
  struct Pending {
    std::filesystem::path path;
    std::string content;
  };
  std::vector<Pending> pending_;
};

/// Every option of a subcommand with its resolved value (given or default).
Json resolved_config(const CLI::App& command);

/// A double rounded to the report precision; NaN and infinities become null.
Json number(double value);

enum class ReportFormat { structured, table };

ReportFormat parse_report_format(const std::string& name);

/// JSON document, or `key,value` rows with nested keys joined by dots.
std::string render_report(const Json& report, ReportFormat format);

}  // namespace curesurv::cli
