#pragma once

// Run reports: one JSON object per invocation, floats at 17 significant
// digits, every numeric result paired with an error estimate or "exact".

#include <json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hres {

using Json = nlohmann::ordered_json;

/// %.17g; non-finite values become null.
std::string format_double(double v);

/// Serializes with `indent` spaces per level (negative: compact), printing
/// every floating-point number through format_double.
std::string to_json_text(const Json& j, int indent = 2);

struct ResultEntry {
  std::string quantity;
  double value = 0.0;
  /// Absolute error estimate; empty means the value is exact.
  std::optional<double> error;
  std::optional<double> expected;
  std::optional<double> tolerance;  // relative unless `absolute`
  bool absolute = false;
  std::string provenance;  // REFERENCE (published closed form), DERIVED or TRIVIAL
  /// Set when expected and tolerance are given.
  std::optional<bool> pass;
};

class RunReport {
 public:
  RunReport(std::string command, Json params);

  ResultEntry& add(std::string quantity, double value, std::optional<double> error);
  /// Adds a result compared against `expected` within `tol`.
  ResultEntry& check(std::string quantity, double value, std::optional<double> error, double expected, double tol,
                     std::string provenance, bool absolute = false);
  /// Free-form extra fields.
  Json& extra() { return extra_; }
  void set_elapsed(double seconds) { elapsed_ = seconds; }

  bool all_passed() const;
  const std::vector<ResultEntry>& results() const { return results_; }

  Json to_json() const;
  void write_json(std::ostream& out) const;
  /// quantity,value,error,expected,pass rows.
  void write_csv(std::ostream& out) const;

 private:
  std::string command_;
  Json params_;
  std::vector<ResultEntry> results_;
  Json extra_ = Json::object();
  std::optional<double> elapsed_;
};

}  // namespace hres
