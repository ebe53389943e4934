#include "hres/report.hpp"

#include <cmath>
#include <cstdio>

namespace hres {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void emit(const Json& j, int indent, int level, std::string& out) {
  const bool pretty = indent >= 0;
  auto newline = [&](int lvl) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(lvl * indent), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        out += Json(it.key()).dump();
        out += pretty ? ": " : ":";
        emit(it.value(), indent, level + 1, out);
      }
      newline(level);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        emit(v, indent, level + 1, out);
      }
      newline(level);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string to_json_text(const Json& j, int indent) {
  std::string out;
  emit(j, indent, 0, out);
  return out;
}

RunReport::RunReport(std::string command, Json params) : command_(std::move(command)), params_(std::move(params)) {}

ResultEntry& RunReport::add(std::string quantity, double value, std::optional<double> error) {
  ResultEntry e;
  e.quantity = std::move(quantity);
  e.value = value;
  e.error = error;
  results_.push_back(std::move(e));
  return results_.back();
}

ResultEntry& RunReport::check(std::string quantity, double value, std::optional<double> error, double expected,
                              double tol, std::string provenance, bool absolute) {
  auto& e = add(std::move(quantity), value, error);
  e.expected = expected;
  e.tolerance = tol;
  e.absolute = absolute;
  e.provenance = std::move(provenance);
  const double dev = std::abs(value - expected);
  e.pass = std::isfinite(value) && dev <= (absolute ? tol : tol * std::abs(expected));
  return e;
}

bool RunReport::all_passed() const {
  for (const auto& e : results_)
    if (e.pass && !*e.pass) return false;
  return true;
}

Json RunReport::to_json() const {
  Json j;
  j["command"] = command_;
  j["params"] = params_;
  Json rs = Json::array();
  for (const auto& e : results_) {
    Json r;
    r["quantity"] = e.quantity;
    r["value"] = e.value;
    if (e.error)
      r["error"] = *e.error;
    else
      r["error"] = "exact";
    if (e.expected) {
      r["expected"] = *e.expected;
      r["tolerance"] = *e.tolerance;
      r["tolerance_kind"] = e.absolute ? "absolute" : "relative";
      r["provenance"] = e.provenance;
      r["pass"] = *e.pass;
    }
    rs.push_back(r);
  }
  j["results"] = rs;
  for (auto it = extra_.begin(); it != extra_.end(); ++it) j[it.key()] = it.value();
  if (!results_.empty()) j["all_passed"] = all_passed();
  if (elapsed_) j["elapsed"] = *elapsed_;
  return j;
}

void RunReport::write_json(std::ostream& out) const { out << to_json_text(to_json()) << '\n'; }

void RunReport::write_csv(std::ostream& out) const {
  out << "quantity,value,error,expected,pass\n";
  for (const auto& e : results_) {
    out << e.quantity << ',' << format_double(e.value) << ',' << (e.error ? format_double(*e.error) : "exact") << ','
        << (e.expected ? format_double(*e.expected) : "") << ',' << (e.pass ? (*e.pass ? "true" : "false") : "")
        << '\n';
  }
}

}  // namespace hres
