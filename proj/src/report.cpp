#include "orliczlab/report.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace orliczlab {

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::LessEq: return "<=";
    case Relation::GreaterEq: return ">=";
    case Relation::ApproxEq: return "~=";
  }
  return "?";
}

VerificationReport make_check(std::string id, std::string anchor, double lhs, Relation rel, double rhs,
                              double margin, std::string note) {
  VerificationReport r;
  r.check_id = std::move(id);
  r.anchor = std::move(anchor);
  r.lhs = lhs;
  r.rhs = rhs;
  r.relation = rel;
  r.margin = margin;
  r.note = std::move(note);
  if (std::isnan(lhs) || std::isnan(rhs)) {
    r.status = Status::Inconclusive;
    return r;
  }
  bool ok = false;
  switch (rel) {
    case Relation::LessEq: ok = lhs <= rhs + margin; break;
    case Relation::GreaterEq: ok = lhs >= rhs - margin; break;
    case Relation::ApproxEq: ok = lhs == rhs || std::abs(lhs - rhs) <= margin; break;
  }
  r.status = ok ? Status::Pass : Status::Fail;
  return r;
}

VerificationReport inconclusive(std::string id, std::string anchor, std::string note) {
  VerificationReport r;
  r.check_id = std::move(id);
  r.anchor = std::move(anchor);
  r.lhs = r.rhs = std::nan("");
  r.status = Status::Inconclusive;
  r.note = std::move(note);
  return r;
}

ReportCounts count(const ReportList& reports) {
  ReportCounts c;
  for (const auto& r : reports) {
    if (r.status == Status::Pass) ++c.pass;
    else if (r.status == Status::Fail) ++c.fail;
    else ++c.inconclusive;
  }
  return c;
}

bool all_pass(const ReportList& reports) {
  for (const auto& r : reports)
    if (r.status != Status::Pass) return false;
  return true;
}

nlohmann::json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double from_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  throw std::invalid_argument("not a number: " + s);
}

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["check_id"] = r.check_id;
  j["anchor"] = r.anchor;
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["relation"] = to_string(r.relation);
  j["margin"] = number(r.margin);
  j["status"] = to_string(r.status);
  j["samples"] = r.samples;
  j["note"] = r.note;
  auto slack = nlohmann::json::array();
  for (const auto& s : r.slack) slack.push_back({{"name", s.name}, {"value", number(s.value)}});
  j["slack"] = slack;
  return j;
}

nlohmann::json to_json(const ReportList& reports) {
  auto arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr;
}

double ConstantsConfig::get(const std::string& name) const {
  auto it = entries.find(name);
  if (it == entries.end()) throw std::invalid_argument("unknown constant " + name);
  return it->second.value;
}

void ConstantsConfig::set(const std::string& name, double value, std::string provenance) {
  if (!entries.count(name)) throw std::invalid_argument("unknown constant " + name);
  entries[name] = {value, std::move(provenance)};
}

nlohmann::json ConstantsConfig::to_json() const {
  nlohmann::json j;
  for (const auto& [k, e] : entries) j[k] = {{"value", e.value}, {"provenance", e.provenance}};
  return j;
}

Spec parse_spec(const std::string& spec) {
  Spec out;
  const auto colon = spec.find(':');
  out.name = spec.substr(0, colon);
  out.rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (out.name == "table") return out;
  std::stringstream ss(out.rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("spec: malformed argument '" + item + "'");
    try {
      out.args[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("spec: bad number in '" + item + "'");
    }
  }
  return out;
}

double Spec::get(const std::string& key, double fallback) const {
  auto it = args.find(key);
  return it == args.end() ? fallback : it->second;
}

}  // namespace orliczlab
