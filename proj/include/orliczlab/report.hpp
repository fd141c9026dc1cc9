#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace orliczlab {

enum class Status { Pass, Fail, Inconclusive };

enum class Relation { LessEq, GreaterEq, ApproxEq };

std::string to_string(Status s);
std::string to_string(Relation r);

struct SlackTerm {
  std::string name;
  double value = 0.0;
};

/// One checked inequality: lhs `relation` rhs within margin.
struct VerificationReport {
  std::string check_id;
  std::string anchor;
  double lhs = 0.0;
  double rhs = 0.0;
  Relation relation = Relation::LessEq;
  double margin = 0.0;
  Status status = Status::Inconclusive;
  std::vector<SlackTerm> slack;
  long samples = 0;
  std::string note;
  double runtime_seconds = 0.0;
};

using ReportList = std::vector<VerificationReport>;

/// Builds a report and decides its status from the relation.  NaN sides are
/// INCONCLUSIVE; an infinite side is compared as an extended real.
VerificationReport make_check(std::string id, std::string anchor, double lhs, Relation rel, double rhs,
                              double margin, std::string note = {});

VerificationReport inconclusive(std::string id, std::string anchor, std::string note);

struct ReportCounts {
  int pass = 0;
  int fail = 0;
  int inconclusive = 0;
};
ReportCounts count(const ReportList& reports);
bool all_pass(const ReportList& reports);

nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const ReportList& reports);
/// Finite doubles as numbers; infinities and NaN as strings.
nlohmann::json number(double v);
double from_number(const nlohmann::json& j);

/// A family spec "name:key=value,key=value"; for "table:<path>" the path is kept verbatim.
struct Spec {
  std::string name;
  std::string rest;
  std::map<std::string, double> args;
  double get(const std::string& key, double fallback) const;
};
Spec parse_spec(const std::string& spec);

/// Constants the theory only asserts to exist.
struct ConstantsConfig {
  struct Entry {
    double value = 1.0;
    std::string provenance = "unspecified";
  };
  std::map<std::string, Entry> entries{{"alpha_k", {}}, {"alpha_n", {}}, {"c_n", {}}, {"gamma_n", {}}, {"beta_n", {}}};

  double get(const std::string& name) const;
  void set(const std::string& name, double value, std::string provenance = "user supplied");
  nlohmann::json to_json() const;
};

}  // namespace orliczlab
