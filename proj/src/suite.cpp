#include "orliczlab/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "orliczlab/conditions.hpp"
#include "orliczlab/counterexample.hpp"
#include "orliczlab/distortion.hpp"
#include "orliczlab/extremal.hpp"
#include "orliczlab/modulus.hpp"
#include "orliczlab/numerics.hpp"
#include "orliczlab/orlicz.hpp"
#include "orliczlab/oscillation.hpp"
#include "orliczlab/weight.hpp"

namespace orliczlab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void append(ReportList& out, const ReportList& rows) { out.insert(out.end(), rows.begin(), rows.end()); }

ReportList calderon_powers(int k) {
  ReportList out;
  for (double p : {k - 0.5, double(k), k + 0.5, k + 2.0}) {
    auto v = calderon_condition(OrliczFunction::power(p), k);
    out.push_back(verdict_check("calderon.pow.k=" + std::to_string(k) + ".p=" + fmt(p), "conditions:calderon", v,
                                p > k ? Classification::Convergent : Classification::Divergent));
  }
  return out;
}

ReportList equivalence_battery() {
  struct Case {
    OrliczFunction Phi;
    double p;
  };
  const std::vector<Case> battery{{OrliczFunction::power(1), 1.0},         {OrliczFunction::power(3), 1.0},
                                  {OrliczFunction::power_log(2, 2), 1.0},  {OrliczFunction::exponential(1), 1.0},
                                  {OrliczFunction::exponential(2), 1.0},   {OrliczFunction::exponential(1), 0.5}};
  ReportList out;
  for (const auto& c : battery) {
    auto rep = condition_equivalence_report(c.Phi, c.p, 1.0);
    const std::string id = "equivalence." + c.Phi.description() + ".p=" + fmt(c.p);
    int differ = 0, open = 0;
    std::string trace;
    for (const auto& f : rep.forms) {
      if (f.classification != rep.forms.front().classification) ++differ;
      if (f.classification == Classification::Inconclusive) ++open;
      trace += f.condition + "=" + to_string(f.classification) + " ";
    }
    auto agree = make_check(id + ".disagreements", "conditions:equivalence", differ, Relation::LessEq, 0.0, 0.0, trace);
    agree.samples = static_cast<long>(rep.forms.size());
    out.push_back(agree);
    out.push_back(make_check(id + ".inconclusive-forms", "conditions:equivalence", open, Relation::LessEq, 0.0, 0.0));
  }
  return out;
}

ReportList lemma_battery() {
  struct Case {
    const char* weight;
    int n;
    OrliczFunction Phi;
    double p;
  };
  const std::vector<Case> battery{{"const:c=1", 2, OrliczFunction::power(1), 1.0},
                                  {"const:c=3", 3, OrliczFunction::power(2), 1.5},
                                  {"logpow:a=1", 2, OrliczFunction::exponential_raw(1), 1.0},
                                  {"pow:a=-0.5", 2, OrliczFunction::power(2), 2.0},
                                  {"loge:a=1", 3, OrliczFunction::power(1), 1.0}};
  ReportList out;
  for (const auto& c : battery) out.push_back(inverse_tail_bound_check(parse_weight(c.weight, c.n), c.Phi, c.p));
  return out;
}

ReportList extremal_square(int k) {
  ReportList out;
  const auto phi = OrliczFunction::power(2);
  const auto profile = build_profile(phi, k);
  const std::string id = "extremal.square.k=" + std::to_string(k);
  double worst = 0.0;
  long samples = 0;
  for (double ls = -12.0; ls <= 1.0; ls += 0.25, ++samples) {
    const double s = std::pow(10.0, ls);
    worst = std::max(worst, std::abs(profile.psi(profile.h(s)) / s - 1.0));
  }
  auto inv = make_check(id + ".psi-of-h", "extremal:profile", worst, Relation::LessEq, 1e-9, 0.0,
                        "largest relative error of Psi(h(s)) = s for s in [1e-12, 10]");
  inv.samples = samples;
  out.push_back(inv);
  for (auto r : verify_calderon_pair(profile, 1e-100)) {
    r.check_id = id + "." + r.check_id;
    out.push_back(r);
  }
  ProfileOptions o;
  o.rescale = true;
  const auto scaled = build_profile(phi, k, o);
  auto e = make_check(id + ".total-energy", "extremal:profile", radial_energy(scaled, 1.0), Relation::LessEq, 1.0,
                      1e-12, "after normalization");
  e.slack = {{"raw_energy", scaled.raw_energy()}, {"scale", scaled.scale()}};
  out.push_back(e);
  return out;
}

ReportList counterexample_square() {
  CounterexampleOptions o;
  o.depth = 5;
  const auto m = build_sequences("pow:p=2", 2, o);
  ReportList out = check_invariants(m);
  for (int p = 2; p <= 4; ++p) append(out, check_oscillation(m, p));
  for (int p = 2; p <= 4; ++p) append(out, check_diameter(m, p));
  append(out, energy_budget(m));
  for (int l = 1; l <= 4; ++l) append(out, hausdorff_lower(m, l));
  return out;
}

ReportList with_fmo_at_origin(const ExampleResult& ex) {
  ReportList out = ex.rows;
  append(out, fmo_at_point(ex.field, Eigen::VectorXd::Zero(2), dyadic_grid(0.5, 8)).rows);
  return out;
}

ReportList modulus_annulus() {
  const auto ring = RingDomain::make(1.0, std::exp(1.0), 2);
  const auto one = parse_weight("const:c=1", 2);
  ReportList out = hesse_ziemer_check(ring, "identity:n=2", 256);
  append(out, ring_upper_bound(one, ring).certificate);
  append(out, spheres_lower_bound(one, ring.r1, ring.r2).certificate);
  return out;
}

ReportList modulus_stretch() {
  const auto ring = RingDomain::make(1.0, std::exp(1.0), 3);
  ReportList out = hesse_ziemer_check(ring, "stretch:alpha=2,n=3");
  append(out, spheres_lower_bound(parse_weight("pow:a=2", 3), 0.5, 2.0).certificate);
  return out;
}

ReportList distortion_half() {
  const auto f = radial_stretch(0.5, 3);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  x[0] = 1.0;
  ReportList out;
  out.push_back(make_check("distortion.kf.stretch-half.unit", "distortion:kf-numeric", kf_numeric(f, x),
                           Relation::ApproxEq, 2.0, 1e-6));
  append(out, holder_check(f));
  append(out, kf_check(f));
  return out;
}

ReportList distortion_models() {
  ReportList out = kf_check(radial_stretch(2.0, 3));
  append(out, kf_check(radial_stretch(0.25, 2)));
  append(out, kf_check(compose(radial_stretch(2.0, 3), radial_stretch(0.5, 3))));
  append(out, holder_check(identity_map(3)));
  return out;
}

Scenario scenario(std::string name, std::string description, std::function<ReportList()> f) {
  return {std::move(name), std::move(description), [f](const ScenarioContext&) { return f(); }};
}

std::vector<Scenario> build_registry() {
  std::vector<Scenario> s;
  for (int k : {2, 3, 4})
    s.push_back(scenario("calderon-powers-k" + std::to_string(k), "power gauges around the threshold p = k",
                         [k] { return calderon_powers(k); }));
  s.push_back(scenario("equivalence-battery", "six condition forms on six convex gauges", equivalence_battery));
  s.push_back(scenario("lemma-bound-battery", "log integral against inverse tail on five pairs", lemma_battery));
  for (int k : {2, 3})
    s.push_back(scenario("extremal-square-k" + std::to_string(k), "extremal profile of t^2",
                         [k] { return extremal_square(k); }));
  s.push_back(scenario("counterexample-square-k2", "depth 5 construction for t^2", counterexample_square));
  s.push_back(scenario("fmo-example1", "disk sums at p = 2", [] { return with_fmo_at_origin(build_example1(2.0)); }));
  s.push_back(
      scenario("fmo-example2", "smooth bumps at delta = 0.5", [] { return with_fmo_at_origin(build_example2(0.5)); }));
  s.push_back(scenario("modulus-annulus", "grid moduli of the ring 1..e", modulus_annulus));
  s.push_back(scenario("modulus-stretch", "radial stretch of a ring in space", modulus_stretch));
  s.push_back(scenario("distortion-stretch-half", "radial stretch alpha = 1/2, n = 3", distortion_half));
  s.push_back(scenario("distortion-models", "K_f of model maps", distortion_models));
  return s;
}

nlohmann::json counts_json(const ReportCounts& c) {
  return {{"checks", c.pass + c.fail + c.inconclusive},
          {"pass", c.pass},
          {"fail", c.fail},
          {"inconclusive", c.inconclusive}};
}

}  // namespace

const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> registry = build_registry();
  return registry;
}

std::vector<std::string> default_manifest() {
  std::vector<std::string> names;
  for (const auto& s : scenario_registry()) names.push_back(s.name);
  return names;
}

std::vector<std::string> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest " + path);
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    names.push_back(line.substr(b, e - b + 1));
  }
  return names;
}

int worker_count(int requested, std::size_t jobs) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("ORLICZLAB_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, std::min(n, static_cast<int>(std::max<std::size_t>(jobs, 1))));
}

SuiteResult run_suite(const std::vector<std::string>& manifest, const SuiteOptions& opts) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  SuiteResult res;
  res.scenarios.resize(manifest.size());
  res.threads = worker_count(opts.threads, manifest.size());
  ScenarioContext ctx{opts.seed, opts.constants};

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < manifest.size(); i = next++) {
      auto& out = res.scenarios[i];
      out.name = manifest[i];
      const auto t0 = clock::now();
      const auto& reg = scenario_registry();
      auto it = std::find_if(reg.begin(), reg.end(), [&](const Scenario& s) { return s.name == out.name; });
      try {
        if (it == reg.end()) throw ValidationError("unknown scenario");
        out.rows = it->run(ctx);
      } catch (const std::exception& e) {
        out.error = e.what();
      }
      if (!out.error.empty()) {
        VerificationReport r;
        r.check_id = out.name + ".error";
        r.anchor = "suite:scenario";
        r.status = Status::Fail;
        r.note = out.error;
        out.rows = {r};
      }
      out.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < res.threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& s : res.scenarios) {
    const auto c = count(s.rows);
    res.counts.pass += c.pass;
    res.counts.fail += c.fail;
    res.counts.inconclusive += c.inconclusive;
  }
  res.seconds = std::chrono::duration<double>(clock::now() - start).count();
  return res;
}

nlohmann::json SuiteResult::summary() const {
  nlohmann::json j;
  j["command"] = "suite";
  j["counts"] = counts_json(counts);
  auto arr = nlohmann::json::array();
  for (const auto& s : scenarios) {
    const auto c = count(s.rows);
    nlohmann::json e;
    e["name"] = s.name;
    e["status"] = to_string(c.fail ? Status::Fail : c.inconclusive ? Status::Inconclusive : Status::Pass);
    e["counts"] = counts_json(c);
    if (!s.error.empty()) e["error"] = s.error;
    e["checks"] = to_json(s.rows);
    arr.push_back(e);
  }
  j["scenarios"] = arr;
  return j;
}

nlohmann::json SuiteResult::timing(std::uint64_t seed) const {
  nlohmann::json j;
  j["seed"] = seed;
  j["threads"] = threads;
  j["total_seconds"] = seconds;
  j["timestamp"] = static_cast<long long>(
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count());
  auto per = nlohmann::json::array();
  for (const auto& s : scenarios) per.push_back({{"name", s.name}, {"seconds", s.seconds}});
  j["scenarios"] = per;
  return j;
}

}  // namespace orliczlab
