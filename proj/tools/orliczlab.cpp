#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "orliczlab/conditions.hpp"
#include "orliczlab/counterexample.hpp"
#include "orliczlab/distortion.hpp"
#include "orliczlab/extremal.hpp"
#include "orliczlab/modulus.hpp"
#include "orliczlab/numerics.hpp"
#include "orliczlab/orlicz.hpp"
#include "orliczlab/oscillation.hpp"
#include "orliczlab/suite.hpp"
#include "orliczlab/weight.hpp"

using namespace orliczlab;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string report;
  std::vector<std::string> constants;
  ConstantsConfig config;
};

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> numbers(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(what + ": not a number: " + item);
    }
  }
  return out;
}

std::set<std::string> choices(const std::string& list, const std::set<std::string>& allowed, const std::string& what) {
  std::set<std::string> out;
  for (const auto& c : split(list)) {
    if (!allowed.count(c)) throw UsageError(what + ": unknown choice " + c);
    out.insert(c);
  }
  return out;
}

ConstantsConfig parse_constants(const std::vector<std::string>& items) {
  ConstantsConfig c;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--constant expects name=value: " + item);
    const std::string name = item.substr(0, eq);
    if (!c.entries.count(name)) throw UsageError("unknown constant " + name);
    c.set(name, numbers(item.substr(eq + 1), "--constant").at(0));
  }
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void add_rows(json& j, const ReportList& rows) {
  const auto c = count(rows);
  j["checks"] = to_json(rows);
  j["counts"] = {{"checks", c.pass + c.fail + c.inconclusive},
                 {"pass", c.pass},
                 {"fail", c.fail},
                 {"inconclusive", c.inconclusive}};
}

/// Report goes to --report or stdout; the timing sidecar only exists next to a report file.
int emit(const Common& common, json j, const ReportList& rows, double seconds, json timing = json::object()) {
  j["constants"] = common.config.to_json();
  add_rows(j, rows);
  if (common.report.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json(common.report, j);
    timing["command"] = j["command"];
    timing["seconds"] = seconds;
    timing["timestamp"] = static_cast<long long>(
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count());
    write_json(common.report + ".timing.json", timing);
    const auto c = count(rows);
    std::cerr << j["command"].get<std::string>() << ": " << c.pass << " pass, " << c.fail << " fail, "
              << c.inconclusive << " inconclusive\n";
  }
  return count(rows).fail > 0 ? 1 : 0;
}

Eigen::VectorXd point(const std::vector<double>& v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i];
  return x;
}

struct CheckCondition {
  std::string phi;
  int k = 0;
  double p = 0.0;
  double delta = 1.0;
  double cutoff = 1e12;
  double margin = 0.05;
  std::string expect;

  int run(const Common& common, CLI::App* sub) const {
    const auto t0 = std::chrono::steady_clock::now();
    ClassifierOptions o;
    o.cutoff = cutoff;
    o.margin = margin;
    const auto gauge = parse_gauge(phi);
    const auto v = calderon_condition(gauge, k, o);
    json j;
    j["command"] = "check-condition";
    j["phi"] = phi;
    j["k"] = k;
    j["verdict"] = to_json(v);
    ReportList rows;
    if (!expect.empty()) {
      const auto want = expect == "convergent" ? Classification::Convergent : Classification::Divergent;
      rows.push_back(verdict_check("calderon." + phi + ".k=" + std::to_string(k), "conditions:calderon", v, want));
    }
    if (sub->count("--p")) {
      const auto rep = condition_equivalence_report(gauge, p, delta, o);
      json forms = json::array();
      int differ = 0;
      for (const auto& f : rep.forms) {
        forms.push_back(to_json(f));
        if (f.classification != rep.forms.front().classification) ++differ;
      }
      j["equivalence"] = {{"p", p}, {"delta", delta}, {"convex", rep.convex}, {"t0", number(rep.t0)}, {"forms", forms}};
      auto agree = make_check("equivalence." + phi + ".disagreements", "conditions:equivalence", differ,
                              Relation::LessEq, 0.0, 0.0);
      agree.samples = static_cast<long>(rep.forms.size());
      rows.push_back(agree);
    }
    if (!common.report.empty()) std::cout << to_string(v.classification) << "\n";
    return emit(common, j, rows, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
};

struct BuildExtremal {
  std::string phi;
  int k = 0;
  double lambda_max = 1e10;
  bool rescale = false;
  double s_min = 1e-100;
  std::string out;
  std::string csv;

  int run(const Common& common) const {
    const auto t0 = std::chrono::steady_clock::now();
    ProfileOptions o;
    o.lambda_max = lambda_max;
    o.rescale = rescale;
    const auto profile = build_profile(parse_gauge(phi), k, o);
    const auto rows = verify_calderon_pair(profile, s_min);
    json j;
    j["command"] = "build-extremal";
    j["phi"] = phi;
    j["k"] = k;
    j["lambda_max"] = profile.lambda_max();
    j["scale"] = profile.scale();
    j["raw_energy"] = number(profile.raw_energy());
    j["total_energy"] = number(profile.total_energy());
    j["h1"] = profile.h1();
    if (!out.empty()) write_json(out, profile.to_json());
    if (!csv.empty()) {
      std::ostringstream t;
      t.precision(17);
      t << "log10_s,h,F,energy\n";
      for (double ls = -12.0; ls <= 0.0; ls += 0.25) {
        const double s = std::pow(10.0, ls);
        t << ls << "," << profile.h(s) << "," << profile.F(s) << "," << radial_energy(profile, s) << "\n";
      }
      write_text(csv, t.str());
    }
    return emit(common, j, rows, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
};

struct BuildCounterexample {
  std::string phi;
  int k = 0;
  int depth = 5;
  double lambda_max = 1e100;
  std::string out;

  int run(const Common& common) const {
    const auto t0 = std::chrono::steady_clock::now();
    CounterexampleOptions o;
    o.depth = depth;
    o.lambda_max = lambda_max;
    const auto m = build_sequences(phi, k, o);
    write_json(out, m.to_json());
    json j;
    j["command"] = "build-counterexample";
    j["phi"] = phi;
    j["k"] = k;
    j["depth"] = m.depth();
    j["model"] = out;
    json levels = json::array();
    for (const auto& l : m.levels())
      levels.push_back({{"l", l.l}, {"log_r", l.log_r}, {"log_rho", l.log_rho}, {"log_rho_star", l.log_rho_star},
                        {"active", l.active}});
    j["levels"] = levels;
    return emit(common, j, check_invariants(m),
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
};

struct VerifyCounterexample {
  std::string model;
  std::string checks = "invariants,osc,diam,energy,hausdorff";
  std::string levels;

  int run(const Common& common) const {
    const auto t0 = std::chrono::steady_clock::now();
    const auto which =
        choices(checks, {"invariants", "osc", "diam", "energy", "hausdorff"}, "--checks");
    std::ifstream in(model);
    json mj;
    try {
      mj = json::parse(in);
    } catch (const json::exception& e) {
      throw ValidationError(std::string("model file is not JSON: ") + e.what());
    }
    const auto m = model_from_json(mj);
    const int P = m.depth();
    std::vector<int> chosen;
    for (double v : numbers(levels, "--levels")) chosen.push_back(static_cast<int>(v));
    auto range = [&](int lo, int hi) {
      if (!chosen.empty()) return chosen;
      std::vector<int> r;
      for (int p = lo; p <= hi; ++p) r.push_back(p);
      return r;
    };
    ReportList rows;
    auto add = [&](const ReportList& r) { rows.insert(rows.end(), r.begin(), r.end()); };
    if (which.count("invariants")) add(check_invariants(m));
    if (which.count("osc"))
      for (int p : range(2, P - 1)) add(check_oscillation(m, p));
    if (which.count("diam"))
      for (int p : range(2, P - 1)) add(check_diameter(m, p));
    if (which.count("energy")) add(energy_budget(m));
    if (which.count("hausdorff"))
      for (int l : range(1, P)) add(hausdorff_lower(m, l));
    json j;
    j["command"] = "verify-counterexample";
    j["model"] = model;
    j["phi"] = m.phi_spec();
    j["k"] = m.k();
    j["depth"] = P;
    return emit(common, j, rows, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
};

struct Oscillation {
  std::string field;
  std::string center;
  double r0 = 0.5;
  int scales = 8;
  int quadrature = 256;
  std::string csv;

  int run(const Common& common) const {
    const auto t0 = std::chrono::steady_clock::now();
    const auto u = parse_field(field);
    std::vector<double> c = center.empty() ? std::vector<double>(u.dimension, 0.0) : numbers(center, "--center");
    if (static_cast<int>(c.size()) != u.dimension)
      throw UsageError("--center needs " + std::to_string(u.dimension) + " coordinates");
    BallQuadrature q;
    q.radial = q.angular = quadrature;
    const auto res = fmo_at_point(u, point(c), dyadic_grid(std::min(r0, u.integrable_radius), scales), {}, q);
    json j;
    j["command"] = "oscillation";
    j["field"] = field;
    j["center"] = c;
    json eps = json::array(), means = json::array(), osc = json::array();
    for (std::size_t i = 0; i < res.eps.size(); ++i) {
      eps.push_back(number(res.eps[i]));
      means.push_back(number(res.means[i]));
      osc.push_back(number(res.oscillation[i]));
    }
    j["eps"] = eps;
    j["means"] = means;
    j["oscillation"] = osc;
    j["max_oscillation"] = number(res.max_oscillation);
    j["trend"] = number(res.trend);
    j["evidence"] = res.evidence;
    ReportList rows = res.rows;
    const auto spec = parse_spec(field);
    if (spec.name == "example1" || spec.name == "example2") {
      auto ex = spec.name == "example1" ? build_example1(spec.get("p", 2.0), 6, q)
                                        : build_example2(spec.get("delta", 0.5), 0, q);
      j["example"] = ex.data;
      rows.insert(rows.end(), ex.rows.begin(), ex.rows.end());
    }
    if (!csv.empty()) {
      std::ostringstream t;
      t.precision(17);
      t << "eps,mean,oscillation\n";
      for (std::size_t i = 0; i < res.eps.size(); ++i)
        t << res.eps[i] << "," << res.means[i] << "," << res.oscillation[i] << "\n";
      write_text(csv, t.str());
    }
    return emit(common, j, rows, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
};

struct Modulus {
  std::string ring;
  std::string weight = "const:c=1";
  std::string family = "curves";
  int grid = 0;
  double p = 2.0;
  std::string map;

  int run(const Common& common) const {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = numbers(ring, "--ring");
    if (r.size() != 3) throw UsageError("--ring expects r1,r2,n");
    const auto domain = RingDomain::make(r[0], r[1], static_cast<int>(r[2]));
    const auto w = parse_weight(weight, domain.n);
    const bool spheres = family == "spheres";
    auto closed = spheres ? spheres_lower_bound(w, domain.r1, domain.r2) : ring_upper_bound(w, domain);
    json j;
    j["command"] = "modulus";
    j["ring"] = {{"r1", domain.r1}, {"r2", domain.r2}, {"n", domain.n}};
    j["weight"] = weight;
    j["family"] = family;
    j["value"] = number(closed.value);
    j["method"] = to_string(closed.method);
    ReportList rows = closed.certificate;
    if (grid > 0) {
      GridOptions o;
      o.resolution = grid;
      auto g = grid_modulus_2d(domain, p, spheres ? GridFamily::Separating : GridFamily::Joining, o);
      j["grid"] = g.data;
      rows.insert(rows.end(), g.certificate.begin(), g.certificate.end());
    }
    if (!map.empty()) {
      auto hz = hesse_ziemer_check(domain, map, grid > 0 ? grid : 256);
      rows.insert(rows.end(), hz.begin(), hz.end());
    }
    return emit(common, j, rows, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
};

struct Distortion {
  std::string map;
  std::string checks = "kf";
  int samples = 0;
  std::string at;
  std::string csv;

  int run(const Common& common) const {
    const auto t0 = std::chrono::steady_clock::now();
    const auto which = choices(checks, {"holder", "kf"}, "--check");
    const auto f = parse_map(map);
    json j;
    j["command"] = "distortion";
    j["map"] = map;
    j["n"] = f.n;
    ReportList rows;
    if (which.count("kf")) {
      auto r = samples > 0 ? kf_check(f, samples) : kf_check(f);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    if (which.count("holder")) {
      auto r = samples > 0 ? holder_check(f, samples) : holder_check(f);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    if (!at.empty()) {
      const auto x = numbers(at, "--at");
      if (static_cast<int>(x.size()) != f.n) throw UsageError("--at needs " + std::to_string(f.n) + " coordinates");
      j["kf_at"] = {{"x", x}, {"kf", number(kf_numeric(f, point(x)))}};
    }
    if (!csv.empty()) {
      if (f.kind != MapKind::Identity && f.kind != MapKind::RadialStretch)
        throw PreconditionError("--csv needs a map with closed-form K_f");
      Eigen::VectorXd e = Eigen::VectorXd::Zero(f.n);
      e[0] = 1.0;
      const double kn = std::pow(kf_closed(f, e), f.n - 1);
      const auto profile = RadialWeight::radial(f.n, [kn](double) { return kn; }, "K_f^{n-1}");
      const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(f.n);
      std::ostringstream t;
      t.precision(17);
      t << "r,distortion_bound,chordal_image_distance\n";
      for (int i = 2; i <= 30; ++i) {
        const double rr = std::ldexp(1.0, -i);
        const Eigen::VectorXd x = rr * e;
        const auto b = distortion_bound(profile, ChordalGap{}, x0, 0.5, x, common.config, 1e-8);
        t << rr << "," << b.value << "," << chordal_distance(f(x), f(x0)) << "\n";
      }
      write_text(csv, t.str());
    }
    return emit(common, j, rows, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
};

struct Suite {
  std::string manifest;
  std::uint64_t seed = 0;
  int threads = 0;

  int run(const Common& common) const {
    SuiteOptions o;
    o.seed = seed;
    o.threads = threads;
    o.constants = common.config;
    const auto names = manifest.empty() ? default_manifest() : read_manifest(manifest);
    const auto res = run_suite(names, o);
    json j = res.summary();
    j["constants"] = common.config.to_json();
    if (common.report.empty()) {
      std::cout << j.dump(2) << "\n";
    } else {
      write_json(common.report, j);
      write_json(common.report + ".timing.json", res.timing(seed));
      std::cerr << "suite: " << res.counts.pass << " pass, " << res.counts.fail << " fail, "
                << res.counts.inconclusive << " inconclusive in " << res.seconds << " s\n";
    }
    return res.counts.fail > 0 ? 1 : 0;
  }
};

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  if (dynamic_cast<const PreconditionError*>(&e)) return "PreconditionError";
  if (dynamic_cast<const NumericalError*>(&e)) return "NumericalError";
  if (dynamic_cast<const DepthError*>(&e)) return "DepthError";
  return "Error";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orliczlab: numerical checks for Orlicz-Sobolev mappings"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file; command line flags take precedence");
  app.allow_config_extras(false);

  Common common;
  app.add_option("--report", common.report, "JSON report path (stdout when omitted)");
  app.add_option("--constant", common.constants, "name=value for alpha_k, alpha_n, c_n, gamma_n, beta_n");

  CheckCondition cc;
  auto* c1 = app.add_subcommand("check-condition", "classify the Calderon integral of a gauge");
  c1->add_option("--phi", cc.phi, "gauge spec, e.g. pow:p=3")->required();
  c1->add_option("--k", cc.k, "dimension k")->required()->check(CLI::PositiveNumber);
  c1->add_option("--p", cc.p, "also run the six equivalent forms at this p")->check(CLI::PositiveNumber);
  c1->add_option("--delta", cc.delta, "lower endpoint of the equivalent forms")->check(CLI::PositiveNumber);
  c1->add_option("--cutoff", cc.cutoff, "classifier cutoff")->check(CLI::PositiveNumber);
  c1->add_option("--margin", cc.margin, "classifier margin")->check(CLI::PositiveNumber);
  c1->add_option("--expect", cc.expect, "expected verdict")->check(CLI::IsMember({"convergent", "divergent"}));

  BuildExtremal be;
  auto* c2 = app.add_subcommand("build-extremal", "tabulate the extremal profile of a gauge");
  c2->add_option("--phi", be.phi, "gauge spec")->required();
  c2->add_option("--k", be.k, "dimension k")->required()->check(CLI::PositiveNumber);
  c2->add_option("--out", be.out, "profile JSON path");
  c2->add_option("--csv", be.csv, "s, h(s), F(s), energy table");
  c2->add_option("--lambda-max", be.lambda_max, "largest log(1/s)")->check(CLI::PositiveNumber);
  c2->add_option("--s-min", be.s_min, "smallest s for the Calderon pair")->check(CLI::Range(0.0, 1.0));
  c2->add_flag("--rescale", be.rescale, "normalize the total energy to at most 1");

  BuildCounterexample bc;
  auto* c3 = app.add_subcommand("build-counterexample", "build the level sequences of the counterexample");
  c3->add_option("--phi", bc.phi, "gauge spec")->required();
  c3->add_option("--k", bc.k, "dimension k")->required()->check(CLI::PositiveNumber);
  c3->add_option("--depth", bc.depth, "number of levels")->check(CLI::PositiveNumber);
  c3->add_option("--lambda-max", bc.lambda_max, "largest log(1/r)")->check(CLI::PositiveNumber);
  c3->add_option("--out", bc.out, "model JSON path")->required();

  VerifyCounterexample vc;
  auto* c4 = app.add_subcommand("verify-counterexample", "check a built counterexample model");
  c4->add_option("--model", vc.model, "model JSON path")->required()->check(CLI::ExistingFile);
  c4->add_option("--checks", vc.checks, "comma list of invariants, osc, diam, energy, hausdorff");
  c4->add_option("--levels", vc.levels, "comma list of levels instead of the defaults");

  Oscillation os;
  auto* c5 = app.add_subcommand("oscillation", "mean oscillation of a field at a point");
  c5->add_option("--field", os.field, "field spec, e.g. log-recip or example2:delta=0.5")->required();
  c5->add_option("--center", os.center, "comma separated point (origin by default)");
  c5->add_option("--r0", os.r0, "largest ball radius")->check(CLI::PositiveNumber);
  c5->add_option("--scales", os.scales, "number of dyadic radii")->check(CLI::PositiveNumber);
  c5->add_option("--quadrature", os.quadrature, "radial and angular nodes")->check(CLI::Range(8, 4096));
  c5->add_option("--csv", os.csv, "eps, mean, oscillation table");

  Modulus mo;
  auto* c6 = app.add_subcommand("modulus", "moduli of a ring: closed-form bounds and grid solver");
  c6->add_option("--ring", mo.ring, "r1,r2,n")->required();
  c6->add_option("--weight", mo.weight, "weight spec Q");
  c6->add_option("--family", mo.family, "spheres or curves")->check(CLI::IsMember({"spheres", "curves"}));
  c6->add_option("--grid", mo.grid, "grid resolution for n = 2 (0 skips the grid)")->check(CLI::NonNegativeNumber);
  c6->add_option("--p", mo.p, "grid modulus exponent")->check(CLI::PositiveNumber);
  c6->add_option("--map", mo.map, "model map for the Hesse-Ziemer check");

  Distortion di;
  auto* c7 = app.add_subcommand("distortion", "K_f and distortion checks of model maps");
  c7->add_option("--map", di.map, "map spec, e.g. stretch:alpha=0.5,n=3")->required();
  c7->add_option("--check", di.checks, "comma list of holder, kf");
  c7->add_option("--samples", di.samples, "sample count")->check(CLI::PositiveNumber);
  c7->add_option("--at", di.at, "point for a single K_f evaluation");
  c7->add_option("--csv", di.csv, "r, distortion bound, image distance table");

  Suite su;
  auto* c8 = app.add_subcommand("suite", "run a battery of named scenarios");
  c8->add_option("--manifest", su.manifest, "file with one scenario name per line")->check(CLI::ExistingFile);
  c8->add_option("--seed", su.seed, "seed for stochastic sampling");
  c8->add_option("--threads", su.threads, "worker cap (ORLICZLAB_THREADS otherwise)")->check(CLI::NonNegativeNumber);
  c8->add_flag_callback("--list", [] {
    for (const auto& s : scenario_registry()) std::cout << s.name << "  " << s.description << "\n";
    throw CLI::Success();
  }, "print the scenario names");

  try {
    app.parse(argc, argv);
    common.config = parse_constants(common.constants);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (c1->parsed()) return cc.run(common, c1);
    if (c2->parsed()) return be.run(common);
    if (c3->parsed()) return bc.run(common);
    if (c4->parsed()) return vc.run(common);
    if (c5->parsed()) return os.run(common);
    if (c6->parsed()) return mo.run(common);
    if (c7->parsed()) return di.run(common);
    return su.run(common);
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    json err = {{"error", {{"type", error_type(e)}, {"message", e.what()}}}};
    if (common.report.empty()) {
      std::cout << err.dump(2) << "\n";
    } else {
      try {
        write_json(common.report, err);
      } catch (const std::exception&) {
        std::cout << err.dump(2) << "\n";
      }
    }
    std::cerr << error_type(e) << ": " << e.what() << "\n";
    return 1;
  }
}
