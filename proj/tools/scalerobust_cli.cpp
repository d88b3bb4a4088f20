// scalerobust: command-line front end.
//
// Exit status: 0 success, 1 invalid input, 2 uncertified region or failed check.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "property_checks.hpp"
#include "scalerobust/io.hpp"
#include "scalerobust/scalerobust.hpp"

namespace sr = scalerobust;
using sr::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kFailed = 2;

struct Output {
  std::string path;
  std::string format = "json";

  void emit(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << text;
  }

  void emit(json j) const {
    json doc = {{"schema_version", sr::kSchemaVersion}};
    doc.update(j);
    emit(doc.dump(2) + "\n");
  }
};

void add_output(CLI::App* cmd, Output& out, std::vector<std::string> formats = {"json"}) {
  cmd->add_option("--out,-o", out.path, "Write the result to this file instead of stdout");
  cmd->add_option("--format", out.format, "Output format")
      ->check(CLI::IsMember(formats))
      ->capture_default_str();
}

bool all_spa(const sr::MarkupMixture& m) {
  for (const auto& a : m.atoms()) {
    if (a.ratio != 1.0) return false;
  }
  return true;
}

struct RevenueArgs {
  std::string mixture = "1:1";
  std::string dist;
  std::string method = "auto";
};

std::pair<double, std::string> revenue_of(const sr::MarkupMixture& m, const sr::DistributionSpec& d,
                                          const std::string& method) {
  using Kind = sr::DistributionSpec::Kind;
  const bool closed = d.kind == Kind::triangle || (d.kind == Kind::quad && all_spa(m));
  if (method == "closed_form" && !closed) {
    throw std::invalid_argument("no closed form for this mechanism/distribution pair; use --method quadrature");
  }
  if (closed && method != "quadrature") {
    if (d.kind == Kind::triangle) return {sr::mixture_revenue_triangle(m, d.triangle->q_bar), "closed_form"};
    return {sr::spa_revenue_quad(*d.quad), "closed_form"};
  }
  return {sr::mixture_revenue(m, d.curve()), "quadrature"};
}

json input_json(const sr::MarkupMixture& m, const sr::DistributionSpec& d) {
  return {{"mixture", sr::mixture_to_json(m)}, {"dist", d.text}};
}

std::vector<double> parse_pair(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(sr::detail::parse_number(item, "value"));
  if (out.size() != 2) throw std::invalid_argument("expected two comma-separated values, got '" + s + "'");
  return out;
}

std::string paradigm_text(double h, const std::array<sr::ParadigmRow, 3>& rows) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "H = %.10g\n%-18s %16s %20s %16s\n", h, "mechanism", "min revenue",
                "max approximation", "max regret");
  out += line;
  for (const auto& row : rows) {
    std::snprintf(line, sizeof line, "%-18s %16.10g %20s %16.10g\n", sr::to_string(row.kind).c_str(),
                  row.min_revenue, row.max_approximation.str().c_str(), row.max_regret);
    out += line;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scale-robust two-bidder auctions: revenues, equilibrium, certificates, simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "scalerobust 1.0.0");
  Output out;
  int status = kOk;

  // revenue / apx ------------------------------------------------------------
  RevenueArgs rev;
  auto* revenue = app.add_subcommand("revenue", "Expected revenue of a markup mixture on a distribution");
  revenue->add_option("--mixture,-m", rev.mixture, "Mixture spec w:r[,w:r...] (a bare r means one ratio)")
      ->capture_default_str();
  revenue->add_option("--dist,-d", rev.dist, "triangle:Q | quad:Q,QP,R | curve:@file.json | pointmass:V")
      ->required();
  revenue->add_option("--method", rev.method, "auto | closed_form | quadrature")
      ->check(CLI::IsMember({"auto", "closed_form", "quadrature"}))
      ->capture_default_str();
  add_output(revenue, out);
  revenue->callback([&] {
    const auto m = sr::parse_mixture(rev.mixture);
    const auto d = sr::parse_distribution(rev.dist);
    const auto [value, method] = revenue_of(m, d, rev.method);
    out.emit(json{{"command", "revenue"}, {"input", input_json(m, d)}, {"value", value}, {"method", method}});
  });

  RevenueArgs apx;
  bool best_markup = false;
  double r_cap = 64.0;
  auto* apx_cmd = app.add_subcommand("apx", "Approximation ratio OPT/REV of a mixture on a distribution");
  apx_cmd->add_option("--mixture,-m", apx.mixture, "Mixture spec w:r[,w:r...]")->capture_default_str();
  apx_cmd->add_option("--dist,-d", apx.dist, "Distribution spec")->required();
  apx_cmd->add_option("--method", apx.method, "auto | closed_form | quadrature")
      ->check(CLI::IsMember({"auto", "closed_form", "quadrature"}))
      ->capture_default_str();
  apx_cmd->add_flag("--best-markup", best_markup,
                    "Ignore --mixture; report the best single markup ratio on a triangle (APX_*)");
  apx_cmd->add_option("--r-cap", r_cap, "Upper end of the markup search for --best-markup")->capture_default_str();
  add_output(apx_cmd, out);
  apx_cmd->callback([&] {
    const auto d = sr::parse_distribution(apx.dist);
    if (best_markup) {
      if (d.kind != sr::DistributionSpec::Kind::triangle) throw std::invalid_argument("--best-markup needs a triangle");
      const auto s = sr::apx_star(d.triangle->q_bar, r_cap);
      out.emit(json{{"command", "apx"},
                    {"input", {{"dist", d.text}, {"best_markup", true}, {"r_cap", r_cap}}},
                    {"value", s.ratio},
                    {"best_r", s.best_r},
                    {"method", "closed_form"}});
      return;
    }
    const auto m = sr::parse_mixture(apx.mixture);
    const auto [value, method] = revenue_of(m, d, apx.method);
    const double opt = d.kind == sr::DistributionSpec::Kind::triangle ? sr::opt_revenue_truncated(d.triangle->q_bar)
                                                                       : sr::opt_revenue(d.curve());
    json j{{"command", "apx"}, {"input", input_json(m, d)}, {"method", method}, {"optimal_revenue", opt},
           {"revenue", value}};
    j["value"] = value > 0.0 ? json(opt / value) : json("inf");
    out.emit(j);
  });

  // solve ----------------------------------------------------------------------
  sr::SolveTolerances tol;
  auto* solve = app.add_subcommand("solve", "Compute the equilibrium (q*, r*, alpha*, beta)");
  solve->add_option("--tol", tol.validation, "Tolerance for the equilibrium checks")
      ->check(CLI::Range(1e-9, 1e-2))
      ->capture_default_str();
  solve->add_option("--r-cap", tol.r_cap, "Upper end of the markup search")->check(CLI::Range(2.0, 1e6))
      ->capture_default_str();
  add_output(solve, out);
  solve->callback([&] {
    const auto s = sr::solve_equilibrium(tol);
    json j = sr::to_json(s);
    j["command"] = "solve";
    out.emit(j);
    if (!s.validated) status = kFailed;
  });

  // certify --------------------------------------------------------------------
  sr::CertifyOptions cert;
  std::string region = "all";
  auto* certify = app.add_subcommand("certify", "Replay the grid certificates for regions a, b, c");
  certify->add_option("--epsilon,-e", cert.epsilon, "Base grid spacing")->check(CLI::Range(1e-9, 1e-4))
      ->capture_default_str();
  certify->add_option("--region", region, "a | b | c | all")->check(CLI::IsMember({"a", "b", "c", "all"}))
      ->capture_default_str();
  certify->add_option("--threads", cert.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  add_output(certify, out);
  certify->callback([&] {
    std::vector<sr::CertRegion> regions;
    if (region == "a" || region == "all") regions.push_back(sr::CertRegion::a);
    if (region == "b" || region == "all") regions.push_back(sr::CertRegion::b);
    if (region == "c" || region == "all") regions.push_back(sr::CertRegion::c);
    const auto rep = sr::certify(regions, cert);
    json j = sr::to_json(rep);
    j["command"] = "certify";
    out.emit(j);
    if (!rep.all_certified()) status = kFailed;
  });

  // simulate -------------------------------------------------------------------
  std::string sim_mixture = "1:1", sim_dist;
  std::uint64_t sim_n = 1000000, sim_seed = 42;
  unsigned sim_threads = sr::default_threads();
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo revenue estimate");
  simulate->add_option("--mixture,-m", sim_mixture, "Mixture spec w:r[,w:r...]")->capture_default_str();
  simulate->add_option("--dist,-d", sim_dist, "Distribution spec")->required();
  simulate->add_option("--n", sim_n, "Number of value pairs")->check(CLI::Range(std::uint64_t{1000}, std::uint64_t{1} << 40))
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
  simulate->add_option("--threads", sim_threads, "Worker threads (result does not depend on it)")
      ->check(CLI::Range(1u, 1024u));
  add_output(simulate, out);
  simulate->callback([&] {
    const auto m = sr::parse_mixture(sim_mixture);
    const auto d = sr::parse_distribution(sim_dist);
    const auto e = sr::mc_revenue(m, d.curve(), sim_n, sim_seed, sim_threads);
    json j = sr::to_json(e);
    j["command"] = "simulate";
    j["input"] = input_json(m, d);
    out.emit(j);
  });

  // paradigms ------------------------------------------------------------------
  double h = 100.0;
  Output par_out;
  par_out.format = "text";
  auto* paradigms = app.add_subcommand("paradigms", "Robust monopoly pricing: max-min, ratio and regret rows");
  paradigms->add_option("--H", h, "Upper end of the value range (at least e)")->capture_default_str();
  add_output(paradigms, par_out, {"text", "json"});
  paradigms->callback([&] {
    const auto rows = sr::paradigm_table(h);
    if (par_out.format == "text") {
      par_out.emit(paradigm_text(h, rows));
      return;
    }
    json arr = json::array();
    for (const auto& row : rows) arr.push_back(sr::to_json(row));
    par_out.emit(json{{"command", "paradigms"}, {"H", h}, {"rows", arr}});
  });

  // symmetrize -----------------------------------------------------------------
  std::string base = "reserve-spa:1", values = "0.5,0.8";
  double half_width = 10.0, scale = 2.0;
  int nodes = 1024;
  auto* symmetrize = app.add_subcommand("symmetrize", "Log-uniform scale averaging and its invariance defect");
  symmetrize->add_option("--base", base, "reserve-spa:RHO or mixture:w:r[,w:r...]")->capture_default_str();
  symmetrize->add_option("--L", half_width, "Half-width of the log-scale window")->check(CLI::PositiveNumber)
      ->capture_default_str();
  symmetrize->add_option("--v", values, "Value profile v1,v2")->capture_default_str();
  symmetrize->add_option("--scale", scale, "Scale factor s")->check(CLI::PositiveNumber)->capture_default_str();
  symmetrize->add_option("--nodes", nodes, "Quadrature nodes (>= 64)")->check(CLI::Range(64, 1 << 20))
      ->capture_default_str();
  add_output(symmetrize, out);
  symmetrize->callback([&] {
    const auto v = parse_pair(values);
    auto report = [&](const auto& rule) {
      const sr::ScaledAverage avg(rule, half_width, nodes);
      const auto d = sr::invariance_defect(avg, v[0], v[1], scale);
      json j = sr::to_json(d);
      j["command"] = "symmetrize";
      j["input"] = {{"base", base}, {"L", half_width}, {"v", v}, {"scale", scale}, {"nodes", nodes}};
      j["base_outcome"] = sr::to_json(rule(v[0], v[1]));
      j["averaged_outcome"] = sr::to_json(avg(v[0], v[1]));
      j["averaged_outcome_scaled"] = sr::to_json(avg(scale * v[0], scale * v[1]));
      j["within_bounds"] = d.within(1e-8);
      out.emit(j);
      if (!d.within(1e-8)) status = kFailed;
    };
    if (base.rfind("reserve-spa:", 0) == 0) {
      const double rho = sr::detail::parse_number(base.substr(12), "reserve");
      if (!(rho > 0.0)) throw std::invalid_argument("reserve must be positive");
      report(sr::ReserveSecondPrice{rho});
    } else if (base.rfind("mixture:", 0) == 0) {
      report(sr::parse_mixture(base.substr(8)));
    } else {
      throw std::invalid_argument("unknown base mechanism '" + base + "'");
    }
  });

  // plotdata -------------------------------------------------------------------
  std::string figure = "rev-approx", out_dir = ".";
  int points = 1000;
  auto* plotdata = app.add_subcommand("plotdata", "Write the CSV series behind the APX and markup-revenue plots");
  plotdata->add_option("--figure", figure, "Figure id")->check(CLI::IsMember({"rev-approx"}))->capture_default_str();
  plotdata->add_option("--out-dir", out_dir, "Directory for the CSV files")->capture_default_str();
  plotdata->add_option("--points", points, "Samples per series")->check(CLI::Range(10, 1000000))
      ->capture_default_str();
  add_output(plotdata, out);
  plotdata->callback([&] {
    std::filesystem::create_directories(out_dir);
    const auto apx_path = std::filesystem::path(out_dir) / "rev_approx_apx.csv";
    const auto rev_path = std::filesystem::path(out_dir) / "rev_approx_markup.csv";
    std::ofstream a(apx_path), r(rev_path);
    if (!a || !r) throw std::invalid_argument("cannot write into '" + out_dir + "'");
    a << "q,apx_1,apx_star,best_r\n";
    double cross_q = 0.0;
    double prev_gap = 0.0;
    for (int i = 1; i < points; ++i) {
      const double q = 0.5 * i / points;
      const auto s = sr::apx_star(q);
      const double gap = sr::opt_revenue_truncated(q) - s.ratio;
      if (i > 1 && prev_gap > 0.0 && gap <= 0.0) cross_q = q;
      prev_gap = gap;
      a << sr::format_double(q) << "," << sr::format_double(sr::opt_revenue_truncated(q)) << ","
        << sr::format_double(s.ratio) << "," << sr::format_double(s.best_r) << "\n";
    }
    const double q_star = sr::find_crossing();
    r << "r,revenue\n";
    for (int i = 1; i <= points; ++i) {
      const double rr = 1.0 + 9.0 * i / points;
      r << sr::format_double(rr) << "," << sr::format_double(sr::markup_revenue_triangle(rr, q_star)) << "\n";
    }
    out.emit(json{{"command", "plotdata"},
                  {"figure", figure},
                  {"files", {apx_path.string(), rev_path.string()}},
                  {"q_star", q_star},
                  {"first_grid_q_past_crossing", cross_q}});
  });

  // curve ----------------------------------------------------------------------
  std::string curve_dist, op = "none";
  Output curve_out;
  auto* curve = app.add_subcommand("curve", "Export a revenue curve, optionally transformed");
  curve->add_option("--dist,-d", curve_dist, "Distribution spec")->required();
  curve->add_option("--op", op, "none | truncate | hull | normalize | iron:A,B")->capture_default_str();
  add_output(curve, curve_out, {"json", "csv"});
  curve->callback([&] {
    sr::RevenueCurve c = sr::parse_distribution(curve_dist).curve();
    if (op == "truncate") {
      c = sr::truncate(c);
    } else if (op == "hull") {
      c = sr::concave_monotone_hull(c);
    } else if (op == "normalize") {
      c = c.normalized();
    } else if (op.rfind("iron:", 0) == 0) {
      const auto ab = parse_pair(op.substr(5));
      c = sr::iron(c, ab[0], ab[1]);
    } else if (op != "none") {
      throw std::invalid_argument("unknown curve op '" + op + "'");
    }
    if (curve_out.format == "csv") {
      curve_out.emit(sr::curve_to_csv(c));
    } else {
      json j = sr::curve_to_json(c);
      j["area"] = sr::area_under(c);
      curve_out.emit(j);
    }
  });

  // check ----------------------------------------------------------------------
  std::uint64_t check_seed = 7;
  Output check_out;
  check_out.format = "text";
  auto* check = app.add_subcommand("check", "Run the invariant suite");
  check->add_option("--seed", check_seed, "Seed for the randomized checks")->capture_default_str();
  add_output(check, check_out, {"text", "json"});
  check->callback([&] {
    const auto results = sr::cli::run_property_checks(check_seed);
    bool ok = true;
    std::string text;
    json arr = json::array();
    for (const auto& r : results) {
      ok = ok && r.passed;
      text += std::string(r.passed ? "PASS  " : "FAIL  ") + r.name + "  (" + r.detail + ")\n";
      arr.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    }
    if (check_out.format == "text") {
      text += ok ? "all checks passed\n" : "some checks FAILED\n";
      check_out.emit(text);
    } else {
      check_out.emit(json{{"command", "check"}, {"checks", arr}, {"passed", ok}});
    }
    if (!ok) status = kFailed;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return status;
}
