#include "gdh/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "gdh/errors.hpp"
#include "gdh/harness.hpp"

namespace gdh {
namespace {

struct Outcome {
  Json inputs;
  Json result;
  std::uint64_t seed = 0;
  int code = kExitOk;
};

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, int>) {
        out.push_back(std::stoi(item, &used));
      } else {
        out.push_back(std::stod(item, &used));
      }
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ParseError(std::string(flag) + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ParseError(std::string(flag) + ": empty list");
  return out;
}

/// A per-axis list; a single entry is repeated to dimension d.
std::vector<int> per_axis(const std::string& text, int d, const char* flag) {
  auto v = parse_list<int>(text, flag);
  if (v.size() == 1) v.assign(d, v.front());
  if (static_cast<int>(v.size()) != d) throw ParseError(std::string(flag) + ": expected " + std::to_string(d) + " entries");
  return v;
}

Flavor parse_flavor(const std::string& s) {
  if (s == "theta") return Flavor::Toeplitz;
  if (s == "psi" || s == "gamma") return Flavor::Correlation;
  throw ParseError("--flavor: expected theta, psi or gamma");
}

struct NormArgs {
  std::string kernel, domain, input_domain, flavor = "theta";
  double tol = 1e-8, spacing = 1.0;
  int max_iter = 5000;
  std::uint64_t seed = 42;
};

Outcome cmd_norm(const NormArgs& a) {
  Outcome o;
  const Json kj = read_json_file(a.kernel), dj = read_json_file(a.domain);
  o.inputs = {{"kernel", kj}, {"domain", dj}, {"flavor", a.flavor}, {"tol", a.tol}, {"max_iter", a.max_iter},
              {"spacing", a.spacing}};
  const auto flavor = parse_flavor(a.flavor);
  const auto f = kernel_from_json(kj);
  const auto out_dom = domain_from_json(dj, a.spacing);
  GridMask in_mask = out_dom.mask;
  if (!a.input_domain.empty()) {
    if (a.flavor != "psi") throw ParseError("--input-domain: only valid with --flavor psi");
    const Json ij = read_json_file(a.input_domain);
    o.inputs["input_domain"] = ij;
    in_mask = domain_from_json(ij, a.spacing).mask;
  }
  const CorrelationOperator op(f, in_mask, out_dom.mask, flavor);
  const auto est = norm_iterative(op, a.tol, a.max_iter, a.seed);
  o.seed = a.seed;
  o.result = to_json(est);
  o.result["rows"] = op.rows();
  o.result["cols"] = op.cols();
  o.code = est.converged ? kExitOk : kExitNoConvergence;
  return o;
}

struct ExtendArgs {
  std::string input, ext_radius, grid, out;
  double tol = 1e-6;
  int max_iter = 20000;
  bool certify = false;
};

Outcome cmd_extend(const ExtendArgs& a) {
  Outcome o;
  const Json aj = read_json_file(a.input);
  const auto seq = multisequence_from_json(aj);
  const int d = seq.dim();
  ExtensionProblem p = ExtensionProblem::with_defaults(seq, a.tol, a.max_iter);
  if (!a.ext_radius.empty()) p.ext_radii = per_axis(a.ext_radius, d, "--ext-radius");
  if (!a.grid.empty()) {
    p.grid = per_axis(a.grid, d, "--grid");
  } else {
    for (int i = 0; i < d; ++i) p.grid[i] = 8 * p.ext_radii[i];
  }
  o.inputs = {{"input", aj}, {"ext_radius", p.ext_radii}, {"grid", p.grid}, {"tol", a.tol},
              {"max_iter", a.max_iter}, {"certify", a.certify}};
  const auto res = min_linf_extension(p);
  o.result = to_json(res);
  if (a.certify) {
    const int n = seq.window().radii.front();
    for (int r : seq.window().radii) {
      if (r != n) throw PreconditionError("--certify: the coefficient window must be a cube");
    }
    const double sec = section_norm_growth(seq, {n}).front();
    o.result["section_norm"] = sec;
    o.result["ratio"] = sec > 0.0 ? Json(res.t_cert / sec) : Json(nullptr);
  }
  if (!a.out.empty()) save_multisequence(res.extension, a.out);
  o.code = res.converged ? kExitOk : kExitNoConvergence;
  return o;
}

struct SweepArgs {
  int d = 1, n = 4, trials = 200, threads = 1, max_iter = 20000;
  std::uint64_t seed = 42;
  std::string ensemble = "complex-gaussian", out;
  double tol = 1e-6;
};

Outcome cmd_sweep(const SweepArgs& a) {
  Outcome o;
  o.inputs = {{"d", a.d}, {"n", a.n}, {"trials", a.trials}, {"ensemble", a.ensemble}, {"tol", a.tol},
              {"max_iter", a.max_iter}};
  SweepConfig cfg;
  cfg.d = a.d;
  cfg.n = a.n;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.ensemble = parse_ensemble(a.ensemble);
  cfg.threads = a.threads;
  cfg.solver.tol = a.tol;
  cfg.solver.max_iter = a.max_iter;
  const auto rep = sweep_constant(cfg);
  o.seed = a.seed;
  o.result = to_json(rep);
  if (!a.out.empty()) {
    std::ofstream csv(a.out);
    if (!csv) throw Error("cannot write '" + a.out + "'");
    write_sweep_csv(rep, csv);
  }
  o.code = rep.nonconverged > 0 ? kExitNoConvergence : kExitOk;
  return o;
}

struct FactorizeArgs {
  std::string input, out;
  int kmax = 32;
  bool relaxed = false;
};

Outcome cmd_factorize(const FactorizeArgs& a) {
  Outcome o;
  const Json gj = read_json_file(a.input);
  o.inputs = {{"input", gj}, {"kmax", a.kmax}, {"relaxed_margin", a.relaxed}};
  const auto res = weak_factorize(cube_function_from_json(gj), a.kmax, FactorizeOptions{a.relaxed});
  o.result = to_json(res);
  if (!a.out.empty()) write_json_file(a.out, o.result);
  return o;
}

struct CertifyArgs {
  std::string kernel, domain, xi, nu, eps = "1e-1,1e-2,1e-3,1e-4";
  double spacing = 1.0;
};

Outcome cmd_certify(const CertifyArgs& a) {
  Outcome o;
  const Json kj = read_json_file(a.kernel), dj = read_json_file(a.domain);
  const auto f = kernel_from_json(kj);
  const auto dom = domain_from_json(dj, a.spacing);
  const int d = dom.mask.dim();
  auto xi = parse_list<double>(a.xi, "--xi");
  auto nu = parse_list<double>(a.nu, "--nu");
  if (xi.size() == 1) xi.assign(d, xi.front());
  if (nu.size() == 1) nu.assign(d, nu.front());
  if (static_cast<int>(xi.size()) != d || static_cast<int>(nu.size()) != d) {
    throw ParseError("--xi/--nu: expected " + std::to_string(d) + " entries");
  }
  const auto eps = parse_list<double>(a.eps, "--eps");
  o.inputs = {{"kernel", kj}, {"domain", dj}, {"xi", xi}, {"nu", nu}, {"eps", eps}, {"spacing", a.spacing}};
  const auto sw = certificate_sweep(f, dom.mask, xi, DirectionSpec(nu), dom.kind, eps);
  o.result = to_json(sw);
  o.result["domain_kind"] = dom.kind == DomainKind::OrthantSandwiched ? "orthant-sandwiched" : "bounded";
  return o;
}

Outcome cmd_demo_hilbert(const std::string& sizes_text) {
  Outcome o;
  const auto sizes = parse_list<int>(sizes_text, "--sizes");
  o.inputs = {{"sizes", sizes}};
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || (i > 0 && sizes[i] <= sizes[i - 1])) {
      throw PreconditionError("--sizes: must be positive and increasing");
    }
  }
  Json rows = Json::array();
  bool monotone = true, bounded = true;
  double prev = 0.0;
  for (int n : sizes) {
    const auto mask = cube_mask(std::vector<int>{n});
    std::vector<Complex> vals(2 * static_cast<std::size_t>(n) - 1);
    for (std::size_t s = 0; s < vals.size(); ++s) vals[s] = 1.0 / static_cast<double>(s + 1);
    const auto op = hankel(Kernel(Box({0}, {2 * n - 2}), vals), mask);
    double v = 0.0;
    bool conv = true;
    if (static_cast<std::size_t>(n) * n <= kDefaultDenseCap) {
      v = norm_dense(op);
    } else {
      const auto est = norm_iterative(op, 1e-12, 20000, 42);
      v = est.value;
      conv = est.converged;
    }
    monotone = monotone && v >= prev;
    bounded = bounded && v <= std::numbers::pi + 1e-9;
    prev = v;
    rows.push_back({{"size", n}, {"norm", v}, {"converged", conv}});
  }
  o.result = {{"sections", rows}, {"monotone", monotone}, {"bounded_by_pi", bounded}};
  o.code = monotone && bounded ? kExitOk : kExitFailure;
  return o;
}

struct SuiteArgs {
  std::string name = "all", junit, out;
  std::uint64_t seed = 42;
  int count = 0;
};

Outcome cmd_suite(const SuiteArgs& a) {
  Outcome o;
  o.inputs = {{"name", a.name}, {"count", a.count}};
  o.seed = a.seed;
  std::vector<std::string> names;
  if (a.name == "all") {
    for (const auto& s : suite_registry()) names.push_back(s.name);
  } else {
    names.push_back(a.name);
  }
  std::vector<SuiteReport> reports;
  Json suites = Json::array();
  bool ok = true;
  for (const auto& n : names) {
    reports.push_back(run_suite(n, a.seed, a.count));
    ok = ok && reports.back().passed;
    auto j = to_json(reports.back());
    if (reports.back().passed) j.erase("cases");
    suites.push_back(std::move(j));
  }
  o.result = {{"passed", ok}, {"suites", suites}};
  if (!a.junit.empty()) {
    std::ofstream x(a.junit);
    if (!x) throw Error("cannot write '" + a.junit + "'");
    x << junit_xml(reports);
  }
  if (!a.out.empty()) {
    Json full = Json::array();
    for (const auto& r : reports) full.push_back(to_json(r));
    write_json_file(a.out, full);
  }
  o.code = ok ? kExitOk : kExitFailure;
  return o;
}

}  // namespace

std::string inputs_digest(const Json& inputs) {
  const std::string s = inputs.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"General-domain Hankel and Toeplitz operator toolkit", "gdh"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  NormArgs na;
  auto* norm = app.add_subcommand("norm", "Operator norm of a kernel on a domain (power iteration)");
  norm->add_option("--kernel", na.kernel, "Kernel JSON")->required();
  norm->add_option("--domain", na.domain, "Domain JSON (output domain for psi)")->required();
  norm->add_option("--input-domain", na.input_domain, "Input domain JSON for psi");
  norm->add_option("--flavor", na.flavor, "theta, psi or gamma")->capture_default_str();
  norm->add_option("--tol", na.tol)->capture_default_str();
  norm->add_option("--max-iter", na.max_iter)->capture_default_str();
  norm->add_option("--spacing", na.spacing, "Raster spacing for polytope and staircase domains")->capture_default_str();
  norm->add_option("--seed", na.seed)->capture_default_str();

  ExtendArgs ea;
  auto* extend = app.add_subcommand("extend", "Minimal sup-norm extension of a coefficient window");
  extend->add_option("--input", ea.input, "Multisequence JSON")->required();
  extend->add_option("--ext-radius", ea.ext_radius, "Extension radius M (per-axis comma list; default 4N)");
  extend->add_option("--grid", ea.grid, "Grid size G (per-axis comma list; default 8M)");
  extend->add_option("--tol", ea.tol)->capture_default_str();
  extend->add_option("--max-iter", ea.max_iter)->capture_default_str();
  extend->add_option("--out", ea.out, "Write the extension as multisequence JSON");
  extend->add_flag("--certify", ea.certify, "Also report the section norm and the ratio");

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "Extension constant over random coefficient windows");
  sweep->add_option("--d", sa.d)->capture_default_str();
  sweep->add_option("--n", sa.n)->capture_default_str();
  sweep->add_option("--trials", sa.trials)->capture_default_str();
  sweep->add_option("--seed", sa.seed)->capture_default_str();
  sweep->add_option("--ensemble", sa.ensemble, "complex-gaussian, real-symmetric or pm1")->capture_default_str();
  sweep->add_option("--threads", sa.threads)->capture_default_str();
  sweep->add_option("--tol", sa.tol)->capture_default_str();
  sweep->add_option("--max-iter", sa.max_iter)->capture_default_str();
  sweep->add_option("--out", sa.out, "Per-trial CSV");

  FactorizeArgs fa;
  auto* factorize = app.add_subcommand("factorize", "Tent-function weak factorization of a cube function");
  factorize->add_option("--input", fa.input, "Cube function JSON")->required();
  factorize->add_option("--kmax", fa.kmax)->capture_default_str();
  factorize->add_flag("--relaxed-margin", fa.relaxed, "Accept margins below 2 cells");
  factorize->add_option("--out", fa.out, "Write the factorization JSON");

  CertifyArgs ca;
  auto* certify = app.add_subcommand("certify", "E_eps lower-bound certificate sweep");
  certify->add_option("--kernel", ca.kernel)->required();
  certify->add_option("--domain", ca.domain)->required();
  certify->add_option("--xi", ca.xi, "Frequency (per-axis comma list)")->required();
  certify->add_option("--nu", ca.nu, "Decay direction (per-axis comma list)")->required();
  certify->add_option("--eps", ca.eps, "Comma list of eps values")->capture_default_str();
  certify->add_option("--spacing", ca.spacing)->capture_default_str();

  auto* demo = app.add_subcommand("demo", "Built-in demonstrations");
  demo->require_subcommand(1);
  std::string hsizes = "64,256,1024,4096";
  auto* hilbert = demo->add_subcommand("hilbert", "Hankel sections of 1/(n+m+1)");
  hilbert->add_option("--sizes", hsizes)->capture_default_str();

  SuiteArgs ua;
  auto* suite = app.add_subcommand("suite", "Run property suites");
  suite->add_option("--name", ua.name, "Suite name or 'all'")->capture_default_str();
  suite->add_option("--seed", ua.seed)->capture_default_str();
  suite->add_option("--count", ua.count, "Cases per suite; 0 uses the suite default")->capture_default_str();
  suite->add_option("--junit", ua.junit, "JUnit XML output path");
  suite->add_option("--out", ua.out, "Full JSON output path");
  auto* list = app.add_subcommand("list", "List suites and invariants");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::string command;
  try {
    if (*norm) {
      command = "norm";
      o = cmd_norm(na);
    } else if (*extend) {
      command = "extend";
      o = cmd_extend(ea);
    } else if (*sweep) {
      command = "sweep";
      o = cmd_sweep(sa);
    } else if (*factorize) {
      command = "factorize";
      o = cmd_factorize(fa);
    } else if (*certify) {
      command = "certify";
      o = cmd_certify(ca);
    } else if (*hilbert) {
      command = "demo hilbert";
      o = cmd_demo_hilbert(hsizes);
    } else if (*suite) {
      command = "suite";
      o = cmd_suite(ua);
    } else if (*list) {
      command = "list";
      Json suites = Json::array(), invariants = Json::array();
      for (const auto& s : suite_registry()) {
        suites.push_back({{"name", s.name}, {"description", s.description}, {"covers", s.covers},
                          {"default_count", s.default_count}});
      }
      for (const auto& inv : invariant_checklist()) {
        invariants.push_back({{"id", inv.id}, {"module", inv.module}, {"text", inv.text}});
      }
      o.result = {{"suites", suites}, {"invariants", invariants}};
    }
  } catch (const ResourceError& e) {
    err << "gdh: resource cap: " << e.what() << "\n";
    return kExitResource;
  } catch (const ParseError& e) {
    err << "gdh: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const PreconditionError& e) {
    err << "gdh: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const GeometryError& e) {
    err << "gdh: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const RangeError& e) {
    err << "gdh: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Json::exception& e) {
    err << "gdh: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::bad_alloc&) {
    err << "gdh: resource cap: out of memory\n";
    return kExitResource;
  } catch (const std::exception& e) {
    err << "gdh: " << e.what() << "\n";
    return kExitFailure;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const Json report{{"command", command},
                    {"digest", inputs_digest(o.inputs)},
                    {"seed", o.seed},
                    {"wall_s", wall},
                    {"version", kVersion},
                    {"result", o.result}};
  out << report.dump(2) << "\n";
  return o.code;
}

}  // namespace gdh
