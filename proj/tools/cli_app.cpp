#include "cli_app.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qgraph/asymptotics.hpp"
#include "qgraph/effective_coupling.hpp"
#include "qgraph/graph_io.hpp"
#include "qgraph/resonance_finder.hpp"
#include "qgraph/secular.hpp"

namespace qgraph::cli {

std::string format_fixed(double value) {
  char buf[64];
  if (std::abs(value) < 5e-7) value = 0.0;
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

namespace {

struct RunConfig {
  std::string input;
  std::optional<double> radius;
  std::vector<double> rect;
  std::optional<double> rmin, rmax;
  int steps = 8;
  std::size_t edge = 0;
  double phi_from = 0.0, phi_to = kPi;
  int sweep_steps = 9;
  double sweep_radius = 40.0;
  std::optional<double> tol_det;
  std::string out_path;
  unsigned threads = 1;
};

// Input problems (exit 2) that are not file or validation errors.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

MetricGraph load_valid(const std::string& path) {
  MetricGraph g = load_graph(path);
  const ValidationReport report = validate(g);
  if (!report.ok()) throw InvalidGraph(report);
  return g;
}

IdentityTestOptions identity_options(const RunConfig& cfg) {
  IdentityTestOptions opt;
  if (cfg.tol_det) opt.tolerance = *cfg.tol_det;
  return opt;
}

void cmd_classify(const RunConfig& cfg, std::ostream& out) {
  const MetricGraph g = load_valid(cfg.input);
  const GlobalCoupling u = gauge_transform(assemble_global(g), g);
  const auto opt = identity_options(cfg);
  const AsymptoticsClass c = classify_weyl(u, opt);
  out << "class=" << to_string(c.flag) << " V=" << format_fixed(total_internal_length(g))
      << " branch=" << to_string(c.witness);
  if (g.internal_count() == 1) out << " zero_size=" << (one_edge_zero_size(u, opt) ? "true" : "false");
  out << "\n";
}

void cmd_resonances(const RunConfig& cfg, std::ostream& out) {
  if (cfg.radius.has_value() == !cfg.rect.empty()) throw UsageError("give exactly one of --radius and --rect");
  Region region;
  if (cfg.radius) {
    if (!(*cfg.radius > 0.0)) throw UsageError("--radius must be positive");
    region = Disk{Complex(0.0, 0.0), *cfg.radius};
  } else {
    if (cfg.rect.size() != 4) throw UsageError("--rect expects re0,re1,im0,im1");
    const Rect r{Complex(cfg.rect[0], cfg.rect[2]), Complex(cfg.rect[1], cfg.rect[3])};
    if (!(r.hi.real() > r.lo.real()) || !(r.hi.imag() > r.lo.imag())) throw UsageError("--rect must have positive area");
    region = r;
  }
  const MetricGraph g = load_valid(cfg.input);
  FinderOptions opt;
  opt.threads = cfg.threads;
  const ResonanceSet set = find_resonances(SecularFunction::from_graph(g), region, opt);
  out << "re,im,multiplicity\n";
  for (const auto& r : set) out << format_fixed(r.k.real()) << "," << format_fixed(r.k.imag()) << "," << r.multiplicity << "\n";
}

void cmd_asymptotics(const RunConfig& cfg, std::ostream& out) {
  const MetricGraph g = load_valid(cfg.input);
  const auto [dlo, dhi] = default_radii(g);
  const double lo = cfg.rmin.value_or(dlo);
  const double hi = cfg.rmax.value_or(dhi);
  if (!(lo > 0.0) || !(hi > lo)) throw UsageError("radii must satisfy 0 < rmin < rmax");
  if (cfg.steps < 4) throw UsageError("--steps must be at least 4 for the fit");
  AsymptoticsOptions opt;
  opt.threads = cfg.threads;
  const AsymptoticsReport rep = report(g, lo, hi, cfg.steps, opt);
  out << "R,N\n";
  for (const auto& e : rep.ladder) out << format_fixed(e.radius) << "," << e.count << "\n";
  out << "# W=" << format_fixed(rep.effective_size) << " V=" << format_fixed(rep.total_length)
      << " ratio=" << format_fixed(rep.ratio) << " class=" << to_string(rep.classification.flag)
      << " consistent=" << (rep.consistent ? "true" : "false") << "\n";
  if (!rep.warning.empty()) out << "# warning: " << rep.warning << "\n";
}

void cmd_kill_flux(const RunConfig& cfg, std::ostream& out) {
  const MetricGraph g = load_valid(cfg.input);
  if (g.internal_count() != 1) throw PreconditionError("kill-flux requires exactly one internal edge");
  const GlobalCoupling u = gauge_transform(assemble_global(g), g);
  const KillFluxResult r = resonance_killing_flux(u, identity_options(cfg));
  if (r.status == KillFluxStatus::kOk)
    out << "phi=" << format_fixed(*r.flux) << "\n";
  else
    out << "not-applicable reason=" << to_string(r.status) << "\n";
}

void cmd_sweep_flux(const RunConfig& cfg, std::ostream& out) {
  MetricGraph g = load_valid(cfg.input);
  if (cfg.edge >= g.internal_count()) throw UsageError("--edge out of range");
  if (cfg.sweep_steps < 2) throw UsageError("--steps must be at least 2");
  if (!(cfg.sweep_radius > 0.0)) throw UsageError("--radius must be positive");
  AsymptoticsOptions opt;
  opt.threads = cfg.threads;
  out << "phi,count\n";
  for (int i = 0; i < cfg.sweep_steps; ++i) {
    const double phi = cfg.phi_from + (cfg.phi_to - cfg.phi_from) * i / (cfg.sweep_steps - 1);
    g.internal_edges[cfg.edge].flux = phi;
    out << format_fixed(phi) << "," << count_in_disk(SecularFunction::from_graph(g), cfg.sweep_radius, opt) << "\n";
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Resonances and Weyl asymptotics of magnetic quantum graphs", "qgraph"};
  app.require_subcommand(1);
  app.add_option("--out", cfg.out_path, "Write results to this file instead of stdout");
  app.add_option("--threads", cfg.threads, "Worker threads (results do not depend on it)")->check(CLI::Range(1u, 256u));
  app.add_option("--tol-det", cfg.tol_det, "Relative tolerance for identity-in-k tests")->check(CLI::PositiveNumber);

  auto* classify = app.add_subcommand("classify", "Weyl / non-Weyl classification");
  classify->add_option("file", cfg.input)->required();

  auto* res = app.add_subcommand("resonances", "Resonances in a disk or rectangle (CSV re,im,multiplicity)");
  res->add_option("file", cfg.input)->required();
  res->add_option("--radius", cfg.radius, "Disk |k| <= R");
  res->add_option("--rect", cfg.rect, "re0,re1,im0,im1")->delimiter(',')->expected(4);

  auto* asym = app.add_subcommand("asymptotics", "Counting ladder and effective size (CSV R,N)");
  asym->add_option("file", cfg.input)->required();
  asym->add_option("--rmin", cfg.rmin);
  asym->add_option("--rmax", cfg.rmax);
  asym->add_option("--steps", cfg.steps);

  auto* kill = app.add_subcommand("kill-flux", "Flux that leaves finitely many resonances (one edge)");
  kill->add_option("file", cfg.input)->required();

  auto* sweep = app.add_subcommand("sweep-flux", "Resonance count against the flux on one edge (CSV phi,count)");
  sweep->add_option("file", cfg.input)->required();
  sweep->add_option("--edge", cfg.edge, "Edge index, 0-based");
  sweep->add_option("--from", cfg.phi_from);
  sweep->add_option("--to", cfg.phi_to);
  sweep->add_option("--steps", cfg.sweep_steps);
  sweep->add_option("--radius", cfg.sweep_radius);

  for (auto* sub : {classify, res, asym, kill, sweep}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  std::ostringstream buffer;
  try {
    if (*classify)
      cmd_classify(cfg, buffer);
    else if (*res)
      cmd_resonances(cfg, buffer);
    else if (*asym)
      cmd_asymptotics(cfg, buffer);
    else if (*kill)
      cmd_kill_flux(cfg, buffer);
    else
      cmd_sweep_flux(cfg, buffer);
  } catch (const InvalidGraph& e) {
    err << "error: invalid graph\n" << e.report().summary() << "\n";
    return kInputError;
  } catch (const GraphFileError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kPreconditionViolation;
  } catch (const FinderError& e) {
    err << "error: root finding failed: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const NearPole& e) {
    err << "error: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  if (cfg.out_path.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(cfg.out_path);
    if (!(file << buffer.str())) {
      err << "error: cannot write " << cfg.out_path << "\n";
      return kInputError;
    }
  }
  return kOk;
}

}  // namespace qgraph::cli
