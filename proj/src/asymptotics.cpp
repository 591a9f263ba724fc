#include "qgraph/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qgraph {

namespace {

int origin_count(const AnalyticFunction& f, const AsymptoticsOptions& options) {
  FinderOptions inner = options.finder;
  inner.allow_origin = true;
  inner.boundary_threshold = 0.0;
  return winding_count(f, Disk{Complex(0.0, 0.0), options.origin_radius}, inner);
}

LadderEntry count_with(const AnalyticFunction& f, int at_origin, double radius, const AsymptoticsOptions& options) {
  if (!(radius > options.origin_radius)) throw std::invalid_argument("count_in_disk: radius must exceed the origin disk");
  FinderOptions outer = options.finder;
  outer.allow_origin = true;
  // Seeded by the radius so that dilation is reproducible.
  std::mt19937_64 rng(std::bit_cast<std::uint64_t>(radius));
  std::uniform_real_distribution<double> u(0.5, 1.5);
  double r = radius;
  for (int attempt = 0;; ++attempt) {
    try {
      return {r, winding_count(f, Disk{Complex(0.0, 0.0), r}, outer) - at_origin};
    } catch (const BoundaryZero&) {
      if (attempt >= options.dilation_retries) throw;
      r *= 1.0 + 1e-4 * u(rng);
    }
  }
}

}  // namespace

LadderEntry count_in_disk_entry(const SecularFunction& fn, double radius, const AsymptoticsOptions& options) {
  const AnalyticFunction f = fn.as_analytic();
  return count_with(f, origin_count(f, options), radius, options);
}

int count_in_disk(const SecularFunction& fn, double radius, const AsymptoticsOptions& options) {
  return count_in_disk_entry(fn, radius, options).count;
}

std::vector<LadderEntry> ladder(const SecularFunction& fn, double r_min, double r_max, int steps,
                                const AsymptoticsOptions& options) {
  if (!(r_min > 0.0) || !(r_max > r_min)) throw std::invalid_argument("ladder: need 0 < r_min < r_max");
  if (steps < 2) throw std::invalid_argument("ladder: need at least 2 steps");
  const AnalyticFunction f = fn.as_analytic();
  const int at_origin = origin_count(f, options);

  const auto n = static_cast<std::size_t>(steps);
  std::vector<LadderEntry> out(n);
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    const double r = r_min + (r_max - r_min) * static_cast<double>(i) / static_cast<double>(n - 1);
    try {
      out[i] = count_with(f, at_origin, r, options);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

EffectiveSizeFit fit_effective_size(const std::vector<LadderEntry>& entries) {
  if (entries.size() < 4) throw std::invalid_argument("fit_effective_size: need at least 4 ladder entries");
  const double n = static_cast<double>(entries.size());
  double mr = 0.0, mn = 0.0;
  for (const auto& e : entries) {
    mr += e.radius;
    mn += e.count;
  }
  mr /= n;
  mn /= n;
  double srr = 0.0, srn = 0.0;
  for (const auto& e : entries) {
    srr += (e.radius - mr) * (e.radius - mr);
    srn += (e.radius - mr) * (e.count - mn);
  }
  EffectiveSizeFit fit;
  fit.slope = srn / srr;
  fit.intercept = mn - fit.slope * mr;
  double sse = 0.0;
  double rmin = entries.front().radius, rmax = entries.front().radius;
  for (const auto& e : entries) {
    const double d = e.count - (fit.intercept + fit.slope * e.radius);
    sse += d * d;
    fit.residual = std::max(fit.residual, std::abs(d));
    rmin = std::min(rmin, e.radius);
    rmax = std::max(rmax, e.radius);
  }
  const double se = std::sqrt(sse / (n - 2.0) / srr);
  fit.effective_size = 0.5 * kPi * fit.slope;
  fit.uncertainty = 0.5 * kPi * std::max(se, 1.0 / (rmax - rmin));
  return fit;
}

std::pair<double, double> default_radii(const MetricGraph& graph) {
  const auto lengths = graph.lengths();
  const double lmin = *std::min_element(lengths.begin(), lengths.end());
  return {50.0 / lmin, 400.0 / lmin};
}

AsymptoticsReport report(const MetricGraph& graph, double r_min, double r_max, int steps,
                         const AsymptoticsOptions& options) {
  const ValidationReport v = validate(graph);
  if (!v.ok()) throw InvalidGraph(v);
  const GlobalCoupling gauged = gauge_transform(assemble_global(graph), graph);
  const SecularFunction fn(gauged, graph.lengths());

  AsymptoticsReport rep;
  rep.classification = classify_weyl(gauged);
  rep.ladder = ladder(fn, r_min, r_max, steps, options);
  rep.fit = fit_effective_size(rep.ladder);
  rep.total_length = total_internal_length(graph);

  const double w = rep.fit.effective_size;
  const double tol = rep.fit.uncertainty;
  rep.effective_size = (w < 0.0 && w >= -tol) ? 0.0 : w;
  rep.ratio = rep.effective_size / rep.total_length;
  for (std::size_t i = 1; i < rep.ladder.size(); ++i)
    if (rep.ladder[i].count < rep.ladder[i - 1].count) rep.monotone = false;

  std::ostringstream warn;
  if (rep.classification.non_weyl()) {
    rep.consistent = w < rep.total_length - 3.0 * tol;
    if (!rep.consistent) warn << "non-Weyl class but fitted size is not below the total length";
  } else {
    rep.consistent = std::abs(w - rep.total_length) <= 3.0 * tol;
    if (!rep.consistent) warn << "Weyl class but fitted size differs from the total length";
  }
  if (w < -tol || w > rep.total_length + 3.0 * tol) {
    rep.consistent = false;
    if (warn.tellp() > 0) warn << "; ";
    warn << "fitted size outside [0, V]";
  }
  if (!rep.monotone) {
    rep.consistent = false;
    if (warn.tellp() > 0) warn << "; ";
    warn << "counts decrease along the ladder";
  }
  rep.warning = warn.str();
  return rep;
}

}  // namespace qgraph
