#include "qgraph/resonance_finder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace qgraph {

BoundaryZero::BoundaryZero(Complex where)
    : FinderError([&] {
        std::ostringstream os;
        os << "function vanishes on the contour near k = " << where;
        return os.str();
      }()),
      where_(where) {}

std::string describe(const Region& region) {
  std::ostringstream os;
  if (const auto* r = std::get_if<Rect>(&region))
    os << "rect [" << r->lo.real() << ", " << r->hi.real() << "] x [" << r->lo.imag() << ", " << r->hi.imag() << "]";
  else {
    const auto& d = std::get<Disk>(region);
    os << "disk center " << d.center << " radius " << d.radius;
  }
  return os.str();
}

namespace {

constexpr double kMaxLogStep = 1.0;

double wrap(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

// Closed curve z(t), t in [0, 1].
struct Contour {
  std::function<Complex(double)> point;
  double length;
};

Contour contour_of(const Region& region) {
  if (const auto* r = std::get_if<Rect>(&region)) {
    const Complex a = r->lo;
    const Complex b(r->hi.real(), r->lo.imag());
    const Complex c = r->hi;
    const Complex d(r->lo.real(), r->hi.imag());
    const double w = r->hi.real() - r->lo.real();
    const double h = r->hi.imag() - r->lo.imag();
    const double perimeter = 2.0 * (w + h);
    return {[=](double t) {
              double s = t * perimeter;
              if (s <= w) return a + (b - a) * (s / w);
              s -= w;
              if (s <= h) return b + (c - b) * (s / h);
              s -= h;
              if (s <= w) return c + (d - c) * (s / w);
              s -= w;
              return d + (a - d) * std::min(1.0, s / h);
            },
            perimeter};
  }
  const auto disk = std::get<Disk>(region);
  return {[=](double t) { return disk.center + std::polar(disk.radius, 2.0 * kPi * t); }, 2.0 * kPi * disk.radius};
}

void check_region(const Region& region, const FinderOptions& opt) {
  if (const auto* r = std::get_if<Rect>(&region)) {
    if (!(r->hi.real() > r->lo.real()) || !(r->hi.imag() > r->lo.imag()))
      throw std::invalid_argument("region must have positive area: " + describe(region));
    if (!opt.allow_origin) {
      const double dx = std::max({r->lo.real(), -r->hi.real(), 0.0});
      const double dy = std::max({r->lo.imag(), -r->hi.imag(), 0.0});
      if (std::hypot(dx, dy) < opt.origin_margin)
        throw std::invalid_argument("region reaches k = 0: " + describe(region));
    }
  } else {
    const auto& d = std::get<Disk>(region);
    if (!(d.radius > 0.0)) throw std::invalid_argument("region must have positive area: " + describe(region));
    if (!opt.allow_origin && std::abs(d.center) < d.radius + opt.origin_margin)
      throw std::invalid_argument("region reaches k = 0: " + describe(region));
  }
}

int winding_unchecked(const AnalyticFunction& fn, const Region& region, const FinderOptions& opt) {
  const Contour contour = contour_of(region);
  const double seeded = contour.length * (1.0 + fn.oscillation_rate) * opt.samples_per_length;
  const std::size_t n0 = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(seeded)), opt.min_samples,
                                                 opt.max_samples);
  std::size_t used = n0;

  // Phase and |f'/f| at a contour point. A segment is accepted when the phase
  // step is below pi/2 and its length times |f'/f| at both ends is at most
  // kMaxLogStep; the second test keeps the step below the distance to nearby
  // zeros, where a phase step alone can alias a full turn.
  struct Sample {
    double t;
    Complex z;
    double phase;
    double rate;
  };
  auto sample_at = [&](double t) {
    const Complex z = contour.point(t);
    const ScaledValue v = fn(z);
    const double mag = std::abs(v.mantissa);
    if (!(mag > opt.boundary_threshold) || !std::isfinite(mag)) throw BoundaryZero(z);
    const double delta = 1e-7 * (1.0 + std::abs(z));
    const Complex ahead = fn.eval(z + delta, z).relative_to(v.log_scale);
    const double rate = std::abs(ahead - v.mantissa) / (delta * mag);
    return Sample{t, z, v.phase(), std::isfinite(rate) ? rate : std::numeric_limits<double>::infinity()};
  };

  double total = 0.0;
  std::vector<std::pair<Sample, Sample>> stack;
  const Sample first = sample_at(0.0);
  Sample prev = first;
  for (std::size_t i = 1; i <= n0; ++i) {
    Sample next = i == n0 ? first : sample_at(static_cast<double>(i) / static_cast<double>(n0));
    if (i == n0) next.t = 1.0;
    stack.emplace_back(prev, next);
    while (!stack.empty()) {
      const auto [a, b] = stack.back();
      stack.pop_back();
      const double d = wrap(b.phase - a.phase);
      const double step = std::abs(b.z - a.z) * std::max(a.rate, b.rate);
      if (std::abs(d) < 0.5 * kPi && step <= kMaxLogStep) {
        total += d;
        continue;
      }
      if (++used > opt.max_samples) throw StepCapExceeded("winding: sample cap exceeded on " + describe(region));
      const Sample m = sample_at(0.5 * (a.t + b.t));
      stack.emplace_back(m, b);
      stack.emplace_back(a, m);
    }
    prev = next;
  }
  const double turns = total / (2.0 * kPi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.25) throw FinderError("winding: non-integral phase change on " + describe(region));
  return static_cast<int>(rounded);
}

struct NewtonResult {
  Complex z;
  bool converged = false;
};

// Multiplicity-weighted Newton; the derivative is a central difference whose
// step starts at 1e-6 (1 + |z|) and follows the Newton step downwards.
NewtonResult newton(const AnalyticFunction& fn, Complex z, int multiplicity, const FinderOptions& opt) {
  double h = 1e-6 * (1.0 + std::abs(z));
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.newton_iterations; ++it) {
    const ScaledValue f0 = fn.eval(z, z);
    if (f0.mantissa == Complex(0.0, 0.0)) return {z, true};
    const Complex fp = fn.eval(z + h, z).relative_to(f0.log_scale);
    const Complex fm = fn.eval(z - h, z).relative_to(f0.log_scale);
    const Complex deriv = (fp - fm) / (2.0 * h);
    if (deriv == Complex(0.0, 0.0) || !std::isfinite(std::abs(deriv))) break;
    const Complex step = static_cast<double>(multiplicity) * f0.mantissa / deriv;
    if (!std::isfinite(std::abs(step))) break;
    z -= step;
    last = std::abs(step);
    const double scale = 1.0 + std::abs(z);
    if (last <= 1e-14 * scale) return {z, true};
    h = std::clamp(last, 1e-12 * scale, 1e-6 * scale);
  }
  return {z, last <= 1e-9 * (1.0 + std::abs(z))};
}

struct Cell {
  Rect rect;
  int count;
};

// Split fractions tried in turn when a cut passes through a zero.
constexpr double kSplits[][2] = {{0.5, 0.5},       {0.4817, 0.5213}, {0.5379, 0.4631}, {0.4561, 0.4729},
                                 {0.5443, 0.5557}, {0.4123, 0.5891}, {0.5907, 0.4177}, {0.3719, 0.6283}};

// Empty when every cut meets a zero or the child counts disagree with the parent.
std::vector<Cell> split(const AnalyticFunction& fn, const Cell& cell, const FinderOptions& opt) {
  const Rect& r = cell.rect;
  for (const auto& f : kSplits) {
    const double xm = r.lo.real() + f[0] * (r.hi.real() - r.lo.real());
    const double ym = r.lo.imag() + f[1] * (r.hi.imag() - r.lo.imag());
    const Rect quads[4] = {Rect{r.lo, Complex(xm, ym)}, Rect{Complex(xm, r.lo.imag()), Complex(r.hi.real(), ym)},
                           Rect{Complex(r.lo.real(), ym), Complex(xm, r.hi.imag())}, Rect{Complex(xm, ym), r.hi}};
    try {
      std::vector<Cell> out;
      int total = 0;
      for (const Rect& q : quads) {
        const int c = winding_unchecked(fn, q, opt);
        total += c;
        out.push_back({q, c});
      }
      if (total == cell.count) return out;
    } catch (const BoundaryZero&) {
    }
  }
  return {};
}

bool holds_origin(const Rect& r) { return r.contains(Complex(0.0, 0.0)); }

void process(const AnalyticFunction& fn, Cell root, const FinderOptions& opt, std::vector<Root>& out) {
  std::vector<Cell> stack{root};
  while (!stack.empty()) {
    const Cell cell = stack.back();
    stack.pop_back();
    if (cell.count <= 0) continue;
    const Complex c = cell.rect.center();
    const double diam = cell.rect.diameter();

    if (opt.allow_origin && holds_origin(cell.rect) && diam < opt.origin_margin) {
      out.push_back({Complex(0.0, 0.0), cell.count, true});
      continue;
    }
    if (cell.count == 1) {
      const NewtonResult nr = newton(fn, c, 1, opt);
      if (nr.converged && cell.rect.contains(nr.z)) {
        out.push_back({nr.z, 1, true});
        continue;
      }
    }
    if (diam < opt.cell_factor * (1.0 + std::abs(c))) {
      const NewtonResult nr = newton(fn, c, cell.count, opt);
      const bool ok = nr.converged && std::abs(nr.z - c) <= diam;
      out.push_back({ok ? nr.z : c, cell.count, ok});
      continue;
    }
    auto children = split(fn, cell, opt);
    if (children.empty()) {
      // A tight cluster keeps |f| below the contour threshold on every cut;
      // its total count is known, so polish it as one multiple zero. A
      // cluster around k = 0 is the high-order zero there.
      if (opt.allow_origin && holds_origin(cell.rect)) {
        out.push_back({Complex(0.0, 0.0), cell.count, true});
        continue;
      }
      const NewtonResult nr = newton(fn, c, cell.count, opt);
      if (!nr.converged || !cell.rect.contains(nr.z))
        throw FinderError("localize: could not split " + describe(cell.rect) + " consistently");
      out.push_back({nr.z, cell.count, true});
      continue;
    }
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
  }
}

ResonanceSet merge_sorted(std::vector<Root> roots, const FinderOptions& opt) {
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
    return a.k.real() < b.k.real() || (a.k.real() == b.k.real() && a.k.imag() < b.k.imag());
  });
  ResonanceSet merged;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    Root acc = roots[i];
    Complex weighted = acc.k * static_cast<double>(acc.multiplicity);
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (used[j]) continue;
      const double radius = opt.merge_factor * (1.0 + std::abs(acc.k));
      if (roots[j].k.real() - acc.k.real() > radius) break;
      if (std::abs(roots[j].k - acc.k) <= radius) {
        used[j] = true;
        weighted += roots[j].k * static_cast<double>(roots[j].multiplicity);
        acc.multiplicity += roots[j].multiplicity;
        acc.converged = acc.converged && roots[j].converged;
      }
    }
    acc.k = weighted / static_cast<double>(acc.multiplicity);
    merged.push_back(acc);
  }
  // Snap near-duplicate real parts so the (Re, Im) order is stable.
  std::stable_sort(merged.begin(), merged.end(), [](const Root& a, const Root& b) {
    const double tol = 1e-9 * (1.0 + std::max(std::abs(a.k), std::abs(b.k)));
    if (std::abs(a.k.real() - b.k.real()) > tol) return a.k.real() < b.k.real();
    return a.k.imag() < b.k.imag();
  });
  return merged;
}

Rect bounding_square(const Disk& d) {
  const Complex half(d.radius, d.radius);
  return Rect{d.center - half, d.center + half};
}

}  // namespace

int winding_count(const AnalyticFunction& fn, const Region& region, const FinderOptions& options) {
  check_region(region, options);
  return winding_unchecked(fn, region, options);
}

ResonanceSet localize(const AnalyticFunction& fn, const Region& region, const FinderOptions& options) {
  check_region(region, options);
  if (const auto* disk = std::get_if<Disk>(&region)) {
    const int expected = winding_unchecked(fn, region, options);
    ResonanceSet inside;
    Rect square = bounding_square(*disk);
    // The square's own contour may hit a zero; grow it slightly in that case.
    for (int attempt = 0;; ++attempt) {
      try {
        ResonanceSet all = localize(fn, Region{square}, options);
        for (const auto& r : all)
          if (std::abs(r.k - disk->center) < disk->radius) inside.push_back(r);
        break;
      } catch (const BoundaryZero&) {
        if (attempt >= 8) throw;
        const Complex grow(disk->radius * 1e-3 * (attempt + 1), disk->radius * 1.3e-3 * (attempt + 1));
        square = Rect{square.lo - grow, square.hi + grow};
      }
    }
    int total = 0;
    for (const auto& r : inside) total += r.multiplicity;
    if (total != expected) throw FinderError("localize: disk count mismatch on " + describe(region));
    return inside;
  }

  const Rect rect = std::get<Rect>(region);
  const int count = winding_unchecked(fn, region, options);

  // Expand breadth-first into independent work cells; the expansion does not
  // depend on the thread count, so results are identical for any pool size.
  std::vector<Cell> work{{rect, count}};
  const std::size_t target = 16;
  for (int level = 0; level < 3 && work.size() < target; ++level) {
    std::vector<Cell> next;
    bool expanded = false;
    for (const Cell& cell : work) {
      if (cell.count >= 2 && cell.rect.diameter() > 1e3 * options.cell_factor * (1.0 + std::abs(cell.rect.center())) &&
          !(options.allow_origin && holds_origin(cell.rect) && cell.rect.diameter() < options.origin_margin)) {
        const auto children = split(fn, cell, options);
        if (children.empty()) {
          next.push_back(cell);
          continue;
        }
        for (const Cell& child : children)
          if (child.count > 0) next.push_back(child);
        expanded = true;
      } else if (cell.count > 0) {
        next.push_back(cell);
      }
    }
    work = std::move(next);
    if (!expanded) break;
  }

  std::vector<std::vector<Root>> results(work.size());
  std::vector<std::exception_ptr> errors(work.size());
  auto run = [&](std::size_t i) {
    try {
      process(fn, work[i], options, results[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(work.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < work.size(); ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < work.size(); i = next++) run(i);
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<Root> roots;
  for (auto& r : results) roots.insert(roots.end(), r.begin(), r.end());
  return merge_sorted(std::move(roots), options);
}

ResonanceSet find_resonances(const SecularFunction& fn, const Region& region, FinderOptions options) {
  options.allow_origin = true;
  const AnalyticFunction f = fn.as_analytic();
  Region current = region;
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> jitter(0.5, 1.5);
  for (int attempt = 0;; ++attempt) {
    try {
      ResonanceSet all = localize(f, current, options);
      ResonanceSet out;
      for (const auto& r : all)
        if (std::abs(r.k) >= options.origin_margin) out.push_back(r);
      return out;
    } catch (const BoundaryZero&) {
      auto* disk = std::get_if<Disk>(&current);
      if (!disk || attempt >= 8) throw;
      disk->radius *= 1.0 + 1e-4 * jitter(rng);
    }
  }
}

}  // namespace qgraph
