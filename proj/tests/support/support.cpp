#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qgraph::testing {

MetricGraph lasso(double phi, double length) {
  MetricGraph g;
  g.vertices.push_back({"v", Kirchhoff{}});
  g.internal_edges.push_back({"v", "v", length, phi});
  g.leads = {{"v"}, {"v"}};
  return g;
}

MetricGraph loop_one_lead(double length) {
  MetricGraph g;
  g.vertices.push_back({"v", Kirchhoff{}});
  g.internal_edges.push_back({"v", "v", length, 0.0});
  g.leads = {{"v"}};
  return g;
}

MetricGraph two_edge_graph() {
  MetricGraph g;
  g.vertices = {{"a", Kirchhoff{}}, {"b", Kirchhoff{}}};
  g.internal_edges = {{"a", "b", 1.0, 0.0}, {"a", "b", 1.5, 0.0}};
  g.leads = {{"a"}, {"b"}};
  return g;
}

namespace {

CMatrix gaussian(std::size_t n, Rng& rng) {
  std::normal_distribution<double> nd;
  const auto d = static_cast<Eigen::Index>(n);
  CMatrix z(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = Complex(nd(rng), nd(rng));
  return z;
}

}  // namespace

CMatrix random_unitary(std::size_t n, Rng& rng) {
  const CMatrix z = gaussian(n, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  const CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  CVector phases(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) phases(i) = r(i, i) / std::abs(r(i, i));
  return q * phases.asDiagonal();
}

CMatrix random_symmetric_unitary(std::size_t n, Rng& rng) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  const auto d = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = nd(rng);
  const Eigen::MatrixXd o = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
  CVector diag(d);
  for (Eigen::Index i = 0; i < d; ++i) diag(i) = std::polar(1.0, angle(rng));
  const CMatrix oc = o.cast<Complex>();
  CMatrix u = oc * diag.asDiagonal() * oc.transpose();
  return 0.5 * (u + u.transpose());
}

MetricGraph random_graph(Rng& rng, const RandomGraphOptions& options) {
  std::uniform_int_distribution<std::size_t> n_dist(1, options.max_internal);
  std::uniform_int_distribution<std::size_t> m_dist(1, options.max_leads);
  std::uniform_real_distribution<double> len(0.5, 2.0);
  std::uniform_real_distribution<double> flux(-kPi, kPi);
  std::uniform_real_distribution<double> alpha(-2.0, 2.0);
  std::uniform_int_distribution<int> coin(0, 2);

  const std::size_t n = n_dist(rng);
  const std::size_t m = m_dist(rng);
  MetricGraph g;
  auto edge_flux = [&] { return options.symmetric ? 0.0 : flux(rng); };

  if (coin(rng) == 0) {
    g.vertices.push_back({"v", Custom{options.symmetric ? random_symmetric_unitary(2 * n + m, rng)
                                                         : random_unitary(2 * n + m, rng)}});
    for (std::size_t j = 0; j < n; ++j) g.internal_edges.push_back({"v", "v", len(rng), edge_flux()});
    for (std::size_t j = 0; j < m; ++j) g.leads.push_back({"v"});
    return g;
  }

  std::uniform_int_distribution<std::size_t> v_dist(1, n + 1);
  const std::size_t nv = v_dist(rng);
  for (std::size_t v = 0; v < nv; ++v) g.vertices.push_back({"v" + std::to_string(v), Kirchhoff{}});
  std::uniform_int_distribution<std::size_t> pick(0, nv - 1);
  for (std::size_t j = 0; j < n; ++j) {
    // The first nv - 1 edges form a path so no vertex is isolated.
    const std::size_t a = j + 1 < nv ? j : pick(rng);
    const std::size_t b = j + 1 < nv ? j + 1 : pick(rng);
    g.internal_edges.push_back({g.vertices[a].id, g.vertices[b].id, len(rng), edge_flux()});
  }
  for (std::size_t j = 0; j < m; ++j) g.leads.push_back({g.vertices[pick(rng)].id});

  for (std::size_t v = 0; v < nv; ++v) {
    const std::size_t degree = local_order(g, v).size();
    switch (options.custom_only ? 2 : coin(rng)) {
      case 0:
        g.vertices[v].coupling = Kirchhoff{};
        break;
      case 1:
        g.vertices[v].coupling = Delta{alpha(rng)};
        break;
      default:
        g.vertices[v].coupling =
            Custom{options.symmetric ? random_symmetric_unitary(degree, rng) : random_unitary(degree, rng)};
    }
  }
  return g;
}

CMatrix random_block(std::size_t n, Rng& rng) { return random_unitary(n, rng); }

AnalyticFunction polynomial(std::vector<Complex> roots) {
  const double degree = static_cast<double>(roots.size());
  return AnalyticFunction{[roots = std::move(roots), degree](Complex z, Complex anchor) {
                            // Normalised by (1 + |anchor|)^degree, frozen at the anchor.
                            const double s = 1.0 + std::abs(anchor);
                            Complex p = 1.0;
                            for (const Complex& r : roots) p *= (z - r) / s;
                            return ScaledValue{p, Complex(degree * std::log(s), 0.0)};
                          },
                          0.0};
}

double match_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const Complex& x : a) {
    auto best = std::min_element(b.begin(), b.end(),
                                 [&](const Complex& p, const Complex& q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*best - x));
    b.erase(best);
  }
  return worst;
}

std::vector<Complex> expand(const ResonanceSet& set) {
  std::vector<Complex> out;
  for (const auto& r : set)
    for (int i = 0; i < r.multiplicity; ++i) out.push_back(r.k);
  return out;
}

std::vector<Complex> lasso_zeros(double phi, double length, double radius) {
  // -i k l = log(cos phi) + 2 pi i n.
  const double c = std::cos(phi);
  std::vector<Complex> out;
  if (std::abs(c) < 1e-15) return out;
  const double im = std::log(std::abs(c)) / length;
  const double re0 = -std::arg(Complex(c, 0.0)) / length;
  const double step = 2.0 * kPi / length;
  const auto nmax = static_cast<long>(std::ceil(radius / step)) + 1;
  for (long n = -nmax; n <= nmax; ++n) {
    const Complex k(re0 + step * static_cast<double>(n), im);
    if (std::abs(k) > 1e-3 && std::abs(k) <= radius) out.push_back(k);
  }
  return out;
}

}  // namespace qgraph::testing
