#include "qgraph/secular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qgraph {

namespace {

constexpr std::size_t kMaxExpandedEdges = 8;

void check_lengths(const GlobalCoupling& coupling, const std::vector<double>& lengths) {
  if (lengths.size() != coupling.internal_count())
    throw std::invalid_argument("secular: one length per internal edge required");
  for (double l : lengths)
    if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("secular: lengths must be positive and finite");
}

// Column building blocks (U - I) e_c and (U + I) e_c.
struct ColumnBasis {
  CMatrix minus;  // U - I
  CMatrix plus;   // U + I

  explicit ColumnBasis(const CMatrix& u)
      : minus(u - CMatrix::Identity(u.rows(), u.cols())), plus(u + CMatrix::Identity(u.rows(), u.cols())) {}

  // Column for a unit amplitude whose value at endpoint c is 1 and whose
  // inward derivative is i k sign.
  CVector column(Eigen::Index c, double sign, Complex k) const {
    return minus.col(c) - sign * k * plus.col(c);
  }
};

}  // namespace

CMatrix secular_matrix(const GlobalCoupling& coupling, const std::vector<double>& lengths, Complex k) {
  check_lengths(coupling, lengths);
  if (k == Complex(0.0, 0.0)) throw std::domain_error("secular_matrix: k = 0 is excluded");
  const ColumnBasis basis(coupling.matrix());
  const auto n = static_cast<Eigen::Index>(coupling.internal_count());
  const auto dim = static_cast<Eigen::Index>(coupling.dim());
  CMatrix m(dim, dim);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex e = std::exp(Complex(0.0, 1.0) * k * lengths[static_cast<std::size_t>(j)]);
    // psi'(0) = ik(c+ - c-), inward derivative at the end is -psi'(l).
    m.col(2 * j) = basis.column(2 * j, 1.0, k) + e * basis.column(2 * j + 1, -1.0, k);
    m.col(2 * j + 1) = basis.column(2 * j, -1.0, k) + (1.0 / e) * basis.column(2 * j + 1, 1.0, k);
  }
  for (Eigen::Index c = 2 * n; c < dim; ++c) m.col(c) = basis.column(c, 1.0, k);
  return m;
}

SecularFunction::SecularFunction(GlobalCoupling coupling, std::vector<double> lengths, SecularOptions options)
    : coupling_(std::move(coupling)), lengths_(std::move(lengths)) {
  check_lengths(coupling_, lengths_);
  const std::size_t n = coupling_.internal_count();
  if (n > kMaxExpandedEdges) throw std::invalid_argument("SecularFunction: too many internal edges to expand");

  const ColumnBasis basis(coupling_.matrix());
  const auto dim = static_cast<Eigen::Index>(coupling_.dim());
  const std::size_t degree = coupling_.dim();
  const std::size_t npts = degree + 1;
  const double total = std::accumulate(lengths_.begin(), lengths_.end(), 0.0);
  const double merge = 1e-12 * (1.0 + total);

  // Per edge: (plus column uses end?, minus column uses end?, exponent sign).
  struct Choice {
    bool plus_end;
    bool minus_end;
    int sign;
  };
  static constexpr Choice kChoices[4] = {{false, false, 0}, {true, false, 1}, {false, true, -1}, {true, true, 0}};

  std::vector<double> exponents;
  std::vector<std::vector<Complex>> values;  // per group, samples at unit roots
  auto group_of = [&](double lambda) {
    for (std::size_t g = 0; g < exponents.size(); ++g)
      if (std::abs(exponents[g] - lambda) <= merge) return g;
    exponents.push_back(lambda);
    values.emplace_back(npts, Complex(0.0, 0.0));
    return exponents.size() - 1;
  };

  std::size_t combos = 1;
  for (std::size_t j = 0; j < n; ++j) combos *= 4;

  std::vector<Complex> nodes(npts);
  for (std::size_t p = 0; p < npts; ++p)
    nodes[p] = std::polar(1.0, 2.0 * kPi * static_cast<double>(p) / static_cast<double>(npts));

  CMatrix m(dim, dim);
  for (std::size_t combo = 0; combo < combos; ++combo) {
    double lambda = 0.0;
    std::size_t code = combo;
    std::vector<Choice> picks(n);
    for (std::size_t j = 0; j < n; ++j) {
      picks[j] = kChoices[code % 4];
      code /= 4;
      lambda += picks[j].sign * lengths_[j];
    }
    const std::size_t g = group_of(lambda);
    for (std::size_t p = 0; p < npts; ++p) {
      const Complex k = nodes[p];
      for (std::size_t j = 0; j < n; ++j) {
        const auto s = static_cast<Eigen::Index>(2 * j);
        m.col(s) = picks[j].plus_end ? basis.column(s + 1, -1.0, k) : basis.column(s, 1.0, k);
        m.col(s + 1) = picks[j].minus_end ? basis.column(s + 1, 1.0, k) : basis.column(s, -1.0, k);
      }
      for (Eigen::Index c = static_cast<Eigen::Index>(2 * n); c < dim; ++c) m.col(c) = basis.column(c, 1.0, k);
      values[g][p] += m.partialPivLu().determinant();
    }
  }

  // Interpolate each group's polynomial from its values at the roots of unity.
  double cmax = 0.0;
  std::vector<ExponentGroup> raw;
  for (std::size_t g = 0; g < exponents.size(); ++g) {
    ExponentGroup grp{exponents[g], std::vector<Complex>(npts)};
    for (std::size_t q = 0; q < npts; ++q) {
      Complex acc = 0.0;
      for (std::size_t p = 0; p < npts; ++p) acc += values[g][p] * std::conj(std::pow(nodes[p], static_cast<int>(q)));
      grp.coefficients[q] = acc / static_cast<double>(npts);
      cmax = std::max(cmax, std::abs(grp.coefficients[q]));
    }
    raw.push_back(std::move(grp));
  }
  for (auto& grp : raw) {
    double gmax = 0.0;
    for (auto& c : grp.coefficients) {
      if (std::abs(c) < options.coefficient_floor * cmax) c = 0.0;
      gmax = std::max(gmax, std::abs(c));
    }
    if (gmax >= options.structural_tolerance * cmax && gmax > 0.0) {
      while (!grp.coefficients.empty() && grp.coefficients.back() == Complex(0.0, 0.0)) grp.coefficients.pop_back();
      groups_.push_back(std::move(grp));
    }
  }
  std::sort(groups_.begin(), groups_.end(),
            [](const ExponentGroup& a, const ExponentGroup& b) { return a.exponent < b.exponent; });
}

SecularFunction SecularFunction::from_graph(const MetricGraph& graph, SecularOptions options) {
  return SecularFunction(gauge_transform(assemble_global(graph), graph), graph.lengths(), options);
}

Complex SecularFunction::determinant(Complex k) const { return matrix(k).partialPivLu().determinant(); }

double SecularFunction::min_exponent() const { return groups_.empty() ? 0.0 : groups_.front().exponent; }
double SecularFunction::max_exponent() const { return groups_.empty() ? 0.0 : groups_.back().exponent; }

ScaledValue SecularFunction::evaluate(Complex k, Complex anchor) const {
  if (groups_.empty()) return {};
  // Dominant exponential at the anchor: maximise Re(i a lambda) = -Im(a) lambda.
  const double lead = anchor.imag() <= 0.0 ? max_exponent() : min_exponent();
  const double ra = std::abs(anchor);

  double scale = 0.0;
  Complex sum = 0.0;
  for (const auto& g : groups_) {
    double abs_poly = 0.0;
    Complex poly = 0.0;
    for (auto it = g.coefficients.rbegin(); it != g.coefficients.rend(); ++it) {
      abs_poly = abs_poly * ra + std::abs(*it);
      poly = poly * k + *it;
    }
    const double shift = g.exponent - lead;
    scale += abs_poly * std::exp(-anchor.imag() * shift);
    sum += poly * std::exp(Complex(0.0, 1.0) * k * shift);
  }
  if (scale == 0.0) return {};
  return ScaledValue{sum / scale, Complex(0.0, 1.0) * k * lead + std::log(scale)};
}

AnalyticFunction SecularFunction::as_analytic() const {
  return AnalyticFunction{[self = *this](Complex z, Complex anchor) { return self.evaluate(z, anchor); },
                          exponent_span() + 1.0};
}

Complex secular_det(const SecularFunction& fn, Complex k) { return fn.determinant(k); }

namespace {

CMatrix one_edge_matrix(const CMatrix& ut, Complex k, Complex e) {
  const Complex i(0.0, 1.0);
  const CMatrix id = CMatrix::Identity(2, 2);
  CMatrix p_plus(2, 2), p_minus(2, 2), d0(2, 2), n0(2, 2);
  p_plus << 0.0, 0.0, -i, 1.0;
  p_minus << 0.0, 0.0, i, 1.0;
  d0 << i, 0.0, 0.0, 0.0;
  n0 << 0.0, 1.0, 0.0, 0.0;
  const CMatrix um = ut - id;
  const CMatrix up = ut + id;
  return 0.5 * (um + k * up) * p_plus * e + 0.5 * (um - k * up) * p_minus / e + k * up * d0 + um * n0;
}

CMatrix one_edge_effective(const GlobalCoupling& coupling, Complex k) {
  if (coupling.internal_count() != 1) throw PreconditionError("one-edge resonance function requires N = 1");
  return effective_at(coupling, k);
}

}  // namespace

Complex one_edge_F(const GlobalCoupling& coupling, double length, Complex k) {
  const CMatrix ut = one_edge_effective(coupling, k);
  return one_edge_matrix(ut, k, std::exp(Complex(0.0, 1.0) * k * length)).determinant();
}

OneEdgeTerms one_edge_F_terms(const GlobalCoupling& coupling, Complex k) {
  // F(z) = plus z + constant + minus / z with z standing in for e^{ikl}.
  const CMatrix ut = one_edge_effective(coupling, k);
  const Complex i(0.0, 1.0);
  const Complex f1 = one_edge_matrix(ut, k, 1.0).determinant();
  const Complex fm = one_edge_matrix(ut, k, -1.0).determinant();
  const Complex fi = one_edge_matrix(ut, k, i).determinant();
  const Complex constant = 0.5 * (f1 + fm);
  const Complex s = 0.5 * (f1 - fm);
  const Complex d = -i * (fi - constant);
  return {0.5 * (s + d), constant, 0.5 * (s - d)};
}

}  // namespace qgraph
