#pragma once

#include <vector>

#include "qgraph/analytic.hpp"
#include "qgraph/effective_coupling.hpp"
#include "qgraph/graph_model.hpp"

namespace qgraph {

/// Homogeneous system for the resonance Ansatz. Columns: (c+_j, c-_j) for each
/// internal edge (psi_j = c+ e^{ikx} + c- e^{-ikx}), then c_m for each lead
/// (psi_m = c_m e^{ikx}). Rows: (U - I) Psi + i (U + I) Psi' = 0 with inward
/// derivatives. Throws std::domain_error for k = 0.
CMatrix secular_matrix(const GlobalCoupling& coupling, const std::vector<double>& lengths, Complex k);

struct SecularOptions {
  /// Exponent groups whose polynomial coefficients are all below this fraction
  /// of the largest coefficient are treated as identically zero.
  double structural_tolerance = 1e-9;
  /// Individual coefficients below this fraction are rounding noise.
  double coefficient_floor = 1e-13;
};

/// k -> det M(k) for a (gauged) coupling and edge lengths.
///
/// The determinant is multilinear in the columns, and every column is an
/// affine function of k times one of 1, e^{ikl_j}, e^{-ikl_j}. It is therefore
/// an exponential polynomial
///
///   det M(k) = sum_g C_g(k) exp(i k lambda_g),   lambda_g in {sum_j s_j l_j},
///
/// with polynomial C_g of degree <= 2N+M. The coefficients are computed once;
/// groups that vanish identically are dropped, which keeps evaluation accurate
/// far from the real axis where the direct determinant cancels
/// catastrophically. Immutable and safe to share between threads.
class SecularFunction {
 public:
  struct ExponentGroup {
    double exponent = 0.0;
    std::vector<Complex> coefficients;  // C_g(k) = sum_q coefficients[q] k^q
  };

  SecularFunction(GlobalCoupling coupling, std::vector<double> lengths, SecularOptions options = {});

  /// Applies the edge fluxes with gauge_transform before building.
  static SecularFunction from_graph(const MetricGraph& graph, SecularOptions options = {});

  const GlobalCoupling& coupling() const { return coupling_; }
  const std::vector<double>& lengths() const { return lengths_; }

  CMatrix matrix(Complex k) const { return secular_matrix(coupling_, lengths_, k); }

  /// Direct LU determinant of matrix(k).
  Complex determinant(Complex k) const;

  /// Expansion value, scaled; see AnalyticFunction for the anchor contract.
  ScaledValue evaluate(Complex k, Complex anchor) const;
  ScaledValue evaluate(Complex k) const { return evaluate(k, k); }

  const std::vector<ExponentGroup>& groups() const { return groups_; }
  double min_exponent() const;
  double max_exponent() const;
  double exponent_span() const { return max_exponent() - min_exponent(); }

  AnalyticFunction as_analytic() const;

 private:
  GlobalCoupling coupling_;
  std::vector<double> lengths_;
  std::vector<ExponentGroup> groups_;
};

Complex secular_det(const SecularFunction& fn, Complex k);

/// One-edge resonance function built from the effective coupling U~(k):
///
///   F = det{ 1/2[(U~-I) + k(U~+I)] P+ e^{ikl} + 1/2[(U~-I) - k(U~+I)] P- e^{-ikl}
///            + k(U~+I) [[i,0],[0,0]] + (U~-I) [[0,1],[0,0]] },
///
/// P+ = [[0,0],[-i,1]], P- = [[0,0],[i,1]]. Throws PreconditionError unless
/// N = 1 and NearPole close to the poles of U~.
Complex one_edge_F(const GlobalCoupling& coupling, double length, Complex k);

/// F(k) = plus e^{ikl} + constant + minus e^{-ikl}; the three coefficients at k.
struct OneEdgeTerms {
  Complex plus;
  Complex constant;
  Complex minus;
};
OneEdgeTerms one_edge_F_terms(const GlobalCoupling& coupling, Complex k);

}  // namespace qgraph
