#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qgraph/analytic.hpp"
#include "qgraph/effective_coupling.hpp"
#include "qgraph/graph_model.hpp"
#include "qgraph/resonance_finder.hpp"

namespace qgraph::testing {

using Rng = std::mt19937_64;

// One vertex, one loop of length l with flux phi, two leads, Kirchhoff.
MetricGraph lasso(double phi = 0.0, double length = 1.0);

// One vertex, one loop, one lead, Kirchhoff (degree 3).
MetricGraph loop_one_lead(double length = 1.0);

// Two vertices joined by two edges, one lead on each vertex.
MetricGraph two_edge_graph();

// Haar-ish random unitary: QR of a complex Gaussian with phase-fixed R.
CMatrix random_unitary(std::size_t n, Rng& rng);
// Symmetric unitary O diag(e^{i theta}) O^T with O real orthogonal.
CMatrix random_symmetric_unitary(std::size_t n, Rng& rng);

struct RandomGraphOptions {
  std::size_t max_internal = 3;
  std::size_t max_leads = 3;
  bool symmetric = false;  // U = U^T and zero fluxes (time-reversal invariant)
  bool custom_only = false;  // every vertex carries a random Custom matrix
};

// Flower graph with one Custom vertex carrying all N loops and M leads, or
// (randomly) a small multi-vertex graph with Kirchhoff / delta / Custom
// vertices. Lengths in [0.5, 2).
MetricGraph random_graph(Rng& rng, const RandomGraphOptions& options = {});

// Block-diagonal conjugation blocks for a coupling of the given shape.
CMatrix random_block(std::size_t n, Rng& rng);

// Polynomial with the given roots (repeated for multiplicity).
AnalyticFunction polynomial(std::vector<Complex> roots);

// Greedy one-to-one matching; max distance between matched points, or
// infinity when sizes differ.
double match_distance(std::vector<Complex> a, std::vector<Complex> b);

std::vector<Complex> expand(const ResonanceSet& set);

// Closed-form lasso zeros, e^{-ikl} = cos(phi), with 1e-3 < |k| <= radius.
std::vector<Complex> lasso_zeros(double phi, double length, double radius);

}  // namespace qgraph::testing
