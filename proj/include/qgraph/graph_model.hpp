#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qgraph/types.hpp"

namespace qgraph {

// Vertex coupling families.
struct Kirchhoff {};
struct Delta {
  double strength = 0.0;
};
struct Custom {
  CMatrix matrix;
};
using VertexCoupling = std::variant<Kirchhoff, Delta, Custom>;

struct VertexSpec {
  std::string id;
  VertexCoupling coupling = Kirchhoff{};
};

/// Finite edge running from `from_vertex` (x = 0) to `to_vertex` (x = length).
/// The vector potential enters only through its line integral `flux`.
struct InternalEdge {
  std::string from_vertex;
  std::string to_vertex;
  double length = 1.0;
  double flux = 0.0;
};

struct LeadSpec {
  std::string at_vertex;
};

struct MetricGraph {
  std::vector<VertexSpec> vertices;
  std::vector<InternalEdge> internal_edges;
  std::vector<LeadSpec> leads;

  std::size_t internal_count() const { return internal_edges.size(); }
  std::size_t lead_count() const { return leads.size(); }
  std::vector<double> lengths() const;
  std::vector<double> fluxes() const;
};

enum class ViolationKind {
  kNoInternalEdges,
  kNoLeads,
  kDuplicateVertex,
  kDanglingReference,
  kNonpositiveLength,
  kNonfiniteFlux,
  kDimensionMismatch,
  kNonUnitary,
  kIsolatedVertex,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string summary() const;
};

class InvalidGraph : public std::runtime_error {
 public:
  explicit InvalidGraph(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

ValidationReport validate(const MetricGraph& graph);

/// Canonical indices (see GlobalCoupling) of the endpoints meeting at `vertex`,
/// in vertex-local order: internal endpoints in edge order (start before end
/// for loops), then leads in lead order.
std::vector<std::size_t> local_order(const MetricGraph& graph, std::size_t vertex);

/// (2/d) J - I. Throws std::invalid_argument for d = 0.
CMatrix kirchhoff_matrix(std::size_t degree);

/// (2/(d + i alpha)) J - I; alpha = 0 is Kirchhoff, alpha -> inf decouples.
CMatrix delta_matrix(std::size_t degree, double strength);

CMatrix vertex_matrix(const VertexCoupling& coupling, std::size_t degree);

/// Flower-graph coupling matrix over the canonical endpoint ordering
/// (edge_1 start, edge_1 end, ..., edge_N start, edge_N end, lead_1, ..., lead_M).
/// Immutable; blocks are returned by value.
class GlobalCoupling {
 public:
  /// Throws std::invalid_argument if the shape is wrong or the matrix is not
  /// unitary within kUnitaryTolerance.
  GlobalCoupling(CMatrix matrix, std::size_t internal_count, std::size_t lead_count);

  const CMatrix& matrix() const { return matrix_; }
  std::size_t internal_count() const { return n_; }
  std::size_t lead_count() const { return m_; }
  std::size_t internal_dim() const { return 2 * n_; }
  std::size_t dim() const { return 2 * n_ + m_; }

  CMatrix u1() const;  // 2N x 2N, internal-internal
  CMatrix u2() const;  // 2N x M
  CMatrix u3() const;  // M x 2N
  CMatrix u4() const;  // M x M, lead-lead

 private:
  CMatrix matrix_;
  std::size_t n_;
  std::size_t m_;
};

/// Throws InvalidGraph when validation fails.
GlobalCoupling assemble_global(const MetricGraph& graph);

/// Diagonal F = diag(1, e^{i Phi_1}, ..., 1, e^{i Phi_N}, 1, ..., 1).
struct GaugePhases {
  CVector diagonal;

  CMatrix matrix() const { return diagonal.asDiagonal(); }
};

GaugePhases gauge_phases(const std::vector<double>& fluxes, std::size_t lead_count);

/// Moves edge fluxes into the coupling: U_A = F^{-1} U F. With this orientation
/// the (start, end) entry of a loop picks up e^{+i Phi}.
GlobalCoupling gauge_transform(const GlobalCoupling& coupling, const std::vector<double>& fluxes);
GlobalCoupling gauge_transform(const GlobalCoupling& coupling, const MetricGraph& graph);

double total_internal_length(const MetricGraph& graph);

}  // namespace qgraph
