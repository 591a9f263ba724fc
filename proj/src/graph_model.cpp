#include "qgraph/graph_model.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace qgraph {

double unitarity_defect(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  const CMatrix defect = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
  return defect.cwiseAbs().maxCoeff();
}

double normalize_angle(double radians) {
  double r = std::remainder(radians, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

std::vector<double> MetricGraph::lengths() const {
  std::vector<double> out;
  out.reserve(internal_edges.size());
  for (const auto& e : internal_edges) out.push_back(e.length);
  return out;
}

std::vector<double> MetricGraph::fluxes() const {
  std::vector<double> out;
  out.reserve(internal_edges.size());
  for (const auto& e : internal_edges) out.push_back(e.flux);
  return out;
}

bool ValidationReport::has(ViolationKind kind) const {
  for (const auto& v : violations)
    if (v.kind == kind) return true;
  return false;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << '\n';
    os << violations[i].message;
  }
  return os.str();
}

InvalidGraph::InvalidGraph(ValidationReport report)
    : std::runtime_error("invalid graph: " + report.summary()), report_(std::move(report)) {}

namespace {

std::unordered_map<std::string, std::size_t> vertex_index(const MetricGraph& graph) {
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) idx.emplace(graph.vertices[i].id, i);
  return idx;
}

}  // namespace

std::vector<std::size_t> local_order(const MetricGraph& graph, std::size_t vertex) {
  const std::string& id = graph.vertices.at(vertex).id;
  const std::size_t n = graph.internal_count();
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& e = graph.internal_edges[j];
    if (e.from_vertex == id) order.push_back(2 * j);
    if (e.to_vertex == id) order.push_back(2 * j + 1);
  }
  for (std::size_t m = 0; m < graph.lead_count(); ++m)
    if (graph.leads[m].at_vertex == id) order.push_back(2 * n + m);
  return order;
}

ValidationReport validate(const MetricGraph& graph) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::string msg) {
    report.violations.push_back({kind, std::move(msg)});
  };

  if (graph.internal_edges.empty()) add(ViolationKind::kNoInternalEdges, "graph has no internal edges");
  if (graph.leads.empty()) add(ViolationKind::kNoLeads, "graph has no leads");

  std::set<std::string> seen;
  for (const auto& v : graph.vertices)
    if (!seen.insert(v.id).second) add(ViolationKind::kDuplicateVertex, "duplicate vertex id '" + v.id + "'");

  const auto idx = vertex_index(graph);
  for (std::size_t j = 0; j < graph.internal_edges.size(); ++j) {
    const auto& e = graph.internal_edges[j];
    const std::string tag = "edge " + std::to_string(j);
    if (!idx.contains(e.from_vertex))
      add(ViolationKind::kDanglingReference, tag + ": dangling reference to vertex '" + e.from_vertex + "'");
    if (!idx.contains(e.to_vertex))
      add(ViolationKind::kDanglingReference, tag + ": dangling reference to vertex '" + e.to_vertex + "'");
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      add(ViolationKind::kNonpositiveLength, tag + ": nonpositive length");
    if (!std::isfinite(e.flux)) add(ViolationKind::kNonfiniteFlux, tag + ": nonfinite flux");
  }
  for (std::size_t m = 0; m < graph.leads.size(); ++m) {
    const auto& lead = graph.leads[m];
    if (!idx.contains(lead.at_vertex))
      add(ViolationKind::kDanglingReference,
          "lead " + std::to_string(m) + ": dangling reference to vertex '" + lead.at_vertex + "'");
  }

  for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
    const auto& vtx = graph.vertices[v];
    const std::size_t degree = local_order(graph, v).size();
    const std::string tag = "vertex '" + vtx.id + "'";
    if (degree == 0) {
      add(ViolationKind::kIsolatedVertex, tag + ": isolated vertex");
      continue;
    }
    if (const auto* custom = std::get_if<Custom>(&vtx.coupling)) {
      const auto rows = static_cast<std::size_t>(custom->matrix.rows());
      const auto cols = static_cast<std::size_t>(custom->matrix.cols());
      if (rows != degree || cols != degree) {
        add(ViolationKind::kDimensionMismatch, tag + ": dimension mismatch (matrix " + std::to_string(rows) + "x" +
                                                   std::to_string(cols) + ", degree " + std::to_string(degree) + ")");
      } else if (unitarity_defect(custom->matrix) >= kUnitaryTolerance) {
        add(ViolationKind::kNonUnitary, tag + ": non-unitary coupling matrix");
      }
    } else if (const auto* delta = std::get_if<Delta>(&vtx.coupling)) {
      if (!std::isfinite(delta->strength)) add(ViolationKind::kNonUnitary, tag + ": nonfinite delta strength");
    }
  }
  return report;
}

CMatrix kirchhoff_matrix(std::size_t degree) {
  if (degree == 0) throw std::invalid_argument("kirchhoff_matrix: degree must be positive");
  const auto d = static_cast<Eigen::Index>(degree);
  return CMatrix::Constant(d, d, Complex(2.0 / static_cast<double>(degree), 0.0)) - CMatrix::Identity(d, d);
}

CMatrix delta_matrix(std::size_t degree, double strength) {
  if (degree == 0) throw std::invalid_argument("delta_matrix: degree must be positive");
  const auto d = static_cast<Eigen::Index>(degree);
  const Complex c = 2.0 / Complex(static_cast<double>(degree), strength);
  return CMatrix::Constant(d, d, c) - CMatrix::Identity(d, d);
}

CMatrix vertex_matrix(const VertexCoupling& coupling, std::size_t degree) {
  struct Visitor {
    std::size_t degree;
    CMatrix operator()(const Kirchhoff&) const { return kirchhoff_matrix(degree); }
    CMatrix operator()(const Delta& d) const { return delta_matrix(degree, d.strength); }
    CMatrix operator()(const Custom& c) const { return c.matrix; }
  };
  return std::visit(Visitor{degree}, coupling);
}

GlobalCoupling::GlobalCoupling(CMatrix matrix, std::size_t internal_count, std::size_t lead_count)
    : matrix_(std::move(matrix)), n_(internal_count), m_(lead_count) {
  const auto d = static_cast<Eigen::Index>(2 * n_ + m_);
  if (matrix_.rows() != d || matrix_.cols() != d)
    throw std::invalid_argument("GlobalCoupling: matrix must be (2N+M)x(2N+M)");
  if (unitarity_defect(matrix_) >= kUnitaryTolerance) throw std::invalid_argument("GlobalCoupling: matrix is not unitary");
}

CMatrix GlobalCoupling::u1() const {
  const auto a = static_cast<Eigen::Index>(2 * n_);
  return matrix_.topLeftCorner(a, a);
}
CMatrix GlobalCoupling::u2() const {
  return matrix_.topRightCorner(static_cast<Eigen::Index>(2 * n_), static_cast<Eigen::Index>(m_));
}
CMatrix GlobalCoupling::u3() const {
  return matrix_.bottomLeftCorner(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(2 * n_));
}
CMatrix GlobalCoupling::u4() const {
  const auto b = static_cast<Eigen::Index>(m_);
  return matrix_.bottomRightCorner(b, b);
}

GlobalCoupling assemble_global(const MetricGraph& graph) {
  ValidationReport report = validate(graph);
  if (!report.ok()) throw InvalidGraph(std::move(report));

  const std::size_t n = graph.internal_count();
  const std::size_t m = graph.lead_count();
  const auto dim = static_cast<Eigen::Index>(2 * n + m);
  CMatrix u = CMatrix::Zero(dim, dim);
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
    const auto order = local_order(graph, v);
    const CMatrix block = vertex_matrix(graph.vertices[v].coupling, order.size());
    for (std::size_t a = 0; a < order.size(); ++a)
      for (std::size_t b = 0; b < order.size(); ++b)
        u(static_cast<Eigen::Index>(order[a]), static_cast<Eigen::Index>(order[b])) =
            block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  return GlobalCoupling(std::move(u), n, m);
}

GaugePhases gauge_phases(const std::vector<double>& fluxes, std::size_t lead_count) {
  const std::size_t n = fluxes.size();
  CVector diag = CVector::Ones(static_cast<Eigen::Index>(2 * n + lead_count));
  for (std::size_t j = 0; j < n; ++j) diag(static_cast<Eigen::Index>(2 * j + 1)) = std::polar(1.0, fluxes[j]);
  return GaugePhases{std::move(diag)};
}

GlobalCoupling gauge_transform(const GlobalCoupling& coupling, const std::vector<double>& fluxes) {
  if (fluxes.size() != coupling.internal_count())
    throw std::invalid_argument("gauge_transform: one flux per internal edge required");
  const CVector f = gauge_phases(fluxes, coupling.lead_count()).diagonal;
  // (F^{-1} U F)_{ab} = conj(f_a) U_ab f_b
  CMatrix ua = f.conjugate().asDiagonal() * coupling.matrix() * f.asDiagonal();
  return GlobalCoupling(std::move(ua), coupling.internal_count(), coupling.lead_count());
}

GlobalCoupling gauge_transform(const GlobalCoupling& coupling, const MetricGraph& graph) {
  return gauge_transform(coupling, graph.fluxes());
}

double total_internal_length(const MetricGraph& graph) {
  double total = 0.0;
  for (const auto& e : graph.internal_edges) total += e.length;
  return total;
}

}  // namespace qgraph
