#include <doctest.h>

#include <cmath>

#include "qgraph/graph_io.hpp"
#include "qgraph/graph_model.hpp"
#include "support.hpp"

using namespace qgraph;
using namespace qgraph::testing;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("lasso validates") { CHECK(validate(lasso()).ok()); }

TEST_CASE("zero loop length is reported") {
  auto g = lasso(0.0, 0.0);
  const auto report = validate(g);
  CHECK(report.has(ViolationKind::kNonpositiveLength));
  CHECK(report.summary().find("nonpositive length") != std::string::npos);
}

TEST_CASE("custom block of the wrong size is reported") {
  auto g = lasso();
  g.vertices[0].coupling = Custom{kirchhoff_matrix(3)};
  const auto report = validate(g);
  CHECK(report.has(ViolationKind::kDimensionMismatch));
  CHECK(report.summary().find("dimension mismatch") != std::string::npos);
}

TEST_CASE("structural violations") {
  MetricGraph g = lasso();
  g.leads.clear();
  CHECK(validate(g).has(ViolationKind::kNoLeads));

  g = lasso();
  g.internal_edges[0].to_vertex = "w";
  CHECK(validate(g).has(ViolationKind::kDanglingReference));

  g = lasso();
  g.vertices.push_back({"v", Kirchhoff{}});
  CHECK(validate(g).has(ViolationKind::kDuplicateVertex));

  g = lasso();
  g.internal_edges[0].flux = std::nan("");
  CHECK(validate(g).has(ViolationKind::kNonfiniteFlux));

  g = lasso();
  CMatrix bad = kirchhoff_matrix(4);
  bad(0, 0) += 0.1;
  g.vertices[0].coupling = Custom{bad};
  CHECK(validate(g).has(ViolationKind::kNonUnitary));
  CHECK_THROWS_AS(assemble_global(g), InvalidGraph);
}

TEST_CASE("kirchhoff matrices") {
  CMatrix d2(2, 2);
  d2 << 0.0, 1.0, 1.0, 0.0;
  CHECK(max_abs(kirchhoff_matrix(2) - d2) < 1e-15);
  CHECK(max_abs(kirchhoff_matrix(1) - CMatrix::Identity(1, 1)) < 1e-15);
  const CMatrix d4 = kirchhoff_matrix(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(d4(i, j) - (i == j ? -0.5 : 0.5)) < 1e-15);
  CHECK(max_abs(d4 - d4.transpose()) == 0.0);
  CHECK_THROWS_AS(kirchhoff_matrix(0), std::invalid_argument);
}

TEST_CASE("delta matrices") {
  CHECK(max_abs(delta_matrix(4, 0.0) - kirchhoff_matrix(4)) < 1e-15);
  CHECK(max_abs(delta_matrix(2, 1e8) + CMatrix::Identity(2, 2)) < 1e-7);
  const CMatrix d3 = delta_matrix(3, 1.0);
  CHECK(std::abs(d3(0, 1) - 2.0 / Complex(3.0, 1.0)) < 1e-15);
  CHECK(unitarity_defect(d3) < 1e-12);
}

TEST_CASE("lasso assembles to the plain Kirchhoff matrix") {
  const GlobalCoupling u = assemble_global(lasso());
  CHECK(max_abs(u.matrix() - kirchhoff_matrix(4)) < 1e-15);
  CMatrix u4(2, 2);
  u4 << -0.5, 0.5, 0.5, -0.5;
  CHECK(max_abs(u.u4() - u4) < 1e-15);
  CHECK(u.u1().rows() == 2);
  CHECK(u.u2().cols() == 2);
  CHECK(u.u3().rows() == 2);
}

TEST_CASE("edge between two degree-2 vertices is permuted into place") {
  MetricGraph g;
  g.vertices = {{"a", Kirchhoff{}}, {"b", Kirchhoff{}}};
  g.internal_edges = {{"a", "b", 1.0, 0.0}};
  g.leads = {{"a"}, {"b"}};
  const CMatrix u = assemble_global(g).matrix();
  // Canonical order (start, end, lead a, lead b): a owns {0, 2}, b owns {1, 3}.
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 2) = expected(2, 0) = 1.0;
  expected(1, 3) = expected(3, 1) = 1.0;
  CHECK(max_abs(u - expected) < 1e-15);
}

TEST_CASE("global coupling rejects bad input") {
  CHECK_THROWS_AS(GlobalCoupling(kirchhoff_matrix(4), 1, 1), std::invalid_argument);
  CMatrix bad = kirchhoff_matrix(3);
  bad(1, 2) = 0.9;
  CHECK_THROWS_AS(GlobalCoupling(bad, 1, 1), std::invalid_argument);
}

TEST_CASE("gauge transform of the lasso") {
  const double phi = 0.7;
  const auto g = lasso(phi);
  const CMatrix ua = gauge_transform(assemble_global(g), g).matrix();
  // The loop's start-to-end entry carries e^{+i phi}; leads see the phase
  // only through the end index.
  CHECK(std::abs(ua(0, 1) - 0.5 * std::polar(1.0, phi)) < 1e-15);
  CHECK(std::abs(ua(1, 0) - 0.5 * std::polar(1.0, -phi)) < 1e-15);
  CHECK(std::abs(ua(2, 3) - 0.5) < 1e-15);
  CHECK(std::abs(ua(0, 2) - 0.5) < 1e-15);
  CHECK(std::abs(ua(1, 2) - 0.5 * std::polar(1.0, -phi)) < 1e-15);
  CHECK(std::abs(ua(2, 1) - 0.5 * std::polar(1.0, phi)) < 1e-15);
}

TEST_CASE("gauge transform: zero flux, periodicity, group action") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = random_graph(rng);
    const GlobalCoupling u = assemble_global(g);
    const std::size_t n = u.internal_count();
    std::vector<double> zero(n, 0.0), a(n), b(n), ab(n), a2pi(n);
    std::uniform_real_distribution<double> f(-4.0, 4.0);
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = f(rng);
      b[j] = f(rng);
      ab[j] = a[j] + b[j];
      a2pi[j] = a[j] + 2.0 * kPi;
    }
    CHECK(max_abs(gauge_transform(u, zero).matrix() - u.matrix()) < 1e-15);
    const GlobalCoupling ua = gauge_transform(u, a);
    CHECK(unitarity_defect(ua.matrix()) < 1e-12);
    CHECK(ua.u1().rows() == u.u1().rows());
    CHECK(max_abs(gauge_transform(u, a2pi).matrix() - ua.matrix()) < 1e-12);
    CHECK(max_abs(gauge_transform(ua, b).matrix() - gauge_transform(u, ab).matrix()) < 1e-12);
  }
}

TEST_CASE("assembled matrices are unitary and blocks read back") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_graph(rng);
    REQUIRE(validate(g).ok());
    const GlobalCoupling u = assemble_global(g);
    CHECK(unitarity_defect(u.matrix()) < 1e-10);
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
      const auto idx = local_order(g, v);
      const CMatrix uj = vertex_matrix(g.vertices[v].coupling, idx.size());
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c)
          CHECK(u.matrix()(static_cast<Eigen::Index>(idx[r]), static_cast<Eigen::Index>(idx[c])) ==
                uj(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
  }
}

TEST_CASE("total internal length") {
  CHECK(total_internal_length(lasso()) == doctest::Approx(1.0));
  CHECK(total_internal_length(lasso(0.0, kPi)) == doctest::Approx(kPi));
  MetricGraph g = two_edge_graph();
  g.internal_edges[0].length = 0.5;
  g.internal_edges[1].length = 1.5;
  CHECK(total_internal_length(g) == doctest::Approx(2.0));
}

TEST_CASE("angles normalise into (-pi, pi]") {
  CHECK(normalize_angle(kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(-kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0));
  CHECK(normalize_angle(0.25) == doctest::Approx(0.25));
}

TEST_CASE("graph files round trip") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_graph(rng);
    const auto back = parse_graph(serialize_graph(g));
    REQUIRE(back.internal_count() == g.internal_count());
    REQUIRE(back.lead_count() == g.lead_count());
    CHECK(back.lengths() == g.lengths());
    CHECK(back.fluxes() == g.fluxes());
    CHECK(max_abs(assemble_global(back).matrix() - assemble_global(g).matrix()) < 1e-15);
  }
}

TEST_CASE("graph file parsing") {
  const auto g = parse_graph(R"({
    "vertices": [{"id": "v", "coupling": {"type": "delta", "alpha": 1.5}}],
    "edges": [{"from": "v", "to": "v", "length": 2.0}],
    "leads": [{"at": "v"}]
  })");
  CHECK(g.internal_edges[0].flux == 0.0);
  CHECK(std::get<Delta>(g.vertices[0].coupling).strength == 1.5);
  CHECK_THROWS_AS(parse_graph("{not json"), GraphFileError);
  CHECK_THROWS_AS(parse_graph(R"({"vertices": [{"id": "v", "coupling": {"type": "robin"}}], "edges": [], "leads": []})"),
                  GraphFileError);
  CHECK_THROWS_AS(load_graph("/nonexistent/graph.json"), GraphFileError);
}
