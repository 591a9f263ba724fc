#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qgraph/graph_model.hpp"

namespace qgraph {

class GraphFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a graph description document:
///
///   {"vertices": [{"id": "v", "coupling": {"type": "kirchhoff"}}],
///    "edges":    [{"from": "v", "to": "v", "length": 1.0, "flux": 0.0}],
///    "leads":    [{"at": "v"}]}
///
/// Coupling types are "kirchhoff", "delta" (with "alpha") and "custom" (with
/// "matrix", rows of [re, im] pairs). "flux" defaults to 0. Array order fixes
/// the canonical ordering. Structural problems are left to validate().
MetricGraph parse_graph(std::string_view text);
MetricGraph load_graph(const std::filesystem::path& path);

std::string serialize_graph(const MetricGraph& graph);

}  // namespace qgraph
