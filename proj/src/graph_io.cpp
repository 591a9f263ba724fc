#include "qgraph/graph_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qgraph {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw GraphFileError(where + ": missing key \"" + key + "\"");
  return obj.at(key);
}

double number(const json& value, const std::string& where) {
  if (!value.is_number()) throw GraphFileError(where + ": expected a number");
  return value.get<double>();
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw GraphFileError(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

CMatrix parse_matrix(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) throw GraphFileError(where + ": matrix must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = static_cast<Eigen::Index>(rows.front().is_array() ? rows.front().size() : 0);
  CMatrix out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m)
      throw GraphFileError(where + ": matrix rows must be arrays of equal length");
    for (Eigen::Index j = 0; j < m; ++j) {
      const json& entry = row[static_cast<std::size_t>(j)];
      if (!entry.is_array() || entry.size() != 2) throw GraphFileError(where + ": matrix entries must be [re, im] pairs");
      out(i, j) = Complex(number(entry[0], where), number(entry[1], where));
    }
  }
  return out;
}

VertexCoupling parse_coupling(const json& c, const std::string& where) {
  const std::string type = string_field(c, "type", where);
  if (type == "kirchhoff") return Kirchhoff{};
  if (type == "delta") return Delta{number(require(c, "alpha", where), where + ".alpha")};
  if (type == "custom") return Custom{parse_matrix(require(c, "matrix", where), where + ".matrix")};
  throw GraphFileError(where + ": unknown coupling type \"" + type + "\"");
}

const json& array_field(const json& doc, const char* key) {
  const json& v = require(doc, key, "document");
  if (!v.is_array()) throw GraphFileError(std::string("\"") + key + "\" must be an array");
  return v;
}

}  // namespace

MetricGraph parse_graph(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GraphFileError(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw GraphFileError("document must be an object");

  MetricGraph g;
  const json& vertices = array_field(doc, "vertices");
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const std::string where = "vertices[" + std::to_string(i) + "]";
    VertexSpec v;
    v.id = string_field(vertices[i], "id", where);
    if (vertices[i].contains("coupling")) v.coupling = parse_coupling(vertices[i].at("coupling"), where + ".coupling");
    g.vertices.push_back(std::move(v));
  }
  const json& edges = array_field(doc, "edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    InternalEdge e;
    e.from_vertex = string_field(edges[i], "from", where);
    e.to_vertex = string_field(edges[i], "to", where);
    e.length = number(require(edges[i], "length", where), where + ".length");
    if (edges[i].contains("flux")) e.flux = number(edges[i].at("flux"), where + ".flux");
    g.internal_edges.push_back(std::move(e));
  }
  const json& leads = array_field(doc, "leads");
  for (std::size_t i = 0; i < leads.size(); ++i)
    g.leads.push_back(LeadSpec{string_field(leads[i], "at", "leads[" + std::to_string(i) + "]")});
  return g;
}

MetricGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GraphFileError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

std::string serialize_graph(const MetricGraph& graph) {
  json doc;
  doc["vertices"] = json::array();
  for (const auto& v : graph.vertices) {
    json c;
    if (std::holds_alternative<Kirchhoff>(v.coupling)) {
      c["type"] = "kirchhoff";
    } else if (const auto* d = std::get_if<Delta>(&v.coupling)) {
      c["type"] = "delta";
      c["alpha"] = d->strength;
    } else {
      const CMatrix& m = std::get<Custom>(v.coupling).matrix;
      c["type"] = "custom";
      json rows = json::array();
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
      }
      c["matrix"] = std::move(rows);
    }
    doc["vertices"].push_back({{"id", v.id}, {"coupling", std::move(c)}});
  }
  doc["edges"] = json::array();
  for (const auto& e : graph.internal_edges)
    doc["edges"].push_back({{"from", e.from_vertex}, {"to", e.to_vertex}, {"length", e.length}, {"flux", e.flux}});
  doc["leads"] = json::array();
  for (const auto& l : graph.leads) doc["leads"].push_back({{"at", l.at_vertex}});
  return doc.dump(2);
}

}  // namespace qgraph
