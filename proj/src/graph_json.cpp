#include "hddm/graph_json.hpp"

#include <stdexcept>

#include <json.hpp>

namespace hddm {

using nlohmann::json;

std::string graph_state_to_json(const GraphState& g) {
  json j;
  j["n"] = g.n;
  j["t"] = g.t;
  std::vector<int> nodes(g.nodes.data(), g.nodes.data() + g.n);
  j["nodes"] = nodes;
  std::vector<int> edges;
  edges.reserve(static_cast<std::size_t>(g.n) * (g.n - 1) / 2);
  for (int i = 0; i < g.n; ++i) {
    for (int k = i + 1; k < g.n; ++k) edges.push_back(g.edges(i, k));
  }
  j["edges"] = edges;
  return j.dump();
}

GraphState graph_state_from_json(const std::string& line) {
  const json j = json::parse(line);
  GraphState g;
  g.n = j.at("n").get<int>();
  g.t = j.at("t").get<double>();
  const auto nodes = j.at("nodes").get<std::vector<int>>();
  const auto edges = j.at("edges").get<std::vector<int>>();
  if (static_cast<int>(nodes.size()) != g.n) {
    throw std::invalid_argument("graph state json: nodes length != n");
  }
  if (edges.size() != static_cast<std::size_t>(g.n) * (g.n - 1) / 2) {
    throw std::invalid_argument(
        "graph state json: edges length != n(n-1)/2");
  }
  g.nodes = Eigen::Map<const Eigen::VectorXi>(nodes.data(), g.n);
  g.edges = Eigen::MatrixXi::Zero(g.n, g.n);
  std::size_t e = 0;
  for (int i = 0; i < g.n; ++i) {
    for (int k = i + 1; k < g.n; ++k, ++e) {
      g.edges(i, k) = edges[e];
      g.edges(k, i) = edges[e];
    }
  }
  return g;
}

namespace {

json matrix_to_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd rows_to_matrix(const json& rows, const char* what) {
  if (!rows.is_array()) {
    throw std::invalid_argument(std::string("denoiser json: missing ") + what);
  }
  if (rows.empty()) return Eigen::MatrixXd(0, 0);  // single-node graphs
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index nc = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != nc) {
      throw std::invalid_argument(std::string("denoiser json: ragged ") + what);
    }
    for (Eigen::Index c = 0; c < nc; ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

}  // namespace

std::string denoiser_output_to_json(const DenoiserOutput& out) {
  json j;
  j["node_probs"] = matrix_to_rows(out.node_probs);
  j["edge_probs"] = matrix_to_rows(out.edge_probs);
  return j.dump();
}

DenoiserOutput denoiser_output_from_json(const std::string& line) {
  const json j = json::parse(line);
  DenoiserOutput out;
  out.node_probs = rows_to_matrix(j.at("node_probs"), "node_probs");
  out.edge_probs = rows_to_matrix(j.at("edge_probs"), "edge_probs");
  out.n = static_cast<int>(out.node_probs.rows());
  return out;
}

}  // namespace hddm
