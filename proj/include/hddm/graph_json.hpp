#ifndef HDDM_GRAPH_JSON_HPP
#define HDDM_GRAPH_JSON_HPP

#include <string>

#include "hddm/denoiser.hpp"
#include "hddm/forward.hpp"

namespace hddm {

/// One GraphState per line: {"n":..,"t":..,"nodes":[..],"edges":[..]} with
/// edges stored as the upper triangle (i<j) in lexicographic order.
std::string graph_state_to_json(const GraphState& g);
GraphState graph_state_from_json(const std::string& line);

/// {"node_probs":[[..]..],"edge_probs":[[..]..]} with edge rows in the same
/// upper-triangle order.
std::string denoiser_output_to_json(const DenoiserOutput& out);
DenoiserOutput denoiser_output_from_json(const std::string& line);

}  // namespace hddm

#endif  // HDDM_GRAPH_JSON_HPP
