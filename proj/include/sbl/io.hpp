#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "sbl/graph.hpp"

namespace sbl {

// Plain edge-list text format: first line "n m", then m lines "u v" (0-based).
// Written with edges in canonical (sorted) order, so output is byte-stable.
std::string write_edge_list(const Graph& g);
Graph parse_edge_list(const std::string& text);

// Annotated JSON: {"n":..., "edges":[[u,v],...]} plus optional "roles"
// (vertex id -> one of sa, sb, first, last, leaf, path) and "component"
// (vertex id -> component index) maps.
struct GraphAnnotations {
    std::map<int, std::string> roles;
    std::map<int, int> component;
};

nlohmann::json graph_to_json(const Graph& g, const GraphAnnotations* ann = nullptr);
Graph graph_from_json(const nlohmann::json& j, GraphAnnotations* ann = nullptr);

// Loads a graph file, sniffing JSON vs edge-list by the first non-space byte.
Graph load_graph_file(const std::string& path, GraphAnnotations* ann = nullptr,
                      nlohmann::json* raw = nullptr);

std::string read_file(const std::string& path);

// Write-to-temp-then-rename so partially written reports never appear.
void write_file_atomic(const std::string& path, const std::string& content);

std::string json_dump(const nlohmann::json& j);

} // namespace sbl
