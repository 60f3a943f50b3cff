#include "sbl/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sbl/errors.hpp"

namespace sbl {

std::string write_edge_list(const Graph& g) {
    std::ostringstream out;
    out << g.vertex_count() << ' ' << g.edge_count() << '\n';
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
    return out.str();
}

Graph parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    long long n = -1, m = -1;
    if (!(in >> n >> m) || n < 0 || m < 0)
        throw parameter_error("edge list: expected header line 'n m'");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(std::size_t(m));
    for (long long i = 0; i < m; ++i) {
        int u, v;
        if (!(in >> u >> v))
            throw parameter_error("edge list: expected " + std::to_string(m) + " edges, got " +
                                  std::to_string(i));
        edges.emplace_back(u, v);
    }
    return Graph(int(n), std::move(edges));
}

nlohmann::json graph_to_json(const Graph& g, const GraphAnnotations* ann) {
    nlohmann::json j;
    j["n"] = g.vertex_count();
    auto edges = nlohmann::json::array();
    for (auto [u, v] : g.edges()) edges.push_back({u, v});
    j["edges"] = std::move(edges);
    if (ann) {
        if (!ann->roles.empty()) {
            nlohmann::json roles = nlohmann::json::object();
            for (auto& [v, r] : ann->roles) roles[std::to_string(v)] = r;
            j["roles"] = std::move(roles);
        }
        if (!ann->component.empty()) {
            nlohmann::json comp = nlohmann::json::object();
            for (auto& [v, c] : ann->component) comp[std::to_string(v)] = c;
            j["component"] = std::move(comp);
        }
    }
    return j;
}

Graph graph_from_json(const nlohmann::json& j, GraphAnnotations* ann) {
    if (!j.contains("n") || !j.contains("edges"))
        throw parameter_error("graph json: missing 'n' or 'edges'");
    int n = j.at("n").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2)
            throw parameter_error("graph json: each edge must be a pair");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    if (ann) {
        ann->roles.clear();
        ann->component.clear();
        if (j.contains("roles"))
            for (auto& [key, val] : j.at("roles").items())
                ann->roles[std::stoi(key)] = val.get<std::string>();
        if (j.contains("component"))
            for (auto& [key, val] : j.at("component").items())
                ann->component[std::stoi(key)] = val.get<int>();
    }
    return Graph(n, std::move(edges));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parameter_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Graph load_graph_file(const std::string& path, GraphAnnotations* ann, nlohmann::json* raw) {
    std::string text = read_file(path);
    std::size_t i = text.find_first_not_of(" \t\r\n");
    if (i == std::string::npos) throw parameter_error("empty graph file: " + path);
    if (text[i] == '{') {
        nlohmann::json j = nlohmann::json::parse(text);
        if (raw) *raw = j;
        // report files wrap the graph under "graph"
        const nlohmann::json& gj = j.contains("graph") && j.at("graph").is_object() ? j.at("graph") : j;
        return graph_from_json(gj, ann);
    }
    if (raw) *raw = nullptr;
    return parse_edge_list(text);
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw parameter_error("cannot write file: " + tmp);
        out << content;
        if (!out) throw parameter_error("short write: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw parameter_error("cannot rename " + tmp + " to " + path);
}

std::string json_dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

} // namespace sbl
