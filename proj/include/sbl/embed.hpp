#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbl/graph.hpp"

namespace sbl {

struct EmbeddingMap {
    std::vector<int> image; // guest vertex -> host vertex
    bool verified = false;
};

struct VerifyResult {
    bool ok = false;
    std::string violation;   // empty when ok
    int a = -1, b = -1;      // witness guest pair
};

// true iff `image` is injective and maps every guest edge to a host edge;
// otherwise the first violating pair.
VerifyResult verify_embedding(const Graph& guest, const Graph& host,
                              const std::vector<int>& image);

enum class EmbedStatus { embeds, does_not_embed, inconclusive };

struct EmbedSearchResult {
    EmbedStatus status = EmbedStatus::inconclusive;
    EmbeddingMap map;        // populated when status == embeds
    long long nodes = 0;
};

// Backtracking subgraph search (guest into host, not necessarily induced or
// spanning) with degree pruning, common-neighborhood candidate sets, and
// host twin-class symmetry breaking. does_not_embed is reported only when
// the search space was exhausted within node_limit.
EmbedSearchResult exact_embed(const Graph& guest, const Graph& host,
                              long long node_limit = 20'000'000);

struct DenseEmbedReport {
    bool success = false;
    EmbeddingMap map;
    double host_density = 0.0;
    bool premise_met = false;        // N >= 8 * Delta * rho^-Delta * n
    double premise_required_n = 0.0;
    int retries_used = 0;
    int min_candidates_seen = -1;
    int dead_end_vertex = -1;        // guest vertex of the last dead end
};

// Randomized greedy for dense hosts: guest vertices in BFS order, each placed
// uniformly among common neighbors of its placed neighbors that keep at least
// a rho/2 fraction of surviving degree. Dead ends restart with a fresh
// substream, up to `retries`.
DenseEmbedReport dense_embed_separator(const Graph& guest, const Graph& host, double rho,
                                       std::uint64_t seed, int retries = 20);

nlohmann::json dense_embed_report_to_json(const DenseEmbedReport& r, bool include_map = true);

} // namespace sbl
