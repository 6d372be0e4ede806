#pragma once
// Hop-capped shortest paths between linked concept sets.

#include "kgalign/kg_store.hpp"
#include "kgalign/linker.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace kgalign {

/// Walk of `triples.size()` hops from source to target. Consecutive triples
/// share a node; each triple is oriented in walking direction, with
/// reversed=true where the walk runs against the stored edge.
struct Path {
    ConceptId source;
    ConceptId target;
    std::vector<Triple> triples;
    std::vector<std::uint32_t> edge_ids;  // canonical edge index per triple

    std::size_t hop_count() const noexcept { return triples.size(); }
    std::vector<ConceptId> nodes() const;

    friend bool operator==(const Path&, const Path&) = default;
};

struct Subgraph {
    std::vector<ConceptId> nodes;  // first-appearance order
    std::vector<Triple> edges;     // deduplicated, first-appearance order
    std::vector<Path> provenance;

    bool empty() const noexcept { return edges.empty() && nodes.empty(); }
};

struct PathQueryConfig {
    std::size_t k = 3;
    std::size_t max_pairs = 64;
    std::size_t per_pair_paths = 1;
};

/// Nodes and canonical edges a search may not use.
struct SearchBans {
    std::vector<std::uint32_t> nodes;
    std::vector<std::uint32_t> edges;
};

/// Unit-cost Dijkstra specialised to a bidirectional, level-synchronous
/// search: each round expands the frontier whose summed degree is smaller,
/// and stops once the two searches meet or the hop budget is spent. Nodes
/// are visited in adjacency order (neighbor id, relation name), so the
/// returned path is deterministic.
///
/// Scratch state is per thread and sized to the graph once; a query touches
/// only what it visits. Safe to call concurrently.
class PathFinder {
public:
    explicit PathFinder(const KnowledgeGraph& graph) : graph_(&graph) {}

    /// Minimum-hop path with at most k hops, or nullopt. src == dst gives a
    /// zero-hop path. Throws InvalidHandle.
    std::optional<Path> shortest_path(ConceptId src, ConceptId dst, std::size_t k,
                                      const SearchBans* bans = nullptr) const;

    /// Up to `count` loopless paths within k hops in non-decreasing hop
    /// order (Yen's algorithm over shortest_path).
    std::vector<Path> shortest_paths(ConceptId src, ConceptId dst, std::size_t k, std::size_t count) const;

    /// For each cross pair (q, a), in text order of q then a and capped at
    /// cfg.max_pairs, up to cfg.per_pair_paths shortest paths.
    std::vector<Path> find_paths(const ConceptSet& cq, const ConceptSet& ca, const PathQueryConfig& cfg) const;

    const KnowledgeGraph& graph() const noexcept { return *graph_; }

private:
    const KnowledgeGraph* graph_;
};

std::optional<Path> shortest_path(const KnowledgeGraph& graph, ConceptId src, ConceptId dst, std::size_t k);

std::vector<Path> find_paths(const KnowledgeGraph& graph, const ConceptSet& cq, const ConceptSet& ca,
                             const PathQueryConfig& cfg = {});

/// Union of the paths' nodes and edges. An edge walked in both directions
/// is kept once, in the orientation first seen.
Subgraph subgraph_from_paths(const std::vector<Path>& paths);

/// Clears every reversed flag. Idempotent.
Subgraph to_undirected(Subgraph sub);
Path to_undirected(Path path);

}  // namespace kgalign
