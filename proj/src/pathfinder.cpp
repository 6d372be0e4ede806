#include "kgalign/pathfinder.hpp"

#include "kgalign/errors.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <unordered_set>

namespace kgalign {

std::vector<ConceptId> Path::nodes() const {
    std::vector<ConceptId> out;
    out.reserve(triples.size() + 1);
    out.push_back(source);
    for (const auto& t : triples) out.push_back(t.tail);
    return out;
}

namespace {

using Slot = KnowledgeGraph::Slot;

struct Visit {
    std::uint32_t stamp = 0;
    std::uint32_t parent = 0;
    const Slot* via = nullptr;
};

// Per-thread scratch; stamps make resetting O(1).
struct Workspace {
    std::uint32_t stamp = 0;
    std::vector<Visit> fwd;
    std::vector<Visit> bwd;
    std::vector<std::uint32_t> banned;
    std::vector<std::uint32_t> frontier_fwd;
    std::vector<std::uint32_t> frontier_bwd;
    std::vector<std::uint32_t> next;

    std::uint32_t begin(std::size_t node_count) {
        if (fwd.size() != node_count) {
            fwd.assign(node_count, Visit{});
            bwd.assign(node_count, Visit{});
            banned.assign(node_count, 0);
            stamp = 0;
        }
        if (++stamp == 0) {
            std::fill(fwd.begin(), fwd.end(), Visit{});
            std::fill(bwd.begin(), bwd.end(), Visit{});
            std::fill(banned.begin(), banned.end(), 0);
            stamp = 1;
        }
        return stamp;
    }
};

Workspace& workspace() {
    thread_local Workspace ws;
    return ws;
}

void check_handle(const KnowledgeGraph& g, ConceptId id) {
    if (!g.contains(id)) {
        throw InvalidHandle("concept id " + std::to_string(id.value) + " out of range (node_count " +
                            std::to_string(g.node_count()) + ")");
    }
}

Path reconstruct(const KnowledgeGraph& g, const Workspace& ws, ConceptId src, ConceptId dst, std::uint32_t meet) {
    Path p;
    p.source = src;
    p.target = dst;
    std::vector<std::pair<std::uint32_t, const Slot*>> head_part;
    for (std::uint32_t x = meet; x != src.value; x = ws.fwd[x].parent) head_part.emplace_back(ws.fwd[x].parent, ws.fwd[x].via);
    std::reverse(head_part.begin(), head_part.end());
    for (const auto& [from, slot] : head_part) {
        p.triples.push_back(g.walk(ConceptId{from}, *slot));
        p.edge_ids.push_back(slot->edge);
    }
    // Backward parents point from the dst side towards meet; flip each hop.
    for (std::uint32_t x = meet; x != dst.value; x = ws.bwd[x].parent) {
        const Visit& v = ws.bwd[x];
        Triple t = g.walk(ConceptId{v.parent}, *v.via);
        std::swap(t.head, t.tail);
        t.relation.reversed = !t.relation.reversed;
        p.triples.push_back(std::move(t));
        p.edge_ids.push_back(v.via->edge);
    }
    return p;
}

}  // namespace

std::optional<Path> PathFinder::shortest_path(ConceptId src, ConceptId dst, std::size_t k,
                                              const SearchBans* bans) const {
    const auto& g = *graph_;
    check_handle(g, src);
    check_handle(g, dst);

    auto& ws = workspace();
    const std::uint32_t st = ws.begin(g.node_count());
    std::vector<std::uint32_t> banned_edges;
    if (bans) {
        for (auto n : bans->nodes) {
            if (n < ws.banned.size()) ws.banned[n] = st;
        }
        banned_edges = bans->edges;
        std::sort(banned_edges.begin(), banned_edges.end());
    }
    if (ws.banned[src.value] == st || ws.banned[dst.value] == st) return std::nullopt;
    if (src == dst) return Path{src, dst, {}, {}};

    const auto degree = [&](std::uint32_t n) { return g.adjacency(ConceptId{n}).size(); };
    ws.fwd[src.value] = Visit{st, src.value, nullptr};
    ws.bwd[dst.value] = Visit{st, dst.value, nullptr};
    ws.frontier_fwd.assign(1, src.value);
    ws.frontier_bwd.assign(1, dst.value);
    std::size_t cost_fwd = degree(src.value);
    std::size_t cost_bwd = degree(dst.value);

    // Invariant: no node is visited by both sides, so any path has more
    // than depth hops. The first meeting found in a round is therefore
    // optimal: every candidate in that round has the same total length.
    for (std::size_t depth = 0; depth < k; ++depth) {
        if (ws.frontier_fwd.empty() || ws.frontier_bwd.empty()) return std::nullopt;
        const bool forward = cost_fwd <= cost_bwd;
        auto& frontier = forward ? ws.frontier_fwd : ws.frontier_bwd;
        auto& mine = forward ? ws.fwd : ws.bwd;
        const auto& other = forward ? ws.bwd : ws.fwd;
        ws.next.clear();
        std::size_t next_cost = 0;
        for (const auto u : frontier) {
            for (const Slot& s : g.adjacency(ConceptId{u})) {
                const auto v = s.neighbor;
                if (mine[v].stamp == st || ws.banned[v] == st) continue;
                if (!banned_edges.empty() && std::binary_search(banned_edges.begin(), banned_edges.end(), s.edge)) continue;
                mine[v] = Visit{st, u, &s};
                if (other[v].stamp == st) return reconstruct(g, ws, src, dst, v);
                ws.next.push_back(v);
                next_cost += degree(v);
            }
        }
        frontier.swap(ws.next);
        (forward ? cost_fwd : cost_bwd) = next_cost;
    }
    return std::nullopt;
}

std::vector<Path> PathFinder::shortest_paths(ConceptId src, ConceptId dst, std::size_t k, std::size_t count) const {
    std::vector<Path> found;
    if (count == 0) return found;
    auto first = shortest_path(src, dst, k);
    if (!first) return found;
    found.push_back(std::move(*first));
    if (src == dst) return found;

    std::vector<Path> candidates;
    const auto known = [&](const Path& p) {
        const auto same = [&](const Path& q) { return q.edge_ids == p.edge_ids && q.triples == p.triples; };
        return std::any_of(found.begin(), found.end(), same) || std::any_of(candidates.begin(), candidates.end(), same);
    };
    while (found.size() < count) {
        const Path prev = found.back();
        const auto prev_nodes = prev.nodes();
        for (std::size_t j = 0; j < prev.hop_count() && j < k; ++j) {
            SearchBans bans;
            for (const auto& p : found) {
                if (p.hop_count() > j && std::equal(p.edge_ids.begin(), p.edge_ids.begin() + static_cast<std::ptrdiff_t>(j),
                                                    prev.edge_ids.begin())) {
                    bans.edges.push_back(p.edge_ids[j]);
                }
            }
            for (std::size_t i = 0; i < j; ++i) bans.nodes.push_back(prev_nodes[i].value);
            auto spur = shortest_path(prev_nodes[j], dst, k - j, &bans);
            if (!spur) continue;
            Path total{src, dst, {}, {}};
            total.triples.assign(prev.triples.begin(), prev.triples.begin() + static_cast<std::ptrdiff_t>(j));
            total.edge_ids.assign(prev.edge_ids.begin(), prev.edge_ids.begin() + static_cast<std::ptrdiff_t>(j));
            total.triples.insert(total.triples.end(), spur->triples.begin(), spur->triples.end());
            total.edge_ids.insert(total.edge_ids.end(), spur->edge_ids.begin(), spur->edge_ids.end());
            if (!known(total)) candidates.push_back(std::move(total));
        }
        if (candidates.empty()) break;
        auto best = std::min_element(candidates.begin(), candidates.end(),
                                     [](const Path& a, const Path& b) { return a.hop_count() < b.hop_count(); });
        found.push_back(std::move(*best));
        candidates.erase(best);
    }
    return found;
}

std::vector<Path> PathFinder::find_paths(const ConceptSet& cq, const ConceptSet& ca, const PathQueryConfig& cfg) const {
    if (cfg.k < 1) throw ValidationError("k must be >= 1");
    if (cfg.max_pairs < 1) throw ValidationError("max_pairs must be >= 1");
    std::vector<Path> out;
    std::size_t pairs = 0;
    for (const auto& q : cq.concepts) {
        for (const auto& a : ca.concepts) {
            if (pairs == cfg.max_pairs) return out;
            ++pairs;
            if (cfg.per_pair_paths == 1) {
                if (auto p = shortest_path(q.id, a.id, cfg.k)) out.push_back(std::move(*p));
            } else {
                auto ps = shortest_paths(q.id, a.id, cfg.k, cfg.per_pair_paths);
                std::move(ps.begin(), ps.end(), std::back_inserter(out));
            }
        }
    }
    return out;
}

std::optional<Path> shortest_path(const KnowledgeGraph& graph, ConceptId src, ConceptId dst, std::size_t k) {
    return PathFinder(graph).shortest_path(src, dst, k);
}

std::vector<Path> find_paths(const KnowledgeGraph& graph, const ConceptSet& cq, const ConceptSet& ca,
                             const PathQueryConfig& cfg) {
    return PathFinder(graph).find_paths(cq, ca, cfg);
}

Subgraph subgraph_from_paths(const std::vector<Path>& paths) {
    Subgraph sub;
    std::unordered_set<ConceptId> seen_nodes;
    std::set<std::tuple<std::uint32_t, std::string, std::uint32_t>> seen_edges;
    for (const auto& p : paths) {
        for (auto n : p.nodes()) {
            if (seen_nodes.insert(n).second) sub.nodes.push_back(n);
        }
        for (const auto& t : p.triples) {
            auto key = t.relation.reversed ? std::make_tuple(t.tail.value, t.relation.name, t.head.value)
                                           : std::make_tuple(t.head.value, t.relation.name, t.tail.value);
            if (seen_edges.insert(std::move(key)).second) sub.edges.push_back(t);
        }
    }
    sub.provenance = paths;
    return sub;
}

Subgraph to_undirected(Subgraph sub) {
    for (auto& t : sub.edges) t.relation.reversed = false;
    for (auto& p : sub.provenance) p = to_undirected(std::move(p));
    return sub;
}

Path to_undirected(Path path) {
    for (auto& t : path.triples) t.relation.reversed = false;
    return path;
}

}  // namespace kgalign
