#pragma once
// Immutable, indexed in-memory knowledge graph.
//
// Layout:
// - labels are packed into one byte blob addressed by an offset table;
//   label_index maps normalized label views back to dense ids
// - relation names are sorted, so relation id order == name order
// - edges are canonical (head, relation, tail, weight), deduplicated
// - adjacency is CSR: every edge appears once in each endpoint's slice,
//   the tail-side entry (or the head-side entry of a "_"-prefixed dump row)
//   carrying reversed=true
//
// The graph is never mutated after GraphBuilder::finish or load_index, so
// every const member is safe to call from any number of threads.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgalign {

/// Dense 0-based node handle.
struct ConceptId {
    std::uint32_t value = 0;

    friend auto operator<=>(const ConceptId&, const ConceptId&) = default;
};

struct RelationType {
    std::string name;
    bool reversed = false;

    friend bool operator==(const RelationType&, const RelationType&) = default;
};

struct Triple {
    ConceptId head;
    RelationType relation;
    ConceptId tail;
    double weight = 1.0;

    friend bool operator==(const Triple&, const Triple&) = default;
};

struct Neighbor {
    ConceptId id;
    RelationType relation;
    double weight = 1.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Lowercases ASCII, maps '_' to ' ', collapses whitespace runs and strips
/// leading/trailing punctuation and whitespace. Idempotent.
std::string normalize_label(std::string_view raw);

/// normalize_label after splitting camel case: "AtLocation" -> "at location".
std::string normalize_relation(std::string_view raw);

class KnowledgeGraph {
public:
    /// One canonical edge. relation indexes relation_name().
    struct Edge {
        std::uint32_t head = 0;
        std::uint32_t tail = 0;
        std::uint32_t relation = 0;
        std::uint32_t pad = 0;
        double weight = 1.0;

        friend bool operator==(const Edge&, const Edge&) = default;
    };

    /// One adjacency slot. edge indexes edges().
    struct Slot {
        std::uint32_t neighbor = 0;
        std::uint32_t relation = 0;
        std::uint32_t edge = 0;
        std::uint32_t reversed = 0;

        friend bool operator==(const Slot&, const Slot&) = default;
    };

    KnowledgeGraph() = default;
    KnowledgeGraph(KnowledgeGraph&&) noexcept = default;
    KnowledgeGraph& operator=(KnowledgeGraph&&) noexcept = default;
    KnowledgeGraph(const KnowledgeGraph&) = delete;
    KnowledgeGraph& operator=(const KnowledgeGraph&) = delete;

    std::size_t node_count() const noexcept { return label_offsets_.empty() ? 0 : label_offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::size_t relation_count() const noexcept { return relations_.size(); }

    bool contains(ConceptId id) const noexcept { return id.value < node_count(); }

    /// Throws InvalidHandle for out-of-range ids.
    std::string_view label(ConceptId id) const;

    /// Exact lookup of an already-normalized label.
    std::optional<ConceptId> find(std::string_view normalized) const;

    const std::string& relation_name(std::uint32_t relation) const { return relations_.at(relation); }
    std::optional<std::uint32_t> find_relation(std::string_view name) const;

    std::span<const Edge> edges() const noexcept { return edges_; }

    /// Raw adjacency slice, sorted by (neighbor, relation, reversed).
    /// Throws InvalidHandle.
    std::span<const Slot> adjacency(ConceptId id) const;

    /// Materialized adjacency list in the same order.
    std::vector<Neighbor> neighbors(ConceptId id) const;

    /// Materializes the triple seen when walking slot s from node `from`.
    Triple walk(ConceptId from, const Slot& s) const;

    /// Logical equality: labels, relations, edges, weights and flags.
    bool operator==(const KnowledgeGraph& other) const;

private:
    friend class GraphBuilder;
    friend KnowledgeGraph load_index(const std::filesystem::path&);
    friend void save_index(const KnowledgeGraph&, const std::filesystem::path&);

    void rebuild_label_index();

    std::vector<char> label_blob_;
    std::vector<std::uint64_t> label_offsets_{0};
    std::unordered_map<std::string_view, std::uint32_t> label_index_;
    std::vector<std::string> relations_;
    std::vector<Edge> edges_;
    std::vector<std::uint64_t> slot_offsets_{0};
    std::vector<Slot> slots_;
};

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t rows_skipped = 0;
    std::size_t duplicates = 0;
};

/// Accumulates dump rows, then freezes them into a KnowledgeGraph.
class GraphBuilder {
public:
    /// Adds one row. Returns false (and counts it as skipped) when the row
    /// is malformed: an empty endpoint or relation after normalization, or
    /// a negative / non-finite weight.
    bool add(std::string_view head, std::string_view relation, std::string_view tail,
             double weight = 1.0);

    /// Parses one delimiter-separated line (3 or 4 columns) and adds it.
    bool add_line(std::string_view line, char delimiter = '\t');

    void count_skipped() { ++report_.rows_read; ++report_.rows_skipped; }

    const IngestReport& report() const noexcept { return report_; }

    /// Deduplicates (keeping max weight), builds the indexes and resets the
    /// builder.
    KnowledgeGraph finish();

private:
    std::uint32_t intern_node(std::string&& label);
    std::uint32_t intern_relation(std::string&& name);

    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::uint32_t> label_ids_;
    std::vector<std::string> relations_;
    std::unordered_map<std::string, std::uint32_t> relation_ids_;
    std::vector<KnowledgeGraph::Edge> edges_;
    IngestReport report_;
};

struct IngestResult {
    KnowledgeGraph graph;
    IngestReport report;
};

struct DumpRow {
    std::string head;
    std::string relation;
    std::string tail;
    double weight = 1.0;
};

IngestResult ingest(std::span<const DumpRow> rows);

/// Reads a delimiter-separated dump, one triple per line. Blank lines and
/// lines starting with '#' are ignored and not counted.
IngestResult ingest(std::istream& in, char delimiter = '\t');

IngestResult ingest_file(const std::filesystem::path& path, char delimiter = '\t');

std::optional<ConceptId> lookup_exact(const KnowledgeGraph& graph, std::string_view phrase);

inline std::vector<Neighbor> neighbors(const KnowledgeGraph& graph, ConceptId id) {
    return graph.neighbors(id);
}

inline constexpr std::uint32_t kIndexFormatVersion = 1;

void save_index(const KnowledgeGraph& graph, const std::filesystem::path& path);

/// Throws FormatError on bad magic, version mismatch, truncation or checksum
/// failure. Never returns a partially loaded graph.
KnowledgeGraph load_index(const std::filesystem::path& path);

}  // namespace kgalign

template <>
struct std::hash<kgalign::ConceptId> {
    std::size_t operator()(const kgalign::ConceptId& id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value);
    }
};
