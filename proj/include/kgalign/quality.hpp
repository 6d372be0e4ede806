#pragma once
// Broken-triple auditing and per-approach statistics.
//
// A triple is broken when it misses its head or tail, or carries more than
// one relation between the same endpoints; a sample is broken when any of
// its triples is, or when alignment produced nothing at all.

#include "kgalign/corpus.hpp"
#include "kgalign/pruner.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgalign {

enum class BrokenReason { missing_endpoint, multi_edge, empty_result };

std::string_view to_string(BrokenReason r);
std::optional<BrokenReason> broken_reason_from_string(std::string_view s);

/// Triple as produced by any approach; relations lists every relation seen
/// between head and tail.
struct TripleRecord {
    std::string head;
    std::vector<std::string> relations;
    std::string tail;
};

TripleRecord to_record(const TextTriple& t);
std::vector<TripleRecord> to_records(std::span<const TextTriple> triples);

std::optional<BrokenReason> audit_triple(const TripleRecord& t);

/// empty_result for no triples; otherwise the first broken triple's reason,
/// or multi_edge when two triples connect the same (unordered) endpoint pair
/// with different relations.
std::optional<BrokenReason> audit_sample(std::span<const TripleRecord> triples);

struct SampleAlignment {
    std::string context;
    std::vector<TripleRecord> triples;
    std::string linearized;
};

struct QualityReport {
    std::string approach;
    std::size_t sample_count = 0;
    double avg_triples = 0.0;
    double broken_fraction = 0.0;
    double avg_similarity = 0.0;
};

/// Throws ValidationError for an empty sample list. Similarity of an empty
/// linearization counts as 0. Values do not depend on sample order.
QualityReport report(std::span<const SampleAlignment> samples, std::string_view approach,
                     const EmbeddingProvider& provider);

/// Aligned plain-text table, broken triples as percentages.
std::string render_table(std::span<const QualityReport> reports);

/// Header line plus one tab-separated row per report.
std::string render_tsv(std::span<const QualityReport> reports);

/// One JSON object per line.
std::string render_jsonl(std::span<const QualityReport> reports);

}  // namespace kgalign
