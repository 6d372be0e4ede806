#pragma once
// Linearization of paths and embedding-similarity pruning of candidates.

#include "kgalign/corpus.hpp"
#include "kgalign/kg_store.hpp"
#include "kgalign/pathfinder.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgalign {

// ---------------------------------------------------------------------------
// Linearization: "head relation tail" per triple, joined by ", ".

std::vector<TextTriple> to_text_triples(const KnowledgeGraph& graph, const Path& path);
std::vector<TextTriple> to_text_triples(const KnowledgeGraph& graph, const Subgraph& sub);

std::string linearize(std::span<const TextTriple> triples);
std::string linearize(const KnowledgeGraph& graph, const Path& path);
std::string linearize(const KnowledgeGraph& graph, const Subgraph& sub);

// ---------------------------------------------------------------------------
// Embeddings

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const noexcept { return values.size(); }
    bool is_zero() const noexcept;
};

/// Implementations must be deterministic per input text and safe to call
/// from several threads.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::string name() const = 0;
    virtual std::size_t dim() const = 0;
    virtual EmbeddingVector embed(std::string_view text) const = 0;

    /// Default loops over embed().
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const;
};

/// Hashed character n-gram term frequencies, L2-normalized.
///
/// The text is ASCII-lowercased and padded with one space on each side;
/// every byte n-gram with 3 <= n <= 5 adds 1 to bucket
/// fnv1a64(ngram) % 1024. Empty text gives the zero vector.
class HashedNgramEmbedder final : public EmbeddingProvider {
public:
    static constexpr std::size_t kDim = 1024;
    static constexpr std::size_t kMinN = 3;
    static constexpr std::size_t kMaxN = 5;

    std::string name() const override { return "hashed-char-ngram-3-5-d1024"; }
    std::size_t dim() const override { return kDim; }
    EmbeddingVector embed(std::string_view text) const override;
};

/// Client for the HTTP embedding protocol:
///   POST /embed {"texts": [...]} -> {"dim": int, "vectors": [[...], ...]}
/// Any transport failure, non-200 status, malformed body, vector count or
/// dim mismatch raises ProviderError.
class RemoteEmbedder final : public EmbeddingProvider {
public:
    /// base_url like "http://127.0.0.1:8081". expected_dim 0 accepts the
    /// dim reported by the service.
    explicit RemoteEmbedder(std::string base_url, std::size_t expected_dim = 0, double timeout_seconds = 30.0);

    std::string name() const override { return "remote:" + base_url_; }
    std::size_t dim() const override { return expected_dim_; }
    EmbeddingVector embed(std::string_view text) const override;
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

private:
    std::string base_url_;
    std::size_t expected_dim_;
    double timeout_seconds_;
};

struct Similarity {
    double value = 0.0;
    bool zero_vector = false;  // one side was the zero vector; value is 0
};

/// Cosine similarity clamped to [-1, 1]. Throws ValidationError when the
/// dims differ.
Similarity cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// ---------------------------------------------------------------------------
// Pruning

struct RankedText {
    std::size_t index = 0;  // position in the candidate list
    double score = 0.0;
};

/// Scores every text against the context; returns the top_n by score,
/// descending, ties keeping candidate order. Throws ValidationError for
/// top_n == 0.
std::vector<RankedText> rank_by_similarity(std::span<const std::string> texts, std::string_view context,
                                           const EmbeddingProvider& provider, std::size_t top_n = 1);

struct ScoredPath {
    Path path;
    std::string text;
    double score = 0.0;
};

std::vector<ScoredPath> prune(const KnowledgeGraph& graph, const std::vector<Path>& candidates,
                              std::string_view context, const EmbeddingProvider& provider, std::size_t top_n = 1);

}  // namespace kgalign
