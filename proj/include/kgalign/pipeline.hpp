#pragma once
// End-to-end alignment of one dataset sample into a JSON record:
// link -> paths -> prune -> linearize -> audit -> format.

#include "kgalign/corpus.hpp"
#include "kgalign/generator.hpp"
#include "kgalign/kg_store.hpp"
#include "kgalign/linker.hpp"
#include "kgalign/pathfinder.hpp"
#include "kgalign/pruner.hpp"
#include "kgalign/quality.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kgalign {

enum class Approach { basic, enhanced, generated, generated_gold, gold, none };

std::string_view to_string(Approach a);
std::optional<Approach> approach_from_string(std::string_view s);
bool needs_generator(Approach a);

struct PipelineConfig {
    Approach approach = Approach::enhanced;
    PathQueryConfig paths;
    std::size_t top_n = 1;
    std::size_t max_ngram = kDefaultMaxNgram;
    std::string sep_token = "[SEP]";
};

using Sample = std::variant<StanceSample, ChoiceSample>;

/// Stateless over its (immutable) inputs; align() may be called from many
/// threads at once.
class Aligner {
public:
    /// generator may be null unless a generated approach is requested.
    Aligner(const KnowledgeGraph& graph, const EmbeddingProvider& provider, const PathGenerator* generator,
            PipelineConfig config);

    /// Aligns with config().approach. Throws ValidationError for unusable
    /// input and ProviderError when a backend fails.
    nlohmann::json align(const Sample& sample) const;
    nlohmann::json align(const Sample& sample, Approach approach) const;

    /// Like align(), but failures become a record with an "error" field.
    nlohmann::json align_or_error(const Sample& sample, Approach approach) const;

    /// One serialized record per sample, in input order, computed by
    /// `workers` threads.
    std::vector<std::string> align_batch(const std::vector<Sample>& samples, std::size_t workers = 1) const;

    const PipelineConfig& config() const noexcept { return config_; }
    const KnowledgeGraph& graph() const noexcept { return *graph_; }

private:
    const KnowledgeGraph* graph_;
    const EmbeddingProvider* provider_;
    const PathGenerator* generator_;
    PipelineConfig config_;
    ConceptLinker linker_;
    PathFinder finder_;
};

/// Rebuilds the inputs of a quality report from an align record.
SampleAlignment sample_alignment_from_record(const nlohmann::json& record);

}  // namespace kgalign
