#include "kgalign/pipeline.hpp"

#include "kgalign/errors.hpp"

#include <atomic>
#include <thread>

namespace kgalign {

using nlohmann::json;

std::string_view to_string(Approach a) {
    switch (a) {
        case Approach::basic: return "basic";
        case Approach::enhanced: return "enhanced";
        case Approach::generated: return "generated";
        case Approach::generated_gold: return "generated_gold";
        case Approach::gold: return "gold";
        case Approach::none: return "none";
    }
    return "unknown";
}

std::optional<Approach> approach_from_string(std::string_view s) {
    for (auto a : {Approach::basic, Approach::enhanced, Approach::generated, Approach::generated_gold, Approach::gold,
                   Approach::none}) {
        if (to_string(a) == s) return a;
    }
    return std::nullopt;
}

bool needs_generator(Approach a) { return a == Approach::generated || a == Approach::generated_gold; }

namespace {

struct Outcome {
    ConceptSet cq{Side::query, {}};
    ConceptSet ca{Side::answer, {}};
    std::size_t candidates = 0;
    std::vector<TextTriple> triples;
    std::vector<TripleRecord> records;
    std::string linearized;
    std::optional<double> score;
    std::optional<GeneratorRequest> request;
    bool audited = true;
};

json concept_labels(const ConceptSet& cs) {
    json out = json::array();
    for (const auto& c : cs.concepts) out.push_back(c.matched);
    return out;
}

const GoldGraph* gold_of(const Sample& sample) {
    if (const auto* s = std::get_if<StanceSample>(&sample)) return &s->gold_graph;
    const auto& c = std::get<ChoiceSample>(sample);
    if (c.gold_graphs.empty()) return nullptr;
    return &select_best_graph(c);
}

const std::string& id_of(const Sample& sample) {
    return std::visit([](const auto& s) -> const std::string& { return s.id; }, sample);
}

std::string_view task_of(const Sample& sample) {
    return std::holds_alternative<StanceSample>(sample) ? "stance" : "choice";
}

}  // namespace

Aligner::Aligner(const KnowledgeGraph& graph, const EmbeddingProvider& provider, const PathGenerator* generator,
                 PipelineConfig config)
    : graph_(&graph),
      provider_(&provider),
      generator_(generator),
      config_(std::move(config)),
      linker_(graph),
      finder_(graph) {
    if (config_.top_n == 0) throw ValidationError("top_n must be >= 1");
    if (config_.paths.k == 0) throw ValidationError("k must be >= 1");
    if (config_.paths.max_pairs == 0) throw ValidationError("max_pairs must be >= 1");
    if (config_.paths.per_pair_paths == 0) throw ValidationError("per_pair_paths must be >= 1");
    if (config_.max_ngram == 0) throw ValidationError("max_ngram must be >= 1");
    if (config_.sep_token.empty()) throw ValidationError("sep_token must be non-empty");
}

json Aligner::align(const Sample& sample) const { return align(sample, config_.approach); }

json Aligner::align(const Sample& sample, Approach approach) const {
    const AlignmentQuery q = std::visit([](const auto& s) { return build_query(s); }, sample);
    if (needs_generator(approach) && generator_ == nullptr) {
        throw ValidationError(std::string("approach ") + std::string(to_string(approach)) +
                              " needs a generator endpoint or the stub generator");
    }

    Outcome o;
    const auto score_text = [&](const std::string& text) -> std::optional<double> {
        if (text.empty()) return std::nullopt;
        const std::string texts[] = {q.context, text};
        const auto v = provider_->embed_batch(texts);
        return cosine(v[0], v[1]).value;
    };
    const auto run_generator = [&](std::optional<GeneratorRequest> req) {
        o.request = std::move(req);
        if (!o.request) return;
        const auto gen = generator_->generate(*o.request);
        o.triples = gen.segments;
        o.records = to_records(gen.segments);
        o.linearized = gen.parsed ? linearize(*gen.parsed) : normalize_label(gen.text);
        o.score = score_text(o.linearized);
    };

    switch (approach) {
        case Approach::basic:
        case Approach::enhanced: {
            if (approach == Approach::basic) {
                o.cq = linker_.link_basic(q.q_text, Side::query);
                o.ca = linker_.link_basic(q.a_text, Side::answer);
            } else {
                o.cq = linker_.link_enhanced(q.q_text, config_.max_ngram, Side::query);
                o.ca = linker_.link_enhanced(q.a_text, config_.max_ngram, Side::answer);
            }
            const auto candidates = finder_.find_paths(o.cq, o.ca, config_.paths);
            o.candidates = candidates.size();
            const auto pruned = prune(*graph_, candidates, q.context, *provider_, config_.top_n);
            std::vector<Path> selected;
            for (const auto& sp : pruned) selected.push_back(sp.path);
            const auto sub = to_undirected(subgraph_from_paths(selected));
            o.triples = to_text_triples(*graph_, sub);
            o.records = to_records(o.triples);
            o.linearized = linearize(o.triples);
            if (!pruned.empty() && !o.linearized.empty()) o.score = pruned.front().score;
            break;
        }
        case Approach::generated:
            o.cq = linker_.link_enhanced(q.q_text, config_.max_ngram, Side::query);
            o.ca = linker_.link_enhanced(q.a_text, config_.max_ngram, Side::answer);
            run_generator(select_endpoints_linked(o.cq, o.ca));
            break;
        case Approach::generated_gold: {
            const auto* gold = gold_of(sample);
            run_generator(gold ? select_endpoints_gold(*gold) : std::nullopt);
            break;
        }
        case Approach::gold: {
            if (const auto* gold = gold_of(sample)) o.triples = *gold;
            o.records = to_records(o.triples);
            o.linearized = linearize(o.triples);
            o.score = score_text(o.linearized);
            break;
        }
        case Approach::none:
            o.audited = false;
            break;
    }

    json formatted = json::array();
    if (const auto* s = std::get_if<StanceSample>(&sample)) {
        formatted.push_back(format_stance(s->belief, s->argument, o.linearized, config_.sep_token));
    } else {
        const auto& c = std::get<ChoiceSample>(sample);
        formatted.push_back(format_choice(c.premise, o.linearized, c.alt1, config_.sep_token));
        formatted.push_back(format_choice(c.premise, o.linearized, c.alt2, config_.sep_token));
    }

    json triples = json::array();
    for (const auto& t : o.triples) triples.push_back({{"head", t.head}, {"relation", t.relation}, {"tail", t.tail}});

    json r;
    r["id"] = id_of(sample);
    r["task"] = task_of(sample);
    r["approach"] = to_string(approach);
    r["context"] = q.context;
    r["concepts"] = {{"q", concept_labels(o.cq)}, {"a", concept_labels(o.ca)}};
    r["candidates"] = o.candidates;
    r["request"] = o.request ? json{{"start", o.request->start}, {"end", o.request->end}} : json(nullptr);
    r["triples"] = std::move(triples);
    r["linearized"] = o.linearized;
    r["score"] = o.score ? json(*o.score) : json(nullptr);
    std::optional<BrokenReason> broken;
    if (o.audited) broken = audit_sample(o.records);
    r["broken"] = broken ? json(to_string(*broken)) : json(nullptr);
    r["formatted"] = std::move(formatted);
    return r;
}

json Aligner::align_or_error(const Sample& sample, Approach approach) const {
    try {
        return align(sample, approach);
    } catch (const std::exception& e) {
        json r;
        r["id"] = id_of(sample);
        r["task"] = task_of(sample);
        r["approach"] = to_string(approach);
        r["error"] = e.what();
        return r;
    }
}

std::vector<std::string> Aligner::align_batch(const std::vector<Sample>& samples, std::size_t workers) const {
    std::vector<std::string> out(samples.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < samples.size(); i = next++) {
            out[i] = align_or_error(samples[i], config_.approach).dump();
        }
    };
    workers = std::max<std::size_t>(1, std::min(workers, samples.size()));
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    return out;
}

SampleAlignment sample_alignment_from_record(const json& record) {
    SampleAlignment s;
    if (!record.is_object()) throw ValidationError("align record is not a JSON object");
    s.context = record.value("context", "");
    s.linearized = record.value("linearized", "");
    if (record.contains("triples") && record["triples"].is_array()) {
        for (const auto& t : record["triples"]) {
            TripleRecord tr{t.value("head", ""), {}, t.value("tail", "")};
            if (t.contains("relations") && t["relations"].is_array()) {
                for (const auto& rel : t["relations"]) tr.relations.push_back(rel.get<std::string>());
            } else if (!t.value("relation", "").empty()) {
                tr.relations.push_back(t.value("relation", ""));
            }
            s.triples.push_back(std::move(tr));
        }
    }
    return s;
}

}  // namespace kgalign
