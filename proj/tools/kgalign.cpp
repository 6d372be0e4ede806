// kgalign: align text with a commonsense knowledge graph.
//
//   kgalign ingest DUMP --index OUT
//   kgalign align DATASET -o RECORDS --index IDX [--approach enhanced ...]
//   kgalign stats RECORDS [--out PREFIX]
//   kgalign serve --index IDX --bind 127.0.0.1:8080
//
// Pipeline options may come from a TOML/INI file given with --config;
// command-line flags override it.

#include "kgalign/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace kgalign;

    CLI::App app{"Text-to-knowledge-graph alignment engine"};
    app.set_config("--config", "", "Key-value config file (TOML/INI); flags override it");
    app.require_subcommand(1);

    CliSettings s;
    std::string approach = "enhanced";
    std::string index;
    app.add_option("--index", index, "Binary graph index");
    app.add_option("--approach", approach, "basic|enhanced|generated|generated_gold|gold|none")
        ->check(CLI::IsMember({"basic", "enhanced", "generated", "generated_gold", "gold", "none"}));
    app.add_option("-k,--max-hops", s.pipeline.paths.k, "Maximum hops per path")->check(CLI::PositiveNumber);
    app.add_option("--max-pairs", s.pipeline.paths.max_pairs, "Cap on (q, a) concept pairs")->check(CLI::PositiveNumber);
    app.add_option("--per-pair-paths", s.pipeline.paths.per_pair_paths, "Paths kept per pair")->check(CLI::PositiveNumber);
    app.add_option("--top-n", s.pipeline.top_n, "Candidates kept after pruning")->check(CLI::PositiveNumber);
    app.add_option("--max-ngram", s.pipeline.max_ngram, "Longest n-gram for enhanced linking")->check(CLI::PositiveNumber);
    app.add_option("--sep-token", s.pipeline.sep_token, "Separator token in formatted sequences");
    app.add_option("--embed-url", s.embed_url, "Remote embedding service (default: built-in hashed embedder)");
    app.add_option("--embed-dim", s.embed_dim, "Expected remote embedding dim (0 = accept reported)");
    app.add_option("--generator-url", s.generator_url, "Remote path-generation service");
    app.add_flag("--generator-stub", s.generator_stub, "Use the deterministic stub generator");
    app.add_option("--timeout", s.timeout_seconds, "Remote call timeout in seconds");
    app.add_option("--workers", s.workers, "Worker threads for batch alignment")->check(CLI::PositiveNumber);
    app.add_option("--task", s.task, "stance|choice (default: from dataset extension)")
        ->check(CLI::IsMember({"stance", "choice"}));

    auto* ingest = app.add_subcommand("ingest", "Ingest a triple dump into a binary index");
    std::string dump;
    std::string delimiter = "\t";
    ingest->add_option("dump", dump, "Delimiter-separated triple dump")->required();
    ingest->add_option("--delimiter", delimiter, "Column delimiter (default tab)");

    auto* align = app.add_subcommand("align", "Align a dataset and write JSON-lines records");
    std::string dataset;
    std::string out_path;
    align->add_option("dataset", dataset, "Stance .tsv or choice .jsonl file")->required()->check(CLI::ExistingFile);
    align->add_option("-o,--output", out_path, "Output records (JSON lines)")->required();

    auto* stats = app.add_subcommand("stats", "Quality statistics over align records");
    std::string records;
    std::string stats_out;
    stats->add_option("records", records, "Align records (JSON lines)")->required()->check(CLI::ExistingFile);
    stats->add_option("--out", stats_out, "Also write <prefix>.tsv and <prefix>.jsonl");

    auto* serve = app.add_subcommand("serve", "Serve /health and /align over HTTP");
    std::string bind = "127.0.0.1:8080";
    serve->add_option("--bind", bind, "host:port");

    for (auto* sub : {ingest, align, stats, serve}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    s.pipeline.approach = *approach_from_string(approach);
    s.index = index;
    const auto need_index = [&] {
        if (index.empty()) {
            std::cerr << "error: --index is required\n";
            return false;
        }
        return true;
    };

    if (*ingest) {
        if (!need_index()) return 2;
        if (delimiter.size() != 1) {
            std::cerr << "error: --delimiter must be a single character\n";
            return 2;
        }
        return cmd_ingest(dump, index, delimiter[0], std::cout, std::cerr);
    }
    if (*align) {
        if (!need_index()) return 2;
        return cmd_align(s, dataset, out_path, std::cout, std::cerr);
    }
    if (*stats) return cmd_stats(s, records, stats_out, std::cout, std::cerr);
    if (*serve) {
        if (!need_index()) return 2;
        return cmd_serve(s, bind, std::cout, std::cerr);
    }
    return 2;
}
