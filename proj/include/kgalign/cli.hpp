#pragma once
// Subcommands behind the kgalign executable. Each returns a process exit
// code and reports problems on `err`.

#include "kgalign/pipeline.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace kgalign {

struct CliSettings {
    std::filesystem::path index;
    PipelineConfig pipeline;
    std::string embed_url;  // empty: built-in hashed embedder
    std::size_t embed_dim = 0;
    std::string generator_url;
    bool generator_stub = false;
    double timeout_seconds = 30.0;
    std::size_t workers = 1;
    std::string task;  // "stance", "choice" or "" to infer from the extension
};

std::unique_ptr<EmbeddingProvider> make_provider(const CliSettings& settings);

/// nullptr when neither a URL nor the stub is configured.
std::unique_ptr<PathGenerator> make_generator(const CliSettings& settings);

/// ".tsv" -> stance samples, ".jsonl" / ".json" -> choice samples, unless
/// task is set.
std::vector<Sample> load_samples(const std::filesystem::path& dataset, const std::string& task = "");

int cmd_ingest(const std::filesystem::path& dump, const std::filesystem::path& index, char delimiter,
               std::ostream& out, std::ostream& err);

int cmd_align(const CliSettings& settings, const std::filesystem::path& dataset,
              const std::filesystem::path& out_path, std::ostream& out, std::ostream& err);

/// Prints the aligned table to `out`; with a non-empty out_prefix also
/// writes <prefix>.tsv and <prefix>.jsonl.
int cmd_stats(const CliSettings& settings, const std::filesystem::path& records,
              const std::filesystem::path& out_prefix, std::ostream& out, std::ostream& err);

/// Blocks until the process is interrupted.
int cmd_serve(const CliSettings& settings, const std::string& bind, std::ostream& out, std::ostream& err);

}  // namespace kgalign
