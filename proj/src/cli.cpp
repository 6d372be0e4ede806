#include "kgalign/cli.hpp"

#include "kgalign/errors.hpp"
#include "kgalign/service.hpp"

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

namespace kgalign {

using nlohmann::json;

std::unique_ptr<EmbeddingProvider> make_provider(const CliSettings& settings) {
    if (settings.embed_url.empty()) return std::make_unique<HashedNgramEmbedder>();
    return std::make_unique<RemoteEmbedder>(settings.embed_url, settings.embed_dim, settings.timeout_seconds);
}

std::unique_ptr<PathGenerator> make_generator(const CliSettings& settings) {
    if (!settings.generator_url.empty()) return std::make_unique<RemoteGenerator>(settings.generator_url, settings.timeout_seconds);
    if (settings.generator_stub) return std::make_unique<StubGenerator>();
    return nullptr;
}

std::vector<Sample> load_samples(const std::filesystem::path& dataset, const std::string& task) {
    std::string kind = task;
    if (kind.empty()) {
        const auto ext = dataset.extension().string();
        if (ext == ".tsv") kind = "stance";
        else if (ext == ".jsonl" || ext == ".json") kind = "choice";
        else throw ValidationError("cannot infer task from '" + dataset.string() + "'; pass --task");
    }
    std::vector<Sample> out;
    if (kind == "stance") {
        for (auto& s : load_stance_tsv(dataset)) out.emplace_back(std::move(s));
    } else if (kind == "choice") {
        for (auto& s : load_choice_jsonl(dataset)) out.emplace_back(std::move(s));
    } else {
        throw ValidationError("unknown task '" + kind + "'");
    }
    return out;
}

int cmd_ingest(const std::filesystem::path& dump, const std::filesystem::path& index, char delimiter,
               std::ostream& out, std::ostream& err) {
    try {
        if (!std::filesystem::is_regular_file(dump)) {
            err << "error: dump '" << dump.string() << "' does not exist\n";
            return 1;
        }
        auto result = ingest_file(dump, delimiter);
        save_index(result.graph, index);
        out << result.graph.node_count() << " nodes, " << result.graph.edge_count() << " edges, "
            << result.report.rows_skipped << " skipped rows, " << result.report.duplicates << " duplicate rows\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_align(const CliSettings& settings, const std::filesystem::path& dataset,
              const std::filesystem::path& out_path, std::ostream& out, std::ostream& err) {
    try {
        if (needs_generator(settings.pipeline.approach) && settings.generator_url.empty() && !settings.generator_stub) {
            err << "error: approach " << to_string(settings.pipeline.approach)
                << " needs --generator-url or --generator-stub\n";
            return 2;
        }
        const auto samples = load_samples(dataset, settings.task);
        const auto graph = load_index(settings.index);
        const auto provider = make_provider(settings);
        const auto generator = make_generator(settings);
        const Aligner aligner(graph, *provider, generator.get(), settings.pipeline);

        const auto lines = aligner.align_batch(samples, settings.workers);
        std::ofstream file(out_path, std::ios::trunc);
        if (!file) throw Error("cannot write '" + out_path.string() + "'");
        std::size_t failed = 0;
        for (const auto& l : lines) {
            file << l << '\n';
            if (l.find("\"error\":") != std::string::npos) ++failed;
        }
        file.flush();
        if (!file) throw Error("failed writing '" + out_path.string() + "'");
        out << "aligned " << lines.size() << " samples with approach " << to_string(settings.pipeline.approach)
            << " (" << failed << " failed) -> " << out_path.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_stats(const CliSettings& settings, const std::filesystem::path& records,
              const std::filesystem::path& out_prefix, std::ostream& out, std::ostream& err) {
    try {
        std::ifstream in(records);
        if (!in) throw Error("cannot open '" + records.string() + "'");
        // Group by approach, keeping first-appearance order.
        std::vector<std::string> order;
        std::map<std::string, std::vector<SampleAlignment>> groups;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error& e) {
                throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
            }
            const auto approach = j.value("approach", "unknown");
            if (!groups.contains(approach)) order.push_back(approach);
            groups[approach].push_back(sample_alignment_from_record(j));
        }
        if (order.empty()) throw ValidationError("no records in '" + records.string() + "'");

        const auto provider = make_provider(settings);
        std::vector<QualityReport> reports;
        for (const auto& a : order) reports.push_back(report(groups[a], a, *provider));
        out << render_table(reports);
        if (!out_prefix.empty()) {
            std::ofstream tsv(out_prefix.string() + ".tsv", std::ios::trunc);
            std::ofstream jsonl(out_prefix.string() + ".jsonl", std::ios::trunc);
            if (!tsv || !jsonl) throw Error("cannot write '" + out_prefix.string() + ".{tsv,jsonl}'");
            tsv << render_tsv(reports);
            jsonl << render_jsonl(reports);
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

}  // namespace

int cmd_serve(const CliSettings& settings, const std::string& bind, std::ostream& out, std::ostream& err) {
    try {
        const auto colon = bind.rfind(':');
        if (colon == std::string::npos) throw ValidationError("bind address must be host:port");
        const std::string host = bind.substr(0, colon);
        const int port = std::stoi(bind.substr(colon + 1));

        const auto graph = load_index(settings.index);
        const auto provider = make_provider(settings);
        const auto generator = make_generator(settings);
        const Aligner aligner(graph, *provider, generator.get(), settings.pipeline);
        const AlignService service(aligner);
        HttpServer server(service, host, port);
        out << "serving " << graph.node_count() << " nodes on " << host << ':' << server.port() << std::endl;

        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        server.stop();
        server.wait();
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace kgalign
