#include "kgalign/cli.hpp"
#include "kgalign/pipeline.hpp"
#include "test_util.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

using namespace kgalign;
using nlohmann::json;

namespace {

struct Run {
    int status = -1;
    std::string out;
    std::string err;
};

Run run(const kgtest::TempDir& dir, const std::string& args) {
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    const std::string cmd = std::string("'") + KGALIGN_CLI + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int raw = std::system(cmd.c_str());
    Run r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = kgtest::read_file(out);
    r.err = kgtest::read_file(err);
    return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::vector<json> read_jsonl(const std::filesystem::path& p) {
    std::istringstream in(kgtest::read_file(p));
    std::vector<json> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(json::parse(line));
    }
    return out;
}

}  // namespace

TEST_CASE("ingest, align and stats through the executable") {
    const kgtest::TempDir dir;
    const auto idx = dir / "mini.idx";
    const auto fx = kgtest::fixtures();

    auto r = run(dir, "--index " + q(idx) + " ingest " + q(fx + "/mini_graph.tsv"));
    REQUIRE(r.status == 0);
    CHECK(r.out == "119 nodes, 100 edges, 0 skipped rows, 0 duplicate rows\n");

    const auto records = dir / "records.jsonl";
    r = run(dir, "--index " + q(idx) + " --workers 3 align " + q(fx + "/stance_samples.tsv") + " -o " + q(records));
    REQUIRE(r.status == 0);
    CHECK(r.out.find("aligned 25 samples with approach enhanced (0 failed)") == 0);
    const auto rows = read_jsonl(records);
    REQUIRE(rows.size() == 25);
    CHECK(rows[0]["id"] == "s0");
    CHECK(rows[0]["linearized"] == "organ transplant capable of save lives");

    // Byte-identical to the library with the same settings.
    const auto graph = load_index(idx);
    const HashedNgramEmbedder e;
    const Aligner aligner(graph, e, nullptr, {});
    CHECK(kgtest::read_file(records) == [&] {
        std::string s;
        for (const auto& l : aligner.align_batch(load_samples(fx + "/stance_samples.tsv"))) s += l + "\n";
        return s;
    }());

    const auto gold = dir / "gold.jsonl";
    r = run(dir, "--index " + q(idx) + " --approach gold align " + q(fx + "/choice_samples.jsonl") + " -o " + q(gold));
    REQUIRE(r.status == 0);
    kgtest::write_file(dir / "both.jsonl", kgtest::read_file(records) + kgtest::read_file(gold));

    r = run(dir, "stats " + q(dir / "both.jsonl") + " --out " + q(dir / "report"));
    REQUIRE(r.status == 0);
    CHECK(r.out.find("Avg. similarity") != std::string::npos);
    CHECK(r.out.find("enhanced") < r.out.find("gold"));
    const auto tsv = kgtest::read_file(dir / "report.tsv");
    CHECK(tsv.find("enhanced\t25\t") != std::string::npos);
    CHECK(tsv.find("gold\t25\t") != std::string::npos);
    const auto reports = read_jsonl(dir / "report.jsonl");
    REQUIRE(reports.size() == 2);
    CHECK(reports[1]["approach"] == "gold");
    CHECK(reports[1]["sample_count"] == 25);
}

TEST_CASE("config file with flag overrides") {
    const kgtest::TempDir dir;
    const auto idx = dir / "coffee.idx";
    const auto fx = kgtest::fixtures();
    REQUIRE(run(dir, "--index " + q(idx) + " ingest " + q(fx + "/coffee_graph.tsv")).status == 0);

    kgtest::write_file(dir / "kgalign.toml", "index = \"" + idx.string() + "\"\napproach = \"gold\"\nsep-token = \"<s>\"\n");
    const auto out = dir / "out.jsonl";
    auto r = run(dir, "--config " + q(dir / "kgalign.toml") + " align " + q(fx + "/choice_samples.jsonl") + " -o " + q(out));
    REQUIRE(r.status == 0);
    auto rows = read_jsonl(out);
    CHECK(rows[0]["approach"] == "gold");
    CHECK(rows[0]["formatted"][0].get<std::string>().find("<s>") != std::string::npos);

    r = run(dir, "--config " + q(dir / "kgalign.toml") + " --approach basic align " + q(fx + "/choice_samples.jsonl") +
                     " -o " + q(out));
    REQUIRE(r.status == 0);
    rows = read_jsonl(out);
    CHECK(rows[0]["approach"] == "basic");
    CHECK(rows[0]["formatted"][0].get<std::string>().find("<s>") != std::string::npos);
}

TEST_CASE("usage errors") {
    const kgtest::TempDir dir;
    const auto fx = kgtest::fixtures();
    const auto idx = dir / "coffee.idx";
    REQUIRE(run(dir, "--index " + q(idx) + " ingest " + q(fx + "/coffee_graph.tsv")).status == 0);

    auto r = run(dir, "--index " + q(dir / "x.idx") + " ingest " + q(dir / "missing.tsv"));
    CHECK(r.status == 1);
    CHECK(r.err.find("does not exist") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir / "x.idx"));

    r = run(dir, "align " + q(fx + "/stance_samples.tsv") + " -o " + q(dir / "o.jsonl"));
    CHECK(r.status == 2);
    CHECK(r.err.find("--index") != std::string::npos);

    r = run(dir, "--index " + q(idx) + " --approach generated align " + q(fx + "/stance_samples.tsv") + " -o " +
                     q(dir / "o.jsonl"));
    CHECK(r.status == 2);
    CHECK(r.err.find("--generator-stub") != std::string::npos);

    r = run(dir, "--index " + q(idx) + " --approach best align " + q(fx + "/stance_samples.tsv") + " -o " +
                     q(dir / "o.jsonl"));
    CHECK(r.status != 0);

    kgtest::write_file(dir / "corrupt.idx", "KGALIDX");
    r = run(dir, "--index " + q(dir / "corrupt.idx") + " align " + q(fx + "/stance_samples.tsv") + " -o " +
                     q(dir / "o.jsonl"));
    CHECK(r.status == 1);

    CHECK(run(dir, "--index " + q(idx)).status != 0);
}

TEST_CASE("unreachable embedding service fails per record") {
    const kgtest::TempDir dir;
    const auto fx = kgtest::fixtures();
    const auto idx = dir / "coffee.idx";
    REQUIRE(run(dir, "--index " + q(idx) + " ingest " + q(fx + "/coffee_graph.tsv")).status == 0);
    const int port = kgtest::free_port();
    const auto out = dir / "o.jsonl";
    const auto r = run(dir, "--index " + q(idx) + " --timeout 1 --embed-url http://127.0.0.1:" + std::to_string(port) +
                                " align " + q(fx + "/choice_samples.jsonl") + " -o " + q(out));
    CHECK(r.status == 0);
    CHECK(r.out.find("(0 failed)") == std::string::npos);
    // Samples without candidate paths never reach the embedder.
    std::size_t failed = 0;
    for (const auto& row : read_jsonl(out)) {
        if (row.contains("error")) {
            ++failed;
            CHECK(row["error"].get<std::string>().find("127.0.0.1") != std::string::npos);
        } else {
            CHECK(row["triples"].empty());
        }
    }
    CHECK(r.out.find("(" + std::to_string(failed) + " failed)") != std::string::npos);
}

TEST_CASE("serve answers /health") {
    const kgtest::TempDir dir;
    const auto fx = kgtest::fixtures();
    const auto idx = dir / "coffee.idx";
    REQUIRE(run(dir, "--index " + q(idx) + " ingest " + q(fx + "/coffee_graph.tsv")).status == 0);
    const int port = kgtest::free_port();
    const auto log = dir / "serve.log";
    const std::string cmd = std::string("'") + KGALIGN_CLI + "' --index " + q(idx) + " serve --bind 127.0.0.1:" +
                            std::to_string(port) + " >" + q(log) + " 2>&1 & echo $! >" + q(dir / "pid");
    REQUIRE(std::system(cmd.c_str()) == 0);
    for (int i = 0; i < 200 && kgtest::read_file(log).find("serving") == std::string::npos; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(25));
    }
    INFO(kgtest::read_file(log));

    httplib::Client client("127.0.0.1", port);
    client.set_connection_timeout(2);
    client.set_read_timeout(5);
    const auto res = client.Get("/health");
    REQUIRE(res);
    CHECK(json::parse(res->body)["node_count"] == 16);
    const auto kill = "kill " + kgtest::read_file(dir / "pid");
    CHECK(std::system(kill.c_str()) == 0);
}
