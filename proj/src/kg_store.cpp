#include "kgalign/kg_store.hpp"

#include "kgalign/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <tuple>

namespace kgalign {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string_view trim_space(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string normalize_relation(std::string_view raw) {
    std::string split;
    split.reserve(raw.size() + 4);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto c = static_cast<unsigned char>(raw[i]);
        if (i > 0 && std::isupper(c) && std::islower(static_cast<unsigned char>(raw[i - 1]))) split.push_back(' ');
        split.push_back(raw[i]);
    }
    return normalize_label(split);
}

std::string normalize_label(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (c == '_' || is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    std::size_t begin = 0;
    while (begin < out.size() && (is_punct(out[begin]) || out[begin] == ' ')) ++begin;
    std::size_t end = out.size();
    while (end > begin && (is_punct(out[end - 1]) || out[end - 1] == ' ')) --end;
    return out.substr(begin, end - begin);
}

// ---------------------------------------------------------------------------
// KnowledgeGraph

std::string_view KnowledgeGraph::label(ConceptId id) const {
    if (!contains(id)) {
        throw InvalidHandle("concept id " + std::to_string(id.value) + " out of range (node_count " +
                            std::to_string(node_count()) + ")");
    }
    const auto begin = label_offsets_[id.value];
    const auto end = label_offsets_[id.value + 1];
    return {label_blob_.data() + begin, static_cast<std::size_t>(end - begin)};
}

std::optional<ConceptId> KnowledgeGraph::find(std::string_view normalized) const {
    auto it = label_index_.find(normalized);
    if (it == label_index_.end()) return std::nullopt;
    return ConceptId{it->second};
}

std::optional<std::uint32_t> KnowledgeGraph::find_relation(std::string_view name) const {
    auto it = std::lower_bound(relations_.begin(), relations_.end(), name,
                               [](const std::string& a, std::string_view b) { return a < b; });
    if (it == relations_.end() || *it != name) return std::nullopt;
    return static_cast<std::uint32_t>(it - relations_.begin());
}

std::span<const KnowledgeGraph::Slot> KnowledgeGraph::adjacency(ConceptId id) const {
    if (!contains(id)) {
        throw InvalidHandle("concept id " + std::to_string(id.value) + " out of range (node_count " +
                            std::to_string(node_count()) + ")");
    }
    const auto begin = slot_offsets_[id.value];
    const auto end = slot_offsets_[id.value + 1];
    return std::span<const Slot>(slots_).subspan(begin, end - begin);
}

std::vector<Neighbor> KnowledgeGraph::neighbors(ConceptId id) const {
    auto slots = adjacency(id);
    std::vector<Neighbor> out;
    out.reserve(slots.size());
    for (const auto& s : slots) {
        out.push_back(Neighbor{ConceptId{s.neighbor}, RelationType{relations_[s.relation], s.reversed != 0},
                               edges_[s.edge].weight});
    }
    return out;
}

Triple KnowledgeGraph::walk(ConceptId from, const Slot& s) const {
    return Triple{from, RelationType{relations_[s.relation], s.reversed != 0}, ConceptId{s.neighbor},
                  edges_[s.edge].weight};
}

bool KnowledgeGraph::operator==(const KnowledgeGraph& other) const {
    return label_blob_ == other.label_blob_ && label_offsets_ == other.label_offsets_ &&
           relations_ == other.relations_ && edges_ == other.edges_ &&
           slot_offsets_ == other.slot_offsets_ && slots_ == other.slots_;
}

void KnowledgeGraph::rebuild_label_index() {
    label_index_.clear();
    label_index_.reserve(node_count());
    for (std::uint32_t i = 0; i < node_count(); ++i) {
        if (!label_index_.emplace(label(ConceptId{i}), i).second) {
            throw FormatError("duplicate concept label '" + std::string(label(ConceptId{i})) + "'");
        }
    }
}

// ---------------------------------------------------------------------------
// GraphBuilder

std::uint32_t GraphBuilder::intern_node(std::string&& label) {
    auto [it, inserted] = label_ids_.try_emplace(std::move(label), static_cast<std::uint32_t>(labels_.size()));
    if (inserted) labels_.push_back(it->first);
    return it->second;
}

std::uint32_t GraphBuilder::intern_relation(std::string&& name) {
    auto [it, inserted] =
        relation_ids_.try_emplace(std::move(name), static_cast<std::uint32_t>(relations_.size()));
    if (inserted) relations_.push_back(it->first);
    return it->second;
}

bool GraphBuilder::add(std::string_view head, std::string_view relation, std::string_view tail,
                       double weight) {
    ++report_.rows_read;
    relation = trim_space(relation);
    const bool reversed = !relation.empty() && relation.front() == '_';
    if (reversed) relation.remove_prefix(1);

    std::string h = normalize_label(head);
    std::string r = normalize_relation(relation);
    std::string t = normalize_label(tail);
    if (h.empty() || r.empty() || t.empty() || !std::isfinite(weight) || weight < 0.0) {
        ++report_.rows_skipped;
        return false;
    }
    // A reversed row (a, _r, b) is the canonical edge (b, r, a).
    if (reversed) std::swap(h, t);
    const auto hid = intern_node(std::move(h));
    const auto tid = intern_node(std::move(t));
    const auto rid = intern_relation(std::move(r));
    edges_.push_back(KnowledgeGraph::Edge{hid, tid, rid, 0, weight});
    return true;
}

bool GraphBuilder::add_line(std::string_view line, char delimiter) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::string_view cols[5];
    std::size_t n = 0;
    while (n < 5) {
        const auto pos = line.find(delimiter);
        cols[n++] = line.substr(0, pos);
        if (pos == std::string_view::npos) break;
        line.remove_prefix(pos + 1);
        if (n == 5) break;
    }
    if (n < 3 || n > 4) {
        count_skipped();
        return false;
    }
    double weight = 1.0;
    if (n == 4) {
        auto w = trim_space(cols[3]);
        if (!w.empty()) {
            auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), weight);
            if (ec != std::errc{} || ptr != w.data() + w.size()) {
                count_skipped();
                return false;
            }
        }
    }
    return add(cols[0], cols[1], cols[2], weight);
}

KnowledgeGraph GraphBuilder::finish() {
    KnowledgeGraph g;

    // Relation ids follow lexicographic name order.
    std::vector<std::uint32_t> order(relations_.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return relations_[a] < relations_[b]; });
    std::vector<std::uint32_t> remap(relations_.size());
    g.relations_.reserve(relations_.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) {
        remap[order[i]] = i;
        g.relations_.push_back(std::move(relations_[order[i]]));
    }
    for (auto& e : edges_) e.relation = remap[e.relation];

    std::sort(edges_.begin(), edges_.end(), [](const auto& a, const auto& b) {
        return std::tie(a.head, a.tail, a.relation, b.weight) < std::tie(b.head, b.tail, b.relation, a.weight);
    });
    // Sorted with max weight first inside each key, so unique keeps the max.
    auto last = std::unique(edges_.begin(), edges_.end(), [](const auto& a, const auto& b) {
        return a.head == b.head && a.tail == b.tail && a.relation == b.relation;
    });
    report_.duplicates = static_cast<std::size_t>(edges_.end() - last);
    edges_.erase(last, edges_.end());
    edges_.shrink_to_fit();
    g.edges_ = std::move(edges_);

    const std::size_t n = labels_.size();
    g.label_offsets_.reserve(n + 1);
    g.label_offsets_.assign(1, 0);
    std::size_t blob_size = 0;
    for (const auto& l : labels_) blob_size += l.size();
    g.label_blob_.reserve(blob_size);
    for (const auto& l : labels_) {
        g.label_blob_.insert(g.label_blob_.end(), l.begin(), l.end());
        g.label_offsets_.push_back(g.label_blob_.size());
    }

    g.slot_offsets_.assign(n + 1, 0);
    for (const auto& e : g.edges_) {
        ++g.slot_offsets_[e.head + 1];
        ++g.slot_offsets_[e.tail + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.slot_offsets_[i + 1] += g.slot_offsets_[i];
    g.slots_.resize(g.edges_.size() * 2);
    std::vector<std::uint64_t> cursor(g.slot_offsets_.begin(), g.slot_offsets_.end() - (n > 0 ? 1 : 0));
    for (std::uint32_t ei = 0; ei < g.edges_.size(); ++ei) {
        const auto& e = g.edges_[ei];
        g.slots_[cursor[e.head]++] = KnowledgeGraph::Slot{e.tail, e.relation, ei, 0};
        g.slots_[cursor[e.tail]++] = KnowledgeGraph::Slot{e.head, e.relation, ei, 1};
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(g.slots_.begin() + static_cast<std::ptrdiff_t>(g.slot_offsets_[i]),
                  g.slots_.begin() + static_cast<std::ptrdiff_t>(g.slot_offsets_[i + 1]),
                  [](const auto& a, const auto& b) {
                      return std::tie(a.neighbor, a.relation, a.reversed, a.edge) <
                             std::tie(b.neighbor, b.relation, b.reversed, b.edge);
                  });
    }

    labels_.clear();
    label_ids_.clear();
    relations_.clear();
    relation_ids_.clear();
    edges_ = {};
    g.rebuild_label_index();
    return g;
}

// ---------------------------------------------------------------------------
// ingest / lookup

IngestResult ingest(std::span<const DumpRow> rows) {
    GraphBuilder b;
    for (const auto& r : rows) b.add(r.head, r.relation, r.tail, r.weight);
    IngestResult out;
    out.graph = b.finish();
    out.report = b.report();
    return out;
}

IngestResult ingest(std::istream& in, char delimiter) {
    GraphBuilder b;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view v = line;
        if (trim_space(v).empty() || v.front() == '#') continue;
        b.add_line(v, delimiter);
    }
    IngestResult out;
    out.graph = b.finish();
    out.report = b.report();
    return out;
}

IngestResult ingest_file(const std::filesystem::path& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dump '" + path.string() + "'");
    return ingest(in, delimiter);
}

std::optional<ConceptId> lookup_exact(const KnowledgeGraph& graph, std::string_view phrase) {
    return graph.find(normalize_label(phrase));
}

// ---------------------------------------------------------------------------
// Binary index
//
// All integers little-endian (host order; the format is only read back on
// the same architecture). See docs/formats.md.

namespace {

constexpr char kMagic[8] = {'K', 'G', 'A', 'L', 'I', 'D', 'X', '\0'};

struct IndexHeader {
    char magic[8];
    std::uint32_t version;
    std::uint32_t reserved;
    std::uint64_t node_count;
    std::uint64_t relation_count;
    std::uint64_t edge_count;
    std::uint64_t label_bytes;
    std::uint64_t relation_bytes;
    std::uint64_t slot_count;
};
static_assert(sizeof(IndexHeader) == 64);
static_assert(sizeof(KnowledgeGraph::Edge) == 24);
static_assert(sizeof(KnowledgeGraph::Slot) == 16);

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::uint64_t h, const char* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= kFnvPrime;
    }
    return h;
}

class HashingWriter {
public:
    explicit HashingWriter(std::ofstream& out) : out_(out) {}

    template <typename T>
    void write_array(const T* data, std::size_t count) {
        const auto* bytes = reinterpret_cast<const char*>(data);
        const std::size_t n = count * sizeof(T);
        out_.write(bytes, static_cast<std::streamsize>(n));
        hash_ = fnv1a(hash_, bytes, n);
    }

    std::uint64_t hash() const { return hash_; }

private:
    std::ofstream& out_;
    std::uint64_t hash_ = kFnvOffset;
};

class Reader {
public:
    explicit Reader(std::span<const char> data) : data_(data) {}

    template <typename T>
    void read_array(T* out, std::size_t count, const char* what) {
        if (count > remaining() / sizeof(T)) throw FormatError(std::string("index truncated in ") + what);
        std::memcpy(out, data_.data() + pos_, count * sizeof(T));
        pos_ += count * sizeof(T);
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    std::size_t pos() const { return pos_; }

private:
    std::span<const char> data_;
    std::size_t pos_ = 0;
};

}  // namespace

void save_index(const KnowledgeGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write index '" + path.string() + "'");

    std::string relation_blob;
    for (const auto& r : g.relations_) {
        relation_blob += r;
        relation_blob.push_back('\0');
    }

    IndexHeader h{};
    std::memcpy(h.magic, kMagic, sizeof kMagic);
    h.version = kIndexFormatVersion;
    h.node_count = g.node_count();
    h.relation_count = g.relations_.size();
    h.edge_count = g.edges_.size();
    h.label_bytes = g.label_blob_.size();
    h.relation_bytes = relation_blob.size();
    h.slot_count = g.slots_.size();

    HashingWriter w(out);
    w.write_array(&h, 1);
    w.write_array(g.label_offsets_.data(), g.label_offsets_.size());
    w.write_array(g.label_blob_.data(), g.label_blob_.size());
    w.write_array(relation_blob.data(), relation_blob.size());
    w.write_array(g.edges_.data(), g.edges_.size());
    w.write_array(g.slot_offsets_.data(), g.slot_offsets_.size());
    w.write_array(g.slots_.data(), g.slots_.size());
    const std::uint64_t checksum = w.hash();
    out.write(reinterpret_cast<const char*>(&checksum), sizeof checksum);
    out.flush();
    if (!out) throw Error("failed writing index '" + path.string() + "'");
}

KnowledgeGraph load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open index '" + path.string() + "'");
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::vector<char> buf(size);
    in.read(buf.data(), static_cast<std::streamsize>(size));
    if (!in) throw FormatError("cannot read index '" + path.string() + "'");

    if (size < sizeof(IndexHeader) + sizeof(std::uint64_t)) throw FormatError("index truncated in header");
    std::uint64_t stored_checksum = 0;
    std::memcpy(&stored_checksum, buf.data() + size - sizeof stored_checksum, sizeof stored_checksum);
    std::span<const char> body(buf.data(), size - sizeof stored_checksum);

    Reader r(body);
    IndexHeader h{};
    r.read_array(&h, 1, "header");
    if (std::memcmp(h.magic, kMagic, sizeof kMagic) != 0) throw FormatError("bad magic bytes");
    if (h.version != kIndexFormatVersion) {
        throw FormatError("index format version " + std::to_string(h.version) + ", expected " +
                          std::to_string(kIndexFormatVersion));
    }
    if (fnv1a(kFnvOffset, body.data(), body.size()) != stored_checksum) {
        throw FormatError("index checksum mismatch (truncated or corrupted file)");
    }
    // Section sizes must fit the body before anything is allocated.
    const auto fits = [&](std::uint64_t count, std::size_t elem) { return count <= body.size() / elem; };
    if (!fits(h.node_count + 1, 8) || !fits(h.label_bytes, 1) || !fits(h.relation_bytes, 1) ||
        !fits(h.edge_count, sizeof(KnowledgeGraph::Edge)) || !fits(h.slot_count, sizeof(KnowledgeGraph::Slot)) ||
        h.slot_count != 2 * h.edge_count) {
        throw FormatError("inconsistent section sizes");
    }

    KnowledgeGraph g;
    g.label_offsets_.resize(h.node_count + 1);
    r.read_array(g.label_offsets_.data(), g.label_offsets_.size(), "label offsets");
    g.label_blob_.resize(h.label_bytes);
    r.read_array(g.label_blob_.data(), g.label_blob_.size(), "labels");
    std::string relation_blob(h.relation_bytes, '\0');
    r.read_array(relation_blob.data(), relation_blob.size(), "relations");
    g.edges_.resize(h.edge_count);
    r.read_array(g.edges_.data(), g.edges_.size(), "edges");
    g.slot_offsets_.resize(h.node_count + 1);
    r.read_array(g.slot_offsets_.data(), g.slot_offsets_.size(), "slot offsets");
    g.slots_.resize(h.slot_count);
    r.read_array(g.slots_.data(), g.slots_.size(), "adjacency");
    if (r.remaining() != 0) throw FormatError("trailing bytes after adjacency");

    std::string_view rest = relation_blob;
    while (!rest.empty()) {
        const auto z = rest.find('\0');
        if (z == std::string_view::npos) throw FormatError("unterminated relation name");
        g.relations_.emplace_back(rest.substr(0, z));
        rest.remove_prefix(z + 1);
    }
    if (g.relations_.size() != h.relation_count) throw FormatError("relation count mismatch");

    const auto monotone = [](const std::vector<std::uint64_t>& off, std::uint64_t total) {
        if (off.front() != 0 || off.back() != total) return false;
        return std::is_sorted(off.begin(), off.end());
    };
    if (!monotone(g.label_offsets_, h.label_bytes) || !monotone(g.slot_offsets_, h.slot_count)) {
        throw FormatError("non-monotone offset table");
    }
    const auto n = h.node_count;
    for (const auto& e : g.edges_) {
        if (e.head >= n || e.tail >= n || e.relation >= h.relation_count) throw FormatError("edge out of range");
    }
    for (const auto& s : g.slots_) {
        if (s.neighbor >= n || s.relation >= h.relation_count || s.edge >= h.edge_count || s.reversed > 1) {
            throw FormatError("adjacency slot out of range");
        }
    }
    g.rebuild_label_index();
    return g;
}

}  // namespace kgalign
