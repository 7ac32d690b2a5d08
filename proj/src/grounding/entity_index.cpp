#include "t2s/grounding/entity_index.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_map>

#include <json.hpp>

#include "t2s/common/binary_io.hpp"
#include "t2s/common/text.hpp"

namespace t2s::grounding {

namespace fs = std::filesystem;

// On-disk layout (all integers little-endian):
//   manifest.json  counts, length totals, BM25 parameters
//   docs.bin       per doc: iri, name, u8 hasDescription, [description]
//   docs.idx       u64 offset into docs.bin per doc id (ids follow IRI order)
//   lengths.bin    u32 name tokens, u32 description tokens per doc id
//   terms.bin      per term, sorted: term, u32 df, u64 offset into postings.bin
//   terms.idx      u64 offset into terms.bin per term
//   postings.bin   per posting: u32 doc id, u32 tf(name), u32 tf(description)

namespace {

constexpr std::size_t kPostingBytes = 12;

struct BufferedEntry {
    std::string iri;
    std::uint64_t seq;
    std::string name;
    std::optional<std::string> description;
};

struct Posting {
    std::uint32_t doc;
    std::uint32_t tfName;
    std::uint32_t tfDescription;
};

void write_entry(io::BinaryWriter& w, const BufferedEntry& e) {
    w.write_string(e.iri);
    w.write(e.seq);
    w.write_string(e.name);
    w.write<std::uint8_t>(e.description ? 1 : 0);
    if (e.description) w.write_string(*e.description);
}

BufferedEntry read_entry(io::BinaryReader& r) {
    BufferedEntry e;
    e.iri = r.read_string();
    e.seq = r.read<std::uint64_t>();
    e.name = r.read_string();
    if (r.read<std::uint8_t>() != 0) e.description = r.read_string();
    return e;
}

std::map<std::string, std::uint32_t> term_counts(std::string_view s, std::uint32_t& length) {
    std::map<std::string, std::uint32_t> counts;
    const auto tokens = text::tokenize(s);
    length = static_cast<std::uint32_t>(tokens.size());
    for (const auto& t : tokens) ++counts[t];
    return counts;
}

}  // namespace

struct EntityIndexBuilder::State {
    fs::path target;
    EntityIndexOptions options;
    std::unique_ptr<io::StagingDirectory> staging;
    fs::path work;
    std::vector<BufferedEntry> buffer;
    std::vector<fs::path> entryRuns;
    std::uint64_t seq = 0;
    EntityIndexBuildReport report;
    bool finished = false;

    void spill_entries() {
        if (buffer.empty()) return;
        std::sort(buffer.begin(), buffer.end(), [](const BufferedEntry& a, const BufferedEntry& b) {
            return std::tie(a.iri, a.seq) < std::tie(b.iri, b.seq);
        });
        const fs::path path = work / ("entries-" + std::to_string(entryRuns.size()) + ".run");
        io::BinaryWriter w(path);
        w.write<std::uint64_t>(buffer.size());
        for (const auto& e : buffer) write_entry(w, e);
        w.close();
        entryRuns.push_back(path);
        buffer.clear();
    }
};

EntityIndexBuilder::EntityIndexBuilder(fs::path target, EntityIndexOptions options)
    : state_(std::make_unique<State>()) {
    state_->target = std::move(target);
    state_->options = options;
    state_->options.maxBufferedEntries = std::max<std::size_t>(1, options.maxBufferedEntries);
    state_->options.maxBufferedPostings = std::max<std::size_t>(1, options.maxBufferedPostings);
    state_->staging = std::make_unique<io::StagingDirectory>(state_->target);
    state_->work = state_->staging->path() / "work";
    fs::create_directories(state_->work);
}

EntityIndexBuilder::~EntityIndexBuilder() = default;

bool EntityIndexBuilder::add(EntityIndexEntry entry) {
    auto& s = *state_;
    ++s.report.ingested;
    std::string name = text::trim(entry.name);
    if (name.empty() || s.finished) {
        ++s.report.skippedEmptyName;
        return false;
    }
    std::optional<std::string> description;
    if (entry.description) {
        description = text::trim(*entry.description);
        if (description->empty()) description.reset();
    }
    s.buffer.push_back({entry.iri.str(), s.seq++, std::move(name), std::move(description)});
    if (s.buffer.size() >= s.options.maxBufferedEntries) s.spill_entries();
    return true;
}

namespace {

struct RunCursor {
    std::unique_ptr<io::BinaryReader> reader;
    std::uint64_t remaining = 0;
    BufferedEntry current;

    bool next() {
        if (remaining == 0) return false;
        current = read_entry(*reader);
        --remaining;
        return true;
    }
};

struct PostingRunCursor {
    std::unique_ptr<io::BinaryReader> reader;
    std::uint64_t remainingTerms = 0;
    std::string term;
    std::vector<Posting> postings;

    bool next() {
        if (remainingTerms == 0) return false;
        term = reader->read_string();
        const auto n = reader->read<std::uint32_t>();
        postings.resize(n);
        for (auto& p : postings) {
            p.doc = reader->read<std::uint32_t>();
            p.tfName = reader->read<std::uint32_t>();
            p.tfDescription = reader->read<std::uint32_t>();
        }
        --remainingTerms;
        return true;
    }
};

class PostingSpiller {
public:
    PostingSpiller(fs::path work, std::size_t limit) : work_(std::move(work)), limit_(limit) {}

    void add(const std::string& term, Posting p) {
        postings_[term].push_back(p);
        if (++buffered_ >= limit_) spill();
    }

    void spill() {
        if (postings_.empty()) return;
        const fs::path path = work_ / ("postings-" + std::to_string(runs_.size()) + ".run");
        io::BinaryWriter w(path);
        w.write<std::uint64_t>(postings_.size());
        for (const auto& [term, list] : postings_) {
            w.write_string(term);
            w.write<std::uint32_t>(static_cast<std::uint32_t>(list.size()));
            for (const auto& p : list) {
                w.write(p.doc);
                w.write(p.tfName);
                w.write(p.tfDescription);
            }
        }
        w.close();
        runs_.push_back(path);
        postings_.clear();
        buffered_ = 0;
    }

    const std::vector<fs::path>& runs() const { return runs_; }

private:
    fs::path work_;
    std::size_t limit_;
    std::map<std::string, std::vector<Posting>> postings_;
    std::size_t buffered_ = 0;
    std::vector<fs::path> runs_;
};

}  // namespace

Result<EntityIndexBuildReport, GroundingError> EntityIndexBuilder::finish() {
    auto& s = *state_;
    if (s.finished) return GroundingError{GroundingError::Kind::InvalidInput, "builder already finished"};
    s.finished = true;
    try {
        s.spill_entries();
        const fs::path root = s.staging->path();

        // Merge entry runs; within one IRI the highest sequence number wins.
        std::vector<RunCursor> cursors(s.entryRuns.size());
        auto cmp = [&](std::size_t a, std::size_t b) {
            return std::tie(cursors[a].current.iri, cursors[a].current.seq) >
                   std::tie(cursors[b].current.iri, cursors[b].current.seq);
        };
        std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
        for (std::size_t i = 0; i < s.entryRuns.size(); ++i) {
            cursors[i].reader = std::make_unique<io::BinaryReader>(s.entryRuns[i]);
            cursors[i].remaining = cursors[i].reader->read<std::uint64_t>();
            if (cursors[i].next()) heap.push(i);
        }

        io::BinaryWriter docs(root / "docs.bin");
        io::BinaryWriter docsIdx(root / "docs.idx");
        io::BinaryWriter lengths(root / "lengths.bin");
        PostingSpiller spiller(s.work, s.options.maxBufferedPostings);
        std::uint32_t docId = 0;
        std::uint64_t totalName = 0;
        std::uint64_t totalDescription = 0;

        auto emit = [&](const BufferedEntry& e) {
            docsIdx.write<std::uint64_t>(docs.offset());
            docs.write_string(e.iri);
            docs.write_string(e.name);
            docs.write<std::uint8_t>(e.description ? 1 : 0);
            if (e.description) docs.write_string(*e.description);

            std::uint32_t nameLen = 0;
            std::uint32_t descLen = 0;
            const auto nameCounts = term_counts(e.name, nameLen);
            const auto descCounts = e.description ? term_counts(*e.description, descLen)
                                                  : std::map<std::string, std::uint32_t>{};
            lengths.write(nameLen);
            lengths.write(descLen);
            totalName += nameLen;
            totalDescription += descLen;

            std::set<std::string> terms;
            for (const auto& [t, c] : nameCounts) terms.insert(t);
            for (const auto& [t, c] : descCounts) terms.insert(t);
            for (const auto& t : terms) {
                const auto n = nameCounts.find(t);
                const auto d = descCounts.find(t);
                spiller.add(t, {docId, n == nameCounts.end() ? 0 : n->second, d == descCounts.end() ? 0 : d->second});
            }
            ++docId;
        };

        std::optional<BufferedEntry> pending;
        while (!heap.empty()) {
            const std::size_t i = heap.top();
            heap.pop();
            if (pending && pending->iri != cursors[i].current.iri) emit(*pending);
            pending = std::move(cursors[i].current);
            if (cursors[i].next()) heap.push(i);
        }
        if (pending) emit(*pending);
        docs.close();
        docsIdx.close();
        lengths.close();
        spiller.spill();
        cursors.clear();

        // Merge posting runs. Runs were produced in doc-id order, so the
        // postings of one term concatenate in run order.
        std::vector<PostingRunCursor> pcs(spiller.runs().size());
        auto pcmp = [&](std::size_t a, std::size_t b) {
            return std::tie(pcs[a].term, a) > std::tie(pcs[b].term, b);
        };
        std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(pcmp)> pheap(pcmp);
        for (std::size_t i = 0; i < pcs.size(); ++i) {
            pcs[i].reader = std::make_unique<io::BinaryReader>(spiller.runs()[i]);
            pcs[i].remainingTerms = pcs[i].reader->read<std::uint64_t>();
            if (pcs[i].next()) pheap.push(i);
        }
        io::BinaryWriter terms(root / "terms.bin");
        io::BinaryWriter termsIdx(root / "terms.idx");
        io::BinaryWriter postings(root / "postings.bin");
        std::size_t termCount = 0;
        while (!pheap.empty()) {
            const std::string term = pcs[pheap.top()].term;
            const std::uint64_t offset = postings.offset();
            std::uint32_t df = 0;
            while (!pheap.empty() && pcs[pheap.top()].term == term) {
                const std::size_t i = pheap.top();
                pheap.pop();
                for (const auto& p : pcs[i].postings) {
                    postings.write(p.doc);
                    postings.write(p.tfName);
                    postings.write(p.tfDescription);
                    ++df;
                }
                if (pcs[i].next()) pheap.push(i);
            }
            termsIdx.write<std::uint64_t>(terms.offset());
            terms.write_string(term);
            terms.write(df);
            terms.write(offset);
            ++termCount;
        }
        terms.close();
        termsIdx.close();
        postings.close();
        pcs.clear();

        s.report.documents = docId;
        s.report.terms = termCount;
        nlohmann::json manifest = {
            {"format", "t2s-entity-index"},
            {"formatVersion", kEntityIndexFormatVersion},
            {"documentCount", docId},
            {"termCount", termCount},
            {"totalNameTokens", totalName},
            {"totalDescriptionTokens", totalDescription},
            {"nameWeight", 2},
            {"descriptionWeight", 1},
            {"bm25", {{"k1", s.options.bm25.k1}, {"b", s.options.bm25.b}}},
            {"ingested", s.report.ingested},
            {"skippedEmptyName", s.report.skippedEmptyName},
        };
        io::write_text_file(root / "manifest.json", manifest.dump(2) + "\n");
        fs::remove_all(s.work);
        s.staging->publish();
    } catch (const std::exception& e) {
        return GroundingError{GroundingError::Kind::Io, std::string("entity index build failed: ") + e.what()};
    }
    return s.report;
}

Result<EntityIndexBuildReport, GroundingError> build_entity_index(const std::vector<EntityIndexEntry>& entries,
                                                                  const fs::path& target, EntityIndexOptions options) {
    try {
        EntityIndexBuilder builder(target, options);
        for (const auto& e : entries) builder.add(e);
        return builder.finish();
    } catch (const std::exception& e) {
        return GroundingError{GroundingError::Kind::Io, e.what()};
    }
}

// ---------------------------------------------------------------------------

struct EntityIndex::Impl {
    std::unique_ptr<io::RandomAccessFile> docs;
    std::unique_ptr<io::RandomAccessFile> docsIdx;
    std::unique_ptr<io::RandomAccessFile> lengths;
    std::unique_ptr<io::RandomAccessFile> terms;
    std::unique_ptr<io::RandomAccessFile> termsIdx;
    std::unique_ptr<io::RandomAccessFile> postings;
    std::uint64_t documentCount = 0;
    std::uint64_t termCount = 0;
    double averageLength = 0.0;  // of the weighted length 2*|name| + |description|
    Bm25Params params;

    std::uint64_t u64_at(const io::RandomAccessFile& f, std::uint64_t index) const {
        std::uint64_t v = 0;
        f.read_at(index * sizeof v, &v, sizeof v);
        return v;
    }

    struct TermInfo {
        std::string term;
        std::uint32_t df = 0;
        std::uint64_t offset = 0;
    };

    TermInfo term_at(std::uint64_t index) const {
        const std::uint64_t offset = u64_at(*termsIdx, index);
        std::uint32_t len = 0;
        terms->read_at(offset, &len, sizeof len);
        std::string buf(len + 12, '\0');
        terms->read_at(offset + sizeof len, buf.data(), buf.size());
        TermInfo info;
        info.term.assign(buf.data(), len);
        std::memcpy(&info.df, buf.data() + len, 4);
        std::memcpy(&info.offset, buf.data() + len + 4, 8);
        return info;
    }

    std::optional<TermInfo> find_term(const std::string& term) const {
        std::uint64_t lo = 0;
        std::uint64_t hi = termCount;
        while (lo < hi) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            auto info = term_at(mid);
            if (info.term < term) {
                lo = mid + 1;
            } else if (term < info.term) {
                hi = mid;
            } else {
                return info;
            }
        }
        return std::nullopt;
    }

    EntityIndexEntry doc_at(std::uint64_t id) const {
        const std::uint64_t begin = u64_at(*docsIdx, id);
        const std::uint64_t end = id + 1 < documentCount ? u64_at(*docsIdx, id + 1) : docs->size();
        std::string buf(end - begin, '\0');
        docs->read_at(begin, buf.data(), buf.size());
        io::ByteCursor c(buf.data(), buf.size());
        std::string iri = c.read_string();
        std::string name = c.read_string();
        std::optional<std::string> description;
        if (c.read<std::uint8_t>() != 0) description = c.read_string();
        return {kg::Iri(std::move(iri)), std::move(name), std::move(description)};
    }

    double weighted_length(std::uint32_t id) const {
        std::uint32_t lens[2];
        lengths->read_at(static_cast<std::uint64_t>(id) * 8, lens, sizeof lens);
        return 2.0 * lens[0] + lens[1];
    }
};

Result<EntityIndex, GroundingError> EntityIndex::open(const fs::path& dir) {
    using Kind = GroundingError::Kind;
    try {
        const auto manifest = nlohmann::json::parse(io::read_text_file(dir / "manifest.json"), nullptr, false);
        if (manifest.is_discarded() || manifest.value("format", "") != "t2s-entity-index") {
            return GroundingError{Kind::Format, "not an entity index: " + dir.string()};
        }
        if (manifest.value("formatVersion", 0) != kEntityIndexFormatVersion) {
            return GroundingError{Kind::Format, "unsupported entity index version in " + dir.string()};
        }
        auto impl = std::make_shared<Impl>();
        impl->documentCount = manifest.value("documentCount", std::uint64_t{0});
        impl->termCount = manifest.value("termCount", std::uint64_t{0});
        const auto totalName = manifest.value("totalNameTokens", std::uint64_t{0});
        const auto totalDescription = manifest.value("totalDescriptionTokens", std::uint64_t{0});
        if (impl->documentCount > 0) {
            impl->averageLength = static_cast<double>(2 * totalName + totalDescription) /
                                  static_cast<double>(impl->documentCount);
        }
        impl->params.k1 = manifest["bm25"].value("k1", 1.2);
        impl->params.b = manifest["bm25"].value("b", 0.75);
        impl->docs = std::make_unique<io::RandomAccessFile>(dir / "docs.bin");
        impl->docsIdx = std::make_unique<io::RandomAccessFile>(dir / "docs.idx");
        impl->lengths = std::make_unique<io::RandomAccessFile>(dir / "lengths.bin");
        impl->terms = std::make_unique<io::RandomAccessFile>(dir / "terms.bin");
        impl->termsIdx = std::make_unique<io::RandomAccessFile>(dir / "terms.idx");
        impl->postings = std::make_unique<io::RandomAccessFile>(dir / "postings.bin");
        if (impl->docsIdx->size() != impl->documentCount * 8 || impl->lengths->size() != impl->documentCount * 8 ||
            impl->termsIdx->size() != impl->termCount * 8) {
            return GroundingError{Kind::Format, "entity index files disagree with manifest in " + dir.string()};
        }
        EntityIndex index;
        index.impl_ = std::move(impl);
        return index;
    } catch (const std::exception& e) {
        return GroundingError{Kind::Io, std::string("cannot open entity index: ") + e.what()};
    }
}

std::size_t EntityIndex::size() const { return impl_ ? impl_->documentCount : 0; }

std::vector<ScoredMatch> EntityIndex::search(std::string_view query, std::size_t limit) const {
    std::vector<ScoredMatch> out;
    if (!impl_ || limit == 0 || impl_->documentCount == 0) return out;
    const auto& ix = *impl_;

    const auto tokens = text::tokenize(query);
    const std::set<std::string> unique(tokens.begin(), tokens.end());
    std::unordered_map<std::uint32_t, double> scores;
    std::unordered_map<std::uint32_t, double> lengthCache;
    const double n = static_cast<double>(ix.documentCount);
    for (const auto& term : unique) {  // sorted order keeps the float sum reproducible
        const auto info = ix.find_term(term);
        if (!info || info->df == 0) continue;
        const double idf = bm25_idf(n, info->df);
        std::vector<char> buf(static_cast<std::size_t>(info->df) * kPostingBytes);
        ix.postings->read_at(info->offset, buf.data(), buf.size());
        io::ByteCursor c(buf.data(), buf.size());
        for (std::uint32_t i = 0; i < info->df; ++i) {
            const auto doc = c.read<std::uint32_t>();
            const auto tfName = c.read<std::uint32_t>();
            const auto tfDescription = c.read<std::uint32_t>();
            auto [it, inserted] = lengthCache.try_emplace(doc, 0.0);
            if (inserted) it->second = ix.weighted_length(doc);
            const double tf = 2.0 * tfName + tfDescription;
            scores[doc] += bm25_weight(tf, it->second, ix.averageLength, idf, ix.params);
        }
    }

    std::vector<std::pair<std::uint32_t, double>> ranked;
    for (const auto& [doc, score] : scores) {
        if (score > 0.0) ranked.emplace_back(doc, score);
    }
    // Doc ids follow IRI order, so the id is the IRI tie-break.
    auto better = [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    };
    const std::size_t keep = std::min(limit, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(), better);
    ranked.resize(keep);
    for (const auto& [doc, score] : ranked) {
        auto entry = ix.doc_at(doc);
        out.push_back({std::move(entry.iri), std::move(entry.name), "instance", score, std::nullopt, std::nullopt,
                       std::nullopt, std::nullopt, std::move(entry.description)});
    }
    return out;
}

std::optional<EntityIndexEntry> EntityIndex::lookup(const kg::Iri& iri) const {
    if (!impl_) return std::nullopt;
    std::uint64_t lo = 0;
    std::uint64_t hi = impl_->documentCount;
    while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        auto entry = impl_->doc_at(mid);
        if (entry.iri < iri) {
            lo = mid + 1;
        } else if (iri < entry.iri) {
            hi = mid;
        } else {
            return entry;
        }
    }
    return std::nullopt;
}

}  // namespace t2s::grounding
