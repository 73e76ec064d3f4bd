// SPDX-License-Identifier: Apache-2.0
#include "score/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "score/io.hpp"

namespace score {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::int64_t parse_int(const std::string& s, const std::string& context) {
    std::int64_t value = 0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError(context + ": not an integer: '" + s + "'");
    return value;
}

std::string loc(const std::filesystem::path& path, std::size_t line_no) {
    return path.filename().string() + ":" + std::to_string(line_no);
}

std::vector<std::string> dedup_tags(const std::string& field) {
    std::vector<std::string> tags;
    std::set<std::string> seen;
    std::size_t start = 0;
    while (start <= field.size()) {
        const std::size_t pos = field.find('|', start);
        const std::string tag =
            pos == std::string::npos ? field.substr(start) : field.substr(start, pos - start);
        if (!tag.empty() && seen.insert(tag).second) tags.push_back(tag);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return tags;
}

}  // namespace

Corpus::Corpus(std::vector<std::string> user_ids, std::vector<ItemMeta> items,
               std::vector<std::vector<SeqEntry>> sequences, int binarize_threshold)
    : user_ids_(std::move(user_ids)),
      items_(std::move(items)),
      sequences_(std::move(sequences)),
      binarize_threshold_(binarize_threshold) {
    user_index_.reserve(user_ids_.size());
    for (std::size_t i = 0; i < user_ids_.size(); ++i)
        user_index_[user_ids_[i]] = static_cast<int>(i);
    item_index_.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i)
        item_index_[items_[i].item_id] = static_cast<int>(i);

    positives_.resize(sequences_.size());
    for (std::size_t u = 0; u < sequences_.size(); ++u) {
        for (const SeqEntry& e : sequences_[u]) {
            if (e.item < 0 || e.item >= static_cast<int>(items_.size()))
                throw DomainError("sequence item index out of range for user " + user_ids_[u]);
            if (e.label == 1) positives_[u].push_back(e.item);
        }
        n_interactions_ += sequences_[u].size();
    }
}

std::optional<int> Corpus::user_index(const std::string& id) const {
    auto it = user_index_.find(id);
    if (it == user_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> Corpus::item_index(const std::string& id) const {
    auto it = item_index_.find(id);
    if (it == item_index_.end()) return std::nullopt;
    return it->second;
}

Corpus Corpus::restricted(std::int64_t max_ts) const {
    std::vector<std::vector<SeqEntry>> seqs(sequences_.size());
    for (std::size_t u = 0; u < sequences_.size(); ++u) {
        for (const SeqEntry& e : sequences_[u])
            if (e.timestamp <= max_ts) seqs[u].push_back(e);
    }
    return Corpus(user_ids_, items_, std::move(seqs), binarize_threshold_);
}

Corpus ingest(const std::filesystem::path& interactions_path,
              const std::filesystem::path& metadata_path, const IngestOptions& options) {
    // Item metadata first so interaction references can be checked.
    std::ifstream meta_in(metadata_path);
    if (!meta_in) throw IoError("cannot open file: " + metadata_path.string());
    std::vector<ItemMeta> items;
    {
        std::set<std::string> seen_ids;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(meta_in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto fields = split_tabs(line);
            if (fields.size() < 2 || fields.size() > 3)
                throw ParseError(loc(metadata_path, line_no) +
                                 ": expected item_id<TAB>title[<TAB>tags]");
            ItemMeta item;
            item.item_id = fields[0];
            item.title = fields[1];
            if (item.item_id.empty())
                throw ParseError(loc(metadata_path, line_no) + ": empty item id");
            if (item.title.empty())
                throw ParseError(loc(metadata_path, line_no) + ": empty title for item " +
                                 item.item_id);
            if (!seen_ids.insert(item.item_id).second)
                throw ParseError(loc(metadata_path, line_no) + ": duplicate item id " +
                                 item.item_id);
            if (fields.size() == 3) item.tags = dedup_tags(fields[2]);
            items.push_back(std::move(item));
        }
    }
    std::sort(items.begin(), items.end(),
              [](const ItemMeta& a, const ItemMeta& b) { return a.item_id < b.item_id; });
    std::unordered_map<std::string, int> item_index;
    for (std::size_t i = 0; i < items.size(); ++i)
        item_index[items[i].item_id] = static_cast<int>(i);

    std::ifstream inter_in(interactions_path);
    if (!inter_in) throw IoError("cannot open file: " + interactions_path.string());
    std::vector<InteractionRecord> records;
    std::set<std::string> missing_items;
    {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(inter_in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto fields = split_tabs(line);
            if (fields.size() != 4)
                throw ParseError(loc(interactions_path, line_no) +
                                 ": expected user_id<TAB>item_id<TAB>rating<TAB>timestamp");
            InteractionRecord rec;
            rec.user_id = fields[0];
            rec.item_id = fields[1];
            const std::int64_t rating =
                parse_int(fields[2], loc(interactions_path, line_no));
            if (rating < 1 || rating > 5)
                throw ParseError(loc(interactions_path, line_no) + ": rating out of range [1,5]: " +
                                 fields[2]);
            rec.rating = static_cast<int>(rating);
            rec.timestamp = parse_int(fields[3], loc(interactions_path, line_no));
            if (rec.timestamp < 0)
                throw ParseError(loc(interactions_path, line_no) + ": negative timestamp");
            if (rec.user_id.empty())
                throw ParseError(loc(interactions_path, line_no) + ": empty user id");
            if (options.window_start && rec.timestamp < *options.window_start) continue;
            if (item_index.find(rec.item_id) == item_index.end()) {
                missing_items.insert(rec.item_id);
                continue;
            }
            records.push_back(std::move(rec));
        }
    }
    if (!missing_items.empty()) {
        std::string ids;
        for (const auto& id : missing_items) {
            if (!ids.empty()) ids += ", ";
            ids += id;
        }
        throw ParseError("items referenced without metadata: " + ids);
    }

    // Dense user table, sorted by id so indices are order-independent.
    std::map<std::string, std::size_t> user_counts;
    for (const auto& rec : records) user_counts[rec.user_id]++;
    std::vector<std::string> user_ids;
    for (const auto& [id, count] : user_counts) {
        if (static_cast<int>(count) >= options.min_interactions) user_ids.push_back(id);
    }
    std::unordered_map<std::string, int> user_index;
    for (std::size_t i = 0; i < user_ids.size(); ++i)
        user_index[user_ids[i]] = static_cast<int>(i);

    std::vector<std::vector<Corpus::SeqEntry>> sequences(user_ids.size());
    for (const auto& rec : records) {
        auto it = user_index.find(rec.user_id);
        if (it == user_index.end()) continue;  // filtered by min_interactions
        Corpus::SeqEntry e;
        e.item = item_index.at(rec.item_id);
        e.label = rec.rating >= options.binarize_threshold ? 1 : 0;
        e.timestamp = rec.timestamp;
        sequences[it->second].push_back(e);
    }
    for (auto& seq : sequences) {
        std::stable_sort(seq.begin(), seq.end(),
                         [](const Corpus::SeqEntry& a, const Corpus::SeqEntry& b) {
                             return a.timestamp < b.timestamp;
                         });
    }

    return Corpus(std::move(user_ids), std::move(items), std::move(sequences),
                  options.binarize_threshold);
}

std::string behavior_text(const Corpus& corpus, int user, int max_items) {
    if (user < 0 || user >= static_cast<int>(corpus.n_users()))
        throw DomainError("unknown user index " + std::to_string(user));
    const auto& pos = corpus.positives(user);
    if (pos.empty())
        throw DomainError("empty positive history for user " + corpus.user_id(user));
    if (max_items <= 0) throw ConfigError("max_items must be >= 1");
    const std::size_t n = std::min<std::size_t>(pos.size(), max_items);
    std::string out;
    for (std::size_t i = pos.size() - n; i < pos.size(); ++i) {
        if (!out.empty()) out += ", ";
        out += item_text(corpus.item(pos[i]));
    }
    return out;
}

std::string item_text(const ItemMeta& item) { return "'" + item.title + "'"; }

Splits temporal_split(const Corpus& corpus, const SplitSpec& spec) {
    if (spec.train_end >= spec.val_end)
        throw ConfigError("train_end must be < val_end");
    Splits out;
    for (std::size_t u = 0; u < corpus.n_users(); ++u) {
        for (const auto& e : corpus.sequence(static_cast<int>(u))) {
            Interaction rec{static_cast<int>(u), e.item, e.label, e.timestamp};
            if (e.timestamp <= spec.train_end)
                out.train.push_back(rec);
            else if (e.timestamp <= spec.val_end)
                out.val.push_back(rec);
            else
                out.test.push_back(rec);
        }
    }
    if (out.train.empty()) std::cerr << "warning: empty train partition\n";
    if (out.val.empty()) std::cerr << "warning: empty val partition\n";
    if (out.test.empty()) std::cerr << "warning: empty test partition\n";
    return out;
}

void Corpus::save(const std::filesystem::path& dir) const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);

    std::string items_tsv;
    for (const ItemMeta& item : items_) {
        items_tsv += item.item_id;
        items_tsv += '\t';
        items_tsv += item.title;
        items_tsv += '\t';
        for (std::size_t i = 0; i < item.tags.size(); ++i) {
            if (i) items_tsv += '|';
            items_tsv += item.tags[i];
        }
        items_tsv += '\n';
    }
    atomic_write_file(dir / "items.tsv", items_tsv);

    // Canonical rating encoding: 5 for positives, 1 for negatives, with
    // threshold 5 in the meta file, so labels survive re-ingestion.
    std::string inter_tsv;
    for (std::size_t u = 0; u < user_ids_.size(); ++u) {
        for (const SeqEntry& e : sequences_[u]) {
            inter_tsv += user_ids_[u];
            inter_tsv += '\t';
            inter_tsv += items_[e.item].item_id;
            inter_tsv += '\t';
            inter_tsv += e.label == 1 ? '5' : '1';
            inter_tsv += '\t';
            inter_tsv += std::to_string(e.timestamp);
            inter_tsv += '\n';
        }
    }
    atomic_write_file(dir / "interactions.tsv", inter_tsv);
    atomic_write_file(dir / "corpus.meta", "binarize_threshold = 5\n");
}

Corpus Corpus::load(const std::filesystem::path& dir) {
    IngestOptions opts;
    opts.binarize_threshold = 5;
    return ingest(dir / "interactions.tsv", dir / "items.tsv", opts);
}

void save_pairs(const std::filesystem::path& path, const Corpus& corpus,
                const std::vector<Interaction>& pairs) {
    std::string tsv;
    for (const Interaction& p : pairs) {
        tsv += corpus.user_id(p.user);
        tsv += '\t';
        tsv += corpus.item(p.item).item_id;
        tsv += '\t';
        tsv += std::to_string(p.label);
        tsv += '\t';
        tsv += std::to_string(p.timestamp);
        tsv += '\n';
    }
    atomic_write_file(path, tsv);
}

std::vector<Interaction> load_pairs(const std::filesystem::path& path, const Corpus& corpus) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::vector<Interaction> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 4)
            throw ParseError(loc(path, line_no) +
                             ": expected user_id<TAB>item_id<TAB>label<TAB>timestamp");
        const auto user = corpus.user_index(fields[0]);
        if (!user) throw ParseError(loc(path, line_no) + ": unknown user " + fields[0]);
        const auto item = corpus.item_index(fields[1]);
        if (!item) throw ParseError(loc(path, line_no) + ": unknown item " + fields[1]);
        const std::int64_t label = parse_int(fields[2], loc(path, line_no));
        if (label != 0 && label != 1)
            throw ParseError(loc(path, line_no) + ": label must be 0 or 1");
        const std::int64_t ts = parse_int(fields[3], loc(path, line_no));
        out.push_back(Interaction{*user, *item, static_cast<int>(label), ts});
    }
    return out;
}

}  // namespace score
