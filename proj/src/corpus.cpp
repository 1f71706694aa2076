#include "lvc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "lvc/errors.hpp"
#include "lvc/rng.hpp"
#include "lvc/strings.hpp"

namespace lvc {

namespace {

// Decodes one UTF-8 sequence at text[pos]. Malformed bytes decode as
// themselves with length 1.
std::pair<char32_t, std::size_t> decode_utf8(std::string_view text, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(text[pos]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xF0 && b0 < 0xF8) {
        len = 4;
        cp = b0 & 0x07;
    } else if (b0 >= 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if (b0 >= 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else {
        return {cp, 1};
    }
    if (pos + len > text.size()) return {b0, 1};
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(text[pos + i]);
        if ((b & 0xC0) != 0x80) return {b0, 1};
        cp = (cp << 6) | (b & 0x3F);
    }
    return {cp, len};
}

bool is_unicode_space(char32_t cp) {
    return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
           (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
           cp == 0x3000;
}

bool is_emoji_range(char32_t cp) {
    return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) || (cp >= 0x2300 && cp <= 0x23FF) ||
           (cp >= 0x2B00 && cp <= 0x2BFF) || (cp >= 0xE0000 && cp <= 0xE007F) || cp == 0xFE0F || cp == 0x200D ||
           cp == 0x20E3;
}

bool is_ascii_punct(char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

std::string collapse_ws(std::string_view text) { return str::join(split_unicode_ws(text), " "); }

std::ifstream open_or_throw(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw DataError(std::string("cannot open ") + what + " " + path.string());
    return in;
}

}  // namespace

std::vector<std::string_view> split_unicode_ws(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0, pos = 0;
    while (pos < text.size()) {
        const auto [cp, len] = decode_utf8(text, pos);
        if (is_unicode_space(cp)) {
            if (pos > start) out.push_back(text.substr(start, pos - start));
            start = pos + len;
        }
        pos += len;
    }
    if (pos > start) out.push_back(text.substr(start, pos - start));
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    for (auto word : split_unicode_ws(text)) {
        std::string w = str::ascii_lower(word);
        if (w == "<url>" || w == "<user>") {
            tokens.push_back(std::move(w));
            continue;
        }
        std::size_t cut = w.size();
        while (cut > 0 && is_ascii_punct(w[cut - 1])) --cut;
        if (cut == 0 || cut == w.size()) {
            tokens.push_back(std::move(w));
        } else {
            tokens.push_back(w.substr(0, cut));
            tokens.push_back(w.substr(cut));
        }
    }
    return tokens;
}

// ---- canonical TSV ---------------------------------------------------------

std::vector<CorpusRecord> read_canonical_tsv(std::istream& in, const std::string& source, const LabelSpace* space) {
    std::vector<CorpusRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = str::strip_cr(line);
        if (view.empty()) continue;
        const auto cols = str::split(view, '\t');
        if (cols.size() != 3) {
            throw ParseError(source, line_no, "expected 3 tab-separated columns, got " + std::to_string(cols.size()));
        }
        CorpusRecord r;
        r.id = std::string(cols[0]);
        r.text = std::string(cols[1]);
        r.tokens = tokenize(r.text);
        if (!cols[2].empty()) {
            for (auto name : str::split(cols[2], ',')) {
                if (space && !space->index(name)) {
                    throw DataError(source + ":" + std::to_string(line_no) + ": unknown label '" + std::string(name) +
                                    "'");
                }
                r.labels.emplace(name);
            }
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<CorpusRecord> load_canonical_tsv(const std::filesystem::path& path, const LabelSpace& space) {
    auto in = open_or_throw(path, "dataset");
    return read_canonical_tsv(in, path.string(), &space);
}

std::vector<CorpusRecord> load_canonical_tsv(const std::filesystem::path& path) {
    auto in = open_or_throw(path, "dataset");
    return read_canonical_tsv(in, path.string(), nullptr);
}

void write_canonical_tsv(std::ostream& out, const std::vector<CorpusRecord>& records, const LabelSpace& space) {
    for (const auto& r : records) {
        std::vector<std::string> names;
        for (const auto& label : space.names()) {
            if (r.labels.count(label)) names.push_back(label);
        }
        out << r.id << '\t' << r.text << '\t' << str::join(names, ",") << '\n';
    }
}

// ---- SemEval E-c -----------------------------------------------------------

SemevalData read_semeval_ec(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
    const auto header = str::split(str::strip_cr(line), '\t');
    if (header.size() < 3) throw ParseError(source, 1, "header needs ID, Tweet and at least one label column");
    std::vector<std::string> names(header.begin() + 2, header.end());
    SemevalData data{LabelSpace(names), {}};

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = str::strip_cr(line);
        if (view.empty()) continue;
        const auto cols = str::split(view, '\t');
        if (cols.size() != header.size()) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(header.size()) + " columns, got " + std::to_string(cols.size()));
        }
        CorpusRecord r;
        r.id = std::string(cols[0]);
        r.text = std::string(cols[1]);
        r.tokens = tokenize(r.text);
        for (std::size_t j = 0; j < names.size(); ++j) {
            const auto cell = cols[j + 2];
            if (cell == "1") {
                r.labels.insert(names[j]);
            } else if (cell != "0") {
                throw ParseError(source, line_no, "label cell '" + std::string(cell) + "' is not 0 or 1");
            }
        }
        data.records.push_back(std::move(r));
    }
    return data;
}

SemevalData load_semeval_ec(const std::filesystem::path& path) {
    auto in = open_or_throw(path, "dataset");
    return read_semeval_ec(in, path.string());
}

std::vector<CorpusRecord> load_semeval_ec(const std::filesystem::path& path, const LabelSpace& space) {
    auto data = load_semeval_ec(path);
    if (!(data.labels == space)) {
        throw ConfigError(path.string() + ": label columns (" + str::join(data.labels.names(), ",") +
                          ") do not match the label space (" + str::join(space.names(), ",") + ")");
    }
    return std::move(data.records);
}

// ---- hashtags --------------------------------------------------------------

void HashtagMap::add(const std::string& emotion, const std::vector<std::string>& hashtags) {
    if (emotion.empty()) throw ConfigError("hashtag map: empty emotion name");
    if (std::find(emotions_.begin(), emotions_.end(), emotion) != emotions_.end()) {
        throw ConfigError("hashtag map: emotion '" + emotion + "' listed twice");
    }
    for (const auto& tag : hashtags) {
        if (tag.size() < 2 || tag[0] != '#') throw ConfigError("hashtag map: '" + tag + "' is not a hashtag");
        if (tag != str::ascii_lower(tag)) throw ConfigError("hashtag map: '" + tag + "' is not lowercase");
        auto [it, fresh] = tag_to_emotion_.emplace(tag, emotion);
        if (!fresh) {
            throw ConfigError("hashtag map: " + tag + " maps to both " + it->second + " and " + emotion);
        }
    }
    emotions_.push_back(emotion);
}

std::vector<std::string> HashtagMap::hashtags(const std::string& emotion) const {
    std::vector<std::string> out;
    for (const auto& [tag, e] : tag_to_emotion_) {
        if (e == emotion) out.push_back(tag);
    }
    return out;
}

std::optional<std::string> HashtagMap::emotion_for(std::string_view token) const {
    if (token.empty() || token[0] != '#') return std::nullopt;
    auto it = tag_to_emotion_.find(str::ascii_lower(token));
    if (it == tag_to_emotion_.end()) return std::nullopt;
    return it->second;
}

HashtagMap read_hashtag_map(std::istream& in, const std::string& source) {
    HashtagMap map;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = str::strip_cr(line);
        if (str::trim(view).empty()) continue;
        const auto cols = str::split(view, '\t');
        if (cols.size() != 2) throw ParseError(source, line_no, "expected emotion<TAB>#tag1,#tag2,...");
        std::vector<std::string> tags;
        for (auto t : str::split(cols[1], ',')) {
            const auto tag = str::trim(t);
            if (!tag.empty()) tags.emplace_back(tag);
        }
        try {
            map.add(std::string(str::trim(cols[0])), tags);
        } catch (const ConfigError& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    if (map.emotions().empty()) throw DataError(source + ": hashtag map is empty");
    return map;
}

HashtagMap load_hashtag_map(const std::filesystem::path& path) {
    auto in = open_or_throw(path, "hashtag map");
    return read_hashtag_map(in, path.string());
}

std::set<std::string> extract_distant_labels(std::string_view text, const HashtagMap& map) {
    std::set<std::string> labels;
    for (auto word : split_unicode_ws(text)) {
        if (auto e = map.emotion_for(word)) labels.insert(*e);
    }
    return labels;
}

std::string strip_label_hashtags(std::string_view text, const HashtagMap& map) {
    std::vector<std::string_view> kept;
    for (auto word : split_unicode_ws(text)) {
        if (!map.emotion_for(word)) kept.push_back(word);
    }
    return str::join(kept, " ");
}

std::string normalize_urls_and_users(std::string_view text) {
    std::vector<std::string> out;
    for (auto word : split_unicode_ws(text)) {
        const std::string lower = str::ascii_lower(word);
        if (lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")) {
            out.emplace_back("<url>");
        } else if (word.size() > 1 && word[0] == '@') {
            out.emplace_back("<user>");
        } else {
            out.emplace_back(word);
        }
    }
    return str::join(out, " ");
}

// ---- emoji -----------------------------------------------------------------

void EmojiAliasTable::add(std::string emoji, std::string alias) {
    if (emoji.empty()) throw DataError("emoji alias table: empty emoji");
    max_bytes_ = std::max(max_bytes_, emoji.size());
    aliases_.insert_or_assign(std::move(emoji), std::move(alias));
}

std::optional<std::pair<std::size_t, const std::string*>> EmojiAliasTable::match(std::string_view text) const {
    for (std::size_t n = std::min(max_bytes_, text.size()); n > 0; --n) {
        auto it = aliases_.find(text.substr(0, n));
        if (it != aliases_.end()) return std::make_pair(n, &it->second);
    }
    return std::nullopt;
}

EmojiAliasTable read_emoji_aliases(std::istream& in, const std::string& source) {
    EmojiAliasTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = str::strip_cr(line);
        if (view.empty() || view.starts_with("# ")) continue;
        const auto cols = str::split(view, '\t');
        if (cols.size() != 2 || cols[0].empty() || cols[1].size() < 3 || cols[1].front() != ':' ||
            cols[1].back() != ':') {
            throw ParseError(source, line_no, "expected <emoji><TAB>:alias:");
        }
        table.add(std::string(cols[0]), std::string(cols[1]));
    }
    return table;
}

EmojiAliasTable load_emoji_aliases(const std::filesystem::path& path) {
    auto in = open_or_throw(path, "emoji alias table");
    return read_emoji_aliases(in, path.string());
}

std::string normalize_emoji_aliases(std::string_view text, const EmojiAliasTable& table) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (auto m = table.match(text.substr(pos))) {
            std::string alias = *m->second;
            std::replace(alias.begin(), alias.end(), ':', ' ');
            std::replace(alias.begin(), alias.end(), '_', ' ');
            out += ' ';
            out += alias;
            out += ' ';
            pos += m->first;
            continue;
        }
        const auto [cp, len] = decode_utf8(text, pos);
        if (!is_emoji_range(cp)) out.append(text.substr(pos, len));
        pos += len;
    }
    return collapse_ws(out);
}

// ---- filtering and balancing -----------------------------------------------

std::vector<CorpusRecord> length_filter(std::vector<CorpusRecord> records, std::size_t min_tokens,
                                        std::size_t max_tokens) {
    std::erase_if(records, [&](const CorpusRecord& r) {
        return r.tokens.size() < min_tokens || r.tokens.size() > max_tokens;
    });
    return records;
}

std::vector<CorpusRecord> balance_corpus(const std::vector<CorpusRecord>& records, const LabelSpace& space,
                                         std::uint64_t seed, std::ostream* log) {
    std::vector<bool> keep(records.size(), false);
    std::vector<std::size_t> totals(space.size(), 0);
    std::vector<std::vector<std::size_t>> pools(space.size());
    bool any_multi = false;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.labels.empty()) throw ContractError("balance_corpus: record " + r.id + " has no labels");
        for (const auto& label : r.labels) {
            if (!space.index(label)) throw ContractError("balance_corpus: unknown label " + label);
        }
        if (r.labels.size() >= 2) {
            keep[i] = true;
            any_multi = true;
            for (const auto& label : r.labels) ++totals[*space.index(label)];
        } else {
            pools[*space.index(*r.labels.begin())].push_back(i);
        }
    }
    if (!any_multi) {
        if (log) *log << "warning: no multi-label records; balanced corpus is empty\n";
        return {};
    }

    const std::size_t target = *std::max_element(totals.begin(), totals.end());
    Rng rng(seed);
    for (std::size_t e = 0; e < space.size(); ++e) {
        auto& pool = pools[e];
        shuffle(pool, rng);
        const std::size_t need = target - totals[e];
        const std::size_t take = std::min(need, pool.size());
        for (std::size_t j = 0; j < take; ++j) keep[pool[j]] = true;
        totals[e] += take;
        if (take < need && log) {
            *log << "note: " << space.name(e) << " reaches " << totals[e] << " of " << target
                 << " (single-label pool exhausted)\n";
        }
    }

    std::vector<CorpusRecord> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (keep[i]) out.push_back(records[i]);
    }
    return out;
}

std::vector<CorpusRecord> build_corpus(std::istream& raw, const HashtagMap& map, const EmojiAliasTable& aliases,
                                       const BuildOptions& options, std::ostream* log) {
    std::vector<CorpusRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(raw, line)) {
        ++line_no;
        const auto view = str::strip_cr(line);
        if (str::trim(view).empty()) continue;
        CorpusRecord r;
        r.id = std::to_string(line_no);
        r.labels = extract_distant_labels(view, map);
        if (r.labels.size() < std::max<std::size_t>(options.min_labels, 1)) continue;
        std::string text = strip_label_hashtags(view, map);
        text = normalize_urls_and_users(text);
        text = normalize_emoji_aliases(text, aliases);
        r.tokens = tokenize(text);
        r.text = str::join(r.tokens, " ");
        records.push_back(std::move(r));
    }
    records = length_filter(std::move(records), options.min_tokens, options.max_tokens);
    return balance_corpus(records, map.label_space(), options.seed, log);
}

// ---- statistics and splits -------------------------------------------------

DatasetStats dataset_stats(const std::vector<CorpusRecord>& records) {
    if (records.empty()) throw DataError("dataset statistics need at least one instance");
    std::set<std::string> seen;
    std::size_t multi = 0;
    for (const auto& r : records) {
        seen.insert(r.labels.begin(), r.labels.end());
        multi += r.labels.size() >= 2;
    }
    return {seen.size(), records.size(), 100.0 * static_cast<double>(multi) / static_cast<double>(records.size())};
}

void write_stats(std::ostream& out, const std::string& name, const DatasetStats& stats) {
    char pct[32];
    std::snprintf(pct, sizeof pct, "%.1f", stats.pct_multilabel);
    out << "dataset\temotions\tinstances\tmulti_label_pct\n";
    out << name << '\t' << stats.n_emotions << '\t' << stats.n_instances << '\t' << pct << '\n';
}

DataSplit split(std::vector<CorpusRecord> records, std::array<double, 3> ratios, std::uint64_t seed) {
    for (double r : ratios) {
        if (!(r >= 0.0)) throw ConfigError("split ratios must be non-negative");
    }
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
    Rng rng(seed);
    shuffle(records, rng);
    const auto n = static_cast<double>(records.size());
    const auto n_train = static_cast<std::size_t>(std::floor(ratios[0] * n));
    const auto n_dev = std::min(records.size() - n_train, static_cast<std::size_t>(std::floor(ratios[1] * n)));
    DataSplit out;
    auto it = std::make_move_iterator(records.begin());
    out.train.assign(it, it + static_cast<std::ptrdiff_t>(n_train));
    out.dev.assign(it + static_cast<std::ptrdiff_t>(n_train), it + static_cast<std::ptrdiff_t>(n_train + n_dev));
    out.test.assign(it + static_cast<std::ptrdiff_t>(n_train + n_dev), std::make_move_iterator(records.end()));
    return out;
}

}  // namespace lvc
