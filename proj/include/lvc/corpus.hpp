#pragma once

// Dataset records, the canonical TSV and SemEval E-c readers, and the
// hashtag-driven corpus builder.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lvc/labels.hpp"

namespace lvc {

struct CorpusRecord {
    std::string id;
    std::string text;
    std::vector<std::string> tokens;
    std::set<std::string> labels;
};

// Lowercases ASCII letters, splits on Unicode whitespace and splits a
// trailing run of ASCII punctuation off each word as its own token. A
// leading '#' or '@' stays on its word; "<url>" and "<user>" are kept whole.
std::vector<std::string> tokenize(std::string_view text);

// Splits on Unicode whitespace without any other processing.
std::vector<std::string_view> split_unicode_ws(std::string_view text);

// `id<TAB>text<TAB>label1,label2,...`; the label field may be empty. Labels
// outside `space` are a DataError; a null `space` accepts any label.
std::vector<CorpusRecord> read_canonical_tsv(std::istream& in, const std::string& source, const LabelSpace* space);
std::vector<CorpusRecord> load_canonical_tsv(const std::filesystem::path& path, const LabelSpace& space);
std::vector<CorpusRecord> load_canonical_tsv(const std::filesystem::path& path);
// Labels are written in label-space order.
void write_canonical_tsv(std::ostream& out, const std::vector<CorpusRecord>& records, const LabelSpace& space);

struct SemevalData {
    LabelSpace labels;
    std::vector<CorpusRecord> records;
};

// Header `ID<TAB>Tweet<TAB>label...`, then one row of 0/1 cells per tweet.
SemevalData read_semeval_ec(std::istream& in, const std::string& source);
SemevalData load_semeval_ec(const std::filesystem::path& path);
// Same, and the header labels must equal `space` in order (ConfigError otherwise).
std::vector<CorpusRecord> load_semeval_ec(const std::filesystem::path& path, const LabelSpace& space);

// Emotion -> hashtags, in file order. Lines are `emotion<TAB>#a,#b,...`.
class HashtagMap {
public:
    HashtagMap() = default;
    void add(const std::string& emotion, const std::vector<std::string>& hashtags);

    // Emotions in declaration order.
    const std::vector<std::string>& emotions() const { return emotions_; }
    std::vector<std::string> hashtags(const std::string& emotion) const;
    // Case-insensitive lookup of a whole token.
    std::optional<std::string> emotion_for(std::string_view token) const;
    LabelSpace label_space() const { return LabelSpace(emotions_); }

private:
    std::vector<std::string> emotions_;
    std::map<std::string, std::string> tag_to_emotion_;
};

HashtagMap read_hashtag_map(std::istream& in, const std::string& source);
HashtagMap load_hashtag_map(const std::filesystem::path& path);

std::set<std::string> extract_distant_labels(std::string_view text, const HashtagMap& map);
// Drops label hashtags and rejoins the remaining tokens with single spaces.
std::string strip_label_hashtags(std::string_view text, const HashtagMap& map);
// Whitespace tokens that look like URLs become "<url>", @mentions "<user>".
std::string normalize_urls_and_users(std::string_view text);

// Emoji sequence -> ":alias:" table. Lines are `<emoji><TAB>:alias:`; lines
// starting with "# " are comments.
class EmojiAliasTable {
public:
    void add(std::string emoji, std::string alias);
    std::size_t size() const { return aliases_.size(); }
    // Longest table entry that is a prefix of `text`, as (bytes, alias).
    std::optional<std::pair<std::size_t, const std::string*>> match(std::string_view text) const;

private:
    std::map<std::string, std::string, std::less<>> aliases_;
    std::size_t max_bytes_ = 0;
};

EmojiAliasTable read_emoji_aliases(std::istream& in, const std::string& source);
EmojiAliasTable load_emoji_aliases(const std::filesystem::path& path);

// Replaces known emoji with their alias words, drops other emoji-range
// codepoints and collapses whitespace.
std::string normalize_emoji_aliases(std::string_view text, const EmojiAliasTable& table);

// Keeps records with min_tokens <= |tokens| <= max_tokens.
std::vector<CorpusRecord> length_filter(std::vector<CorpusRecord> records, std::size_t min_tokens = 3,
                                        std::size_t max_tokens = 50);

// Keeps every multi-label record and tops each emotion up to the largest
// multi-label emotion count with single-label records sampled without
// replacement. Output preserves input order. Notes go to `log` if given.
std::vector<CorpusRecord> balance_corpus(const std::vector<CorpusRecord>& records, const LabelSpace& space,
                                         std::uint64_t seed, std::ostream* log = nullptr);

struct BuildOptions {
    std::size_t min_tokens = 3;
    std::size_t max_tokens = 50;
    std::size_t min_labels = 1;
    std::uint64_t seed = 0;
};

// Full raw-text pipeline. Each non-empty input line is one tweet and its
// line number is the record id.
std::vector<CorpusRecord> build_corpus(std::istream& raw, const HashtagMap& map, const EmojiAliasTable& aliases,
                                       const BuildOptions& options, std::ostream* log = nullptr);

struct DatasetStats {
    std::size_t n_emotions = 0;
    std::size_t n_instances = 0;
    double pct_multilabel = 0.0;
};

// n_emotions counts distinct labels that occur. Empty input is a DataError.
DatasetStats dataset_stats(const std::vector<CorpusRecord>& records);
void write_stats(std::ostream& out, const std::string& name, const DatasetStats& stats);

struct DataSplit {
    std::vector<CorpusRecord> train;
    std::vector<CorpusRecord> dev;
    std::vector<CorpusRecord> test;
};

// Seeded shuffle, then slices of floor(ratio * N) for train and dev; test
// takes the rest. Ratios must sum to 1 within 1e-9.
DataSplit split(std::vector<CorpusRecord> records, std::array<double, 3> ratios, std::uint64_t seed);

}  // namespace lvc
