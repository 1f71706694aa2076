#include "lvc/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "lvc/errors.hpp"
#include "lvc/strings.hpp"

namespace lvc {

// ---- Vocabulary ------------------------------------------------------------

Vocabulary::Vocabulary() : Vocabulary(from_tokens({std::string(pad_token), std::string(unk_token)})) {}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> id_to_token) {
    if (id_to_token.size() < 2 || id_to_token[pad_id] != pad_token || id_to_token[unk_id] != unk_token) {
        throw DataError("vocabulary must start with <pad> and <unk>");
    }
    Vocabulary v{Empty{}};
    v.id_to_token_ = std::move(id_to_token);
    for (TokenId i = 0; i < v.id_to_token_.size(); ++i) {
        if (!v.token_to_id_.emplace(v.id_to_token_[i], i).second) {
            throw DataError("vocabulary token repeated: " + v.id_to_token_[i]);
        }
    }
    return v;
}

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>> corpus, std::size_t min_freq) {
    if (min_freq < 1) throw ConfigError("build_vocab: min_freq must be >= 1");
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& sentence : corpus)
        for (const auto& tok : sentence) ++freq[tok];

    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [tok, n] : freq) {
        if (n >= min_freq && tok != pad_token && tok != unk_token) kept.emplace_back(tok, n);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });

    std::vector<std::string> order{std::string(pad_token), std::string(unk_token)};
    for (auto& [tok, n] : kept) order.push_back(std::move(tok));
    return from_tokens(std::move(order));
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
    auto it = token_to_id_.find(std::string(token));
    if (it == token_to_id_.end()) return std::nullopt;
    return it->second;
}

TokenId Vocabulary::id(std::string_view token) const { return find(token).value_or(unk_id); }

std::vector<TokenId> Vocabulary::encode(std::span<const std::string> tokens) const {
    std::vector<TokenId> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(id(t));
    return ids;
}

// ---- EmbeddingTable --------------------------------------------------------

EmbeddingTable EmbeddingTable::random(std::size_t vocab_size, std::size_t dim, Rng& rng) {
    EmbeddingTable table;
    table.matrix = ad::Tensor::uniform({vocab_size, dim}, -0.1, 0.1, rng, true);
    std::fill_n(table.matrix.data().begin(), dim, 0.0);
    table.frozen.assign(vocab_size, false);
    return table;
}

void EmbeddingTable::mask_gradients() {
    const std::size_t d = dim();
    auto grad = matrix.grad();
    for (std::size_t r = 0; r < rows(); ++r) {
        if (r == Vocabulary::pad_id || frozen[r]) std::fill_n(grad.begin() + r * d, d, 0.0);
    }
}

EmbeddingTable load_glove_text(std::istream& in, const std::string& source, std::size_t expected_dim,
                               const Vocabulary& vocab, Rng& rng) {
    if (expected_dim == 0) throw ConfigError("glove: expected dimension must be positive");
    EmbeddingTable table = EmbeddingTable::random(vocab.size(), expected_dim, rng);

    std::string line;
    std::size_t line_no = 0;
    std::size_t first_mismatch_fields = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = str::strip_cr(line);
        if (view.empty()) continue;
        const auto fields = str::split(view, ' ');
        if (fields.size() != expected_dim + 1) {
            // A first line of the wrong width followed by a second line of the
            // same width means the whole file has another dimension.
            if (line_no == 1) {
                first_mismatch_fields = fields.size();
                continue;
            }
            if (line_no == 2 && first_mismatch_fields == fields.size()) {
                throw ConfigError(source + ": vectors have dimension " + std::to_string(fields.size() - 1) +
                                  ", expected " + std::to_string(expected_dim));
            }
            throw ParseError(source, line_no, "expected " + std::to_string(expected_dim + 1) + " fields, got " +
                                                  std::to_string(fields.size()));
        }
        if (first_mismatch_fields != 0) {
            throw ParseError(source, 1, "expected " + std::to_string(expected_dim + 1) + " fields, got " +
                                            std::to_string(first_mismatch_fields));
        }
        std::vector<double> values(expected_dim);
        for (std::size_t i = 0; i < expected_dim; ++i) {
            auto v = str::parse_double(fields[i + 1]);
            if (!v) throw ParseError(source, line_no, "bad number '" + std::string(fields[i + 1]) + "'");
            values[i] = *v;
        }
        auto id = vocab.find(fields[0]);
        if (!id || *id == Vocabulary::pad_id || table.frozen[*id]) continue;
        std::copy(values.begin(), values.end(), table.matrix.data().begin() + *id * expected_dim);
        table.frozen[*id] = true;
        ++table.matched;
    }
    if (first_mismatch_fields != 0) {
        throw ParseError(source, 1, "expected " + std::to_string(expected_dim + 1) + " fields, got " +
                                        std::to_string(first_mismatch_fields));
    }
    return table;
}

EmbeddingTable load_glove_text(const std::filesystem::path& path, std::size_t expected_dim, const Vocabulary& vocab,
                               Rng& rng) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open GloVe file " + path.string());
    return load_glove_text(in, path.string(), expected_dim, vocab, rng);
}

// ---- auxiliary features ----------------------------------------------------

namespace {

std::vector<double> parse_vector(std::string_view text, const std::string& source, std::size_t line_no) {
    std::vector<double> out;
    for (auto f : str::split_ws(text)) {
        auto v = str::parse_double(f);
        if (!v) throw ParseError(source, line_no, "bad number '" + std::string(f) + "'");
        out.push_back(*v);
    }
    return out;
}

}  // namespace

void AuxSequenceFeatures::add_row(const std::string& id, std::size_t row_index, std::vector<double> values) {
    if (rows_.empty() && dim_ == 0) dim_ = values.size();
    if (values.size() != dim_) {
        throw DataError("aux features for instance " + id + ": dimension " + std::to_string(values.size()) +
                        ", expected " + std::to_string(dim_));
    }
    if (!rows_[id].emplace(row_index, std::move(values)).second) {
        throw DataError("aux features for instance " + id + ": row " + std::to_string(row_index) + " repeated");
    }
}

void AuxSequenceFeatures::validate() const {
    for (const auto& [id, rows] : rows_) {
        if (rows.rbegin()->first + 1 != rows.size()) {
            throw DataError("aux features for instance " + id + ": rows are not contiguous from 0");
        }
    }
}

ad::Tensor AuxSequenceFeatures::get(const std::string& id, std::size_t n) const {
    auto it = rows_.find(id);
    if (it == rows_.end()) return ad::Tensor::zeros({n, dim_});
    if (it->second.size() != n) {
        throw DataError("aux features for instance " + id + ": " + std::to_string(it->second.size()) +
                        " rows for " + std::to_string(n) + " tokens");
    }
    ad::Tensor out = ad::Tensor::zeros({n, dim_});
    for (const auto& [r, values] : it->second) std::copy(values.begin(), values.end(), out.data().begin() + r * dim_);
    return out;
}

void AuxInstanceFeature::add(const std::string& id, std::vector<double> values) {
    if (values_.empty() && dim_ == 0) dim_ = values.size();
    if (values.size() != dim_) {
        throw DataError("instance feature for " + id + ": dimension " + std::to_string(values.size()) + ", expected " +
                        std::to_string(dim_));
    }
    if (!values_.emplace(id, std::move(values)).second) throw DataError("instance feature for " + id + " repeated");
}

ad::Tensor AuxInstanceFeature::get(const std::string& id) const {
    auto it = values_.find(id);
    if (it == values_.end()) return ad::Tensor::zeros({1, dim_});
    return ad::Tensor::from({1, dim_}, it->second);
}

AuxSequenceFeatures load_aux_sequence_features(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open aux feature file " + path.string());
    const std::string source = path.string();
    AuxSequenceFeatures out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = str::strip_cr(line);
        if (view.empty()) continue;
        const auto cols = str::split(view, '\t');
        if (cols.size() != 3) throw ParseError(source, line_no, "expected id<TAB>row<TAB>values");
        auto r = str::parse_int(cols[1]);
        if (!r || *r < 0) throw ParseError(source, line_no, "bad row index '" + std::string(cols[1]) + "'");
        out.add_row(std::string(cols[0]), static_cast<std::size_t>(*r), parse_vector(cols[2], source, line_no));
    }
    out.validate();
    return out;
}

AuxInstanceFeature load_aux_instance_features(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open aux feature file " + path.string());
    const std::string source = path.string();
    AuxInstanceFeature out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = str::strip_cr(line);
        if (view.empty()) continue;
        const auto cols = str::split(view, '\t');
        if (cols.size() != 2) throw ParseError(source, line_no, "expected id<TAB>values");
        out.add(std::string(cols[0]), parse_vector(cols[1], source, line_no));
    }
    return out;
}

std::variant<AuxSequenceFeatures, AuxInstanceFeature> load_aux_features(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open aux feature file " + path.string());
    std::string line;
    while (std::getline(in, line)) {
        const auto view = str::strip_cr(line);
        if (view.empty()) continue;
        if (str::split(view, '\t').size() == 3) return load_aux_sequence_features(path);
        return load_aux_instance_features(path);
    }
    return AuxInstanceFeature{};
}

ad::Tensor embed_sequence(ad::Tape& tape, std::span<const TokenId> tokens, const EmbeddingTable& glove,
                          const AuxSequenceFeatures& aux, const std::string& id) {
    ad::Tensor words = ad::gather_rows(tape, glove.matrix, tokens);
    if (aux.dim() == 0) return words;
    return ad::concat(tape, {words, aux.get(id, tokens.size())}, 1);
}

}  // namespace lvc
