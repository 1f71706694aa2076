#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "lvc/rng.hpp"
#include "lvc/tensor.hpp"

namespace lvc {

using TokenId = std::size_t;

class Vocabulary {
public:
    static constexpr TokenId pad_id = 0;
    static constexpr TokenId unk_id = 1;
    static constexpr std::string_view pad_token = "<pad>";
    static constexpr std::string_view unk_token = "<unk>";

    // Specials only.
    Vocabulary();

    // Tokens with frequency >= min_freq, ordered by descending frequency and
    // then lexicographically, after the two specials.
    static Vocabulary build(std::span<const std::vector<std::string>> corpus, std::size_t min_freq = 1);

    // Restores a vocabulary from its full id order (specials included).
    static Vocabulary from_tokens(std::vector<std::string> id_to_token);

    std::size_t size() const { return id_to_token_.size(); }
    std::optional<TokenId> find(std::string_view token) const;
    // Unknown tokens map to unk_id.
    TokenId id(std::string_view token) const;
    const std::string& token(TokenId id) const { return id_to_token_.at(id); }
    const std::vector<std::string>& tokens() const { return id_to_token_; }

    std::vector<TokenId> encode(std::span<const std::string> tokens) const;

private:
    struct Empty {};
    explicit Vocabulary(Empty) {}

    std::vector<std::string> id_to_token_;
    std::unordered_map<std::string, TokenId> token_to_id_;
};

// Word-vector table. Rows loaded from a pretrained file are frozen; the
// <pad> row is all zeros and never updated.
struct EmbeddingTable {
    ad::Tensor matrix;          // |V| x dim
    std::vector<bool> frozen;   // per row
    std::size_t matched = 0;    // rows filled from a pretrained file

    // All rows except <pad> uniform(-0.1, 0.1) and trainable.
    static EmbeddingTable random(std::size_t vocab_size, std::size_t dim, Rng& rng);

    std::size_t dim() const { return matrix.cols(); }
    std::size_t rows() const { return matrix.rows(); }
    // Clears accumulated gradient on frozen rows and on <pad>.
    void mask_gradients();
};

// GloVe text format: `token f1 ... fD` per line, no header. A file whose
// lines consistently carry a different D raises ConfigError; an individual
// line with the wrong field count raises ParseError naming the line.
EmbeddingTable load_glove_text(std::istream& in, const std::string& source, std::size_t expected_dim,
                               const Vocabulary& vocab, Rng& rng);
EmbeddingTable load_glove_text(const std::filesystem::path& path, std::size_t expected_dim, const Vocabulary& vocab,
                               Rng& rng);

// Per-instance n x D matrices standing in for contextual word features.
class AuxSequenceFeatures {
public:
    AuxSequenceFeatures() = default;
    explicit AuxSequenceFeatures(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t count() const { return rows_.size(); }
    bool contains(const std::string& id) const { return rows_.count(id) != 0; }

    void add_row(const std::string& id, std::size_t row_index, std::vector<double> values);
    // Verifies every instance has contiguous rows 0..n-1.
    void validate() const;

    // {n, dim} matrix for `id`; zeros when absent. Row count mismatch is a
    // DataError naming the instance.
    ad::Tensor get(const std::string& id, std::size_t n) const;

private:
    std::size_t dim_ = 0;
    std::map<std::string, std::map<std::size_t, std::vector<double>>> rows_;
};

// One fixed-dimension vector per instance (sentence-level emotional features).
class AuxInstanceFeature {
public:
    AuxInstanceFeature() = default;
    explicit AuxInstanceFeature(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t count() const { return values_.size(); }
    bool contains(const std::string& id) const { return values_.count(id) != 0; }

    void add(const std::string& id, std::vector<double> values);
    // {1, dim} row; zeros when absent.
    ad::Tensor get(const std::string& id) const;

private:
    std::size_t dim_ = 0;
    std::map<std::string, std::vector<double>> values_;
};

AuxSequenceFeatures load_aux_sequence_features(const std::filesystem::path& path);
AuxInstanceFeature load_aux_instance_features(const std::filesystem::path& path);
// Picks the format from the column count of the first record.
std::variant<AuxSequenceFeatures, AuxInstanceFeature> load_aux_features(const std::filesystem::path& path);

// Row t = [glove(x_t); aux_t]; {n, D_G + D_E}.
ad::Tensor embed_sequence(ad::Tape& tape, std::span<const TokenId> tokens, const EmbeddingTable& glove,
                          const AuxSequenceFeatures& aux, const std::string& id);

}  // namespace lvc
