#pragma once

// A complete classifier: vocabulary, word embeddings, the shared BiLSTM
// encoder and one of the four label heads.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lvc/baselines.hpp"
#include "lvc/corpus.hpp"
#include "lvc/encoder.hpp"
#include "lvc/labels.hpp"
#include "lvc/lvc_decoder.hpp"
#include "lvc/vocab.hpp"

namespace lvc {

enum class ModelKind { seq2emo, binary_br2, binary_br_tau, sgm };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct ModelDims {
    std::size_t hidden = 64;        // H, per direction
    std::size_t layers = 2;
    std::size_t glove_dim = 50;     // D_G
    std::size_t aux_dim = 0;        // D_E, per-token auxiliary features
    std::size_t moji_dim = 0;       // D_M, per-instance auxiliary feature
    std::size_t signal_dim = 64;    // D_S
    std::size_t moji_proj_dim = 64; // D_F
    std::size_t label_dim = 64;     // D_L
    double tau = 0.5;
    double dropout = 0.2;

    std::size_t width() const { return 2 * hidden; }
};

using Head = std::variant<Seq2EmoDecoder, BrTwoCellHead, BrThresholdHead, SgmDecoder>;

struct ModelBundle {
    ModelKind kind = ModelKind::seq2emo;
    ModelDims dims;
    Vocabulary vocab;
    LabelSpace labels;
    EmbeddingTable embeddings;
    EncoderParams encoder;
    Head head;

    // Random initialisation drawn from `rng` in a fixed order: embeddings,
    // encoder, head.
    static ModelBundle init(ModelKind kind, const ModelDims& dims, Vocabulary vocab, LabelSpace labels, Rng& rng);

    std::size_t k() const { return labels.size(); }
    // Embeddings and encoder.
    std::vector<ad::NamedTensor> encoder_parameters() const;
    // Everything in the label head.
    std::vector<ad::NamedTensor> decoder_parameters() const;
    std::vector<ad::NamedTensor> parameters() const;
};

struct Instance {
    std::string id;
    std::vector<TokenId> tokens;
    std::optional<BinaryLabelVector> gold;
};

// Raises DataError for a record without tokens or with labels outside `labels`.
Instance make_instance(const CorpusRecord& record, const Vocabulary& vocab, const LabelSpace& labels);
std::vector<Instance> make_instances(const std::vector<CorpusRecord>& records, const Vocabulary& vocab,
                                     const LabelSpace& labels);

// Optional precomputed features. Missing entries read as zeros.
struct FeatureStore {
    AuxSequenceFeatures sequence;
    AuxInstanceFeature instance;

    ad::Tensor moji(const std::string& id, std::size_t dim) const;
    // Checks the loaded dimensions against the model (DataError).
    void check(const ModelDims& dims) const;
};

EncoderOutput encode_instance(ad::Tape& tape, const ModelBundle& model, const Instance& inst,
                              const FeatureStore& features, bool training, Rng& rng);

// Head scores: k x 2 for seq2emo and binary_br2, k x 1 for binary_br_tau.
// SGM has no fixed-size score and raises ContractError.
ad::Tensor forward_logits(ad::Tape& tape, const ModelBundle& model, const Instance& inst, const FeatureStore& features,
                          bool training, Rng& rng);

// Inference with dropout off. The gold field of `inst` is never read.
BinaryLabelVector predict(const ModelBundle& model, const Instance& inst, const FeatureStore& features);

// Training objective for one instance (requires gold).
ad::Tensor training_loss(ad::Tape& tape, const ModelBundle& model, const Instance& inst, const FeatureStore& features,
                         Rng& rng);

}  // namespace lvc
