#include "lvc/model.hpp"

#include "lvc/errors.hpp"

namespace lvc {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::seq2emo:
            return "seq2emo";
        case ModelKind::binary_br2:
            return "binary_br2";
        case ModelKind::binary_br_tau:
            return "binary_br_tau";
        case ModelKind::sgm:
            return "sgm";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    for (auto kind : {ModelKind::seq2emo, ModelKind::binary_br2, ModelKind::binary_br_tau, ModelKind::sgm}) {
        if (to_string(kind) == name) return kind;
    }
    throw ConfigError("unknown model '" + name + "' (expected seq2emo, binary_br2, binary_br_tau or sgm)");
}

ModelBundle ModelBundle::init(ModelKind kind, const ModelDims& dims, Vocabulary vocab, LabelSpace labels, Rng& rng) {
    if (labels.size() == 0) throw ConfigError("model needs at least one label");
    if (dims.hidden == 0 || dims.layers == 0 || dims.glove_dim == 0) {
        throw ConfigError("H, layers and D_G must be positive");
    }
    ModelBundle m;
    m.kind = kind;
    m.dims = dims;
    m.vocab = std::move(vocab);
    m.labels = std::move(labels);
    m.embeddings = EmbeddingTable::random(m.vocab.size(), dims.glove_dim, rng);
    m.encoder = EncoderParams::init(dims.glove_dim + dims.aux_dim, dims.hidden, dims.layers, rng);
    const std::size_t k = m.labels.size();
    switch (kind) {
        case ModelKind::seq2emo:
            m.head = Seq2EmoDecoder::init(k, dims.width(), dims.signal_dim, dims.moji_proj_dim, dims.moji_dim, rng);
            break;
        case ModelKind::binary_br2:
            m.head = BrTwoCellHead::init(k, dims.width(), rng);
            break;
        case ModelKind::binary_br_tau:
            m.head = BrThresholdHead::init(k, dims.width(), dims.tau, rng);
            break;
        case ModelKind::sgm:
            m.head = SgmDecoder::init(k, dims.width(), dims.label_dim, rng);
            break;
    }
    return m;
}

std::vector<ad::NamedTensor> ModelBundle::encoder_parameters() const {
    std::vector<ad::NamedTensor> out{{"embeddings", embeddings.matrix}};
    encoder.collect(out, "encoder");
    return out;
}

std::vector<ad::NamedTensor> ModelBundle::decoder_parameters() const {
    std::vector<ad::NamedTensor> out;
    std::visit([&](const auto& h) { h.collect(out, "head"); }, head);
    return out;
}

std::vector<ad::NamedTensor> ModelBundle::parameters() const {
    auto out = encoder_parameters();
    for (auto& p : decoder_parameters()) out.push_back(std::move(p));
    return out;
}

Instance make_instance(const CorpusRecord& record, const Vocabulary& vocab, const LabelSpace& labels) {
    if (record.tokens.empty()) throw DataError("instance " + record.id + " has no tokens");
    Instance inst;
    inst.id = record.id;
    inst.tokens = vocab.encode(record.tokens);
    inst.gold = BinaryLabelVector::from_names(labels, record.labels);
    return inst;
}

std::vector<Instance> make_instances(const std::vector<CorpusRecord>& records, const Vocabulary& vocab,
                                     const LabelSpace& labels) {
    std::vector<Instance> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(make_instance(r, vocab, labels));
    return out;
}

ad::Tensor FeatureStore::moji(const std::string& id, std::size_t dim) const {
    if (dim == 0 || instance.dim() == 0) return ad::Tensor::zeros({1, dim});
    return instance.get(id);
}

void FeatureStore::check(const ModelDims& dims) const {
    if (sequence.count() > 0 && sequence.dim() != dims.aux_dim) {
        throw DataError("per-token features have dimension " + std::to_string(sequence.dim()) + ", model expects D_E = " +
                        std::to_string(dims.aux_dim));
    }
    if (instance.count() > 0 && instance.dim() != dims.moji_dim) {
        throw DataError("instance features have dimension " + std::to_string(instance.dim()) +
                        ", model expects D_M = " + std::to_string(dims.moji_dim));
    }
}

EncoderOutput encode_instance(ad::Tape& tape, const ModelBundle& model, const Instance& inst,
                              const FeatureStore& features, bool training, Rng& rng) {
    ad::Tensor x;
    if (model.dims.aux_dim == 0) {
        x = ad::gather_rows(tape, model.embeddings.matrix, inst.tokens);
    } else if (features.sequence.dim() == 0) {
        const ad::Tensor zeros = ad::Tensor::zeros({inst.tokens.size(), model.dims.aux_dim});
        x = ad::concat(tape, {ad::gather_rows(tape, model.embeddings.matrix, inst.tokens), zeros}, 1);
    } else {
        x = embed_sequence(tape, inst.tokens, model.embeddings, features.sequence, inst.id);
    }
    return encode(tape, x, model.encoder, model.dims.dropout, training, rng);
}

namespace {

template <class... F>
struct Overloaded : F... {
    using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

const BinaryLabelVector& gold_of(const Instance& inst, std::size_t k) {
    if (!inst.gold) throw ContractError("instance " + inst.id + " has no gold labels");
    if (inst.gold->size() != k) throw ContractError("instance " + inst.id + " gold has the wrong label count");
    return *inst.gold;
}

}  // namespace

ad::Tensor forward_logits(ad::Tape& tape, const ModelBundle& model, const Instance& inst, const FeatureStore& features,
                          bool training, Rng& rng) {
    const EncoderOutput enc = encode_instance(tape, model, inst, features, training, rng);
    return std::visit(Overloaded{
                          [&](const Seq2EmoDecoder& d) {
                              return lvc_logits(tape, enc, d, features.moji(inst.id, model.dims.moji_dim));
                          },
                          [&](const BrTwoCellHead& h) { return h.logits(tape, enc.final_h); },
                          [&](const BrThresholdHead& h) { return h.logits(tape, enc.final_h); },
                          [&](const SgmDecoder&) -> ad::Tensor {
                              throw ContractError("the sequence-generation head has no fixed-size logits");
                          },
                      },
                      model.head);
}

BinaryLabelVector predict(const ModelBundle& model, const Instance& inst, const FeatureStore& features) {
    ad::Tape tape(false);
    Rng unused(0);
    if (const auto* sgm = std::get_if<SgmDecoder>(&model.head)) {
        const EncoderOutput enc = encode_instance(tape, model, inst, features, false, unused);
        return sgm_decode_greedy(enc, *sgm).labels;
    }
    const ad::Tensor logits = forward_logits(tape, model, inst, features, false, unused);
    switch (model.kind) {
        case ModelKind::binary_br2:
            return br_predict(logits, BrVariant::two_cell);
        case ModelKind::binary_br_tau:
            return br_predict(logits, BrVariant::threshold, std::get<BrThresholdHead>(model.head).tau);
        default:
            return predict(logits);
    }
}

ad::Tensor training_loss(ad::Tape& tape, const ModelBundle& model, const Instance& inst, const FeatureStore& features,
                         Rng& rng) {
    const BinaryLabelVector& gold = gold_of(inst, model.k());
    if (const auto* sgm = std::get_if<SgmDecoder>(&model.head)) {
        const EncoderOutput enc = encode_instance(tape, model, inst, features, true, rng);
        return sgm_train_loss(tape, enc, *sgm, SgmTarget::from_bits(gold));
    }
    const ad::Tensor logits = forward_logits(tape, model, inst, features, true, rng);
    switch (model.kind) {
        case ModelKind::binary_br2:
            return br_two_cell_loss(tape, logits, gold);
        case ModelKind::binary_br_tau:
            return br_threshold_loss(tape, logits, gold);
        default:
            return lvc_loss(tape, logits, gold);
    }
}

}  // namespace lvc
