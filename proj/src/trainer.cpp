#include "lvc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <sstream>

#include "lvc/errors.hpp"

namespace lvc {

Dataset load_dataset(const std::filesystem::path& path, const std::string& format,
                     const std::vector<std::string>& labels) {
    if (format == "semeval") {
        auto data = load_semeval_ec(path);
        if (!labels.empty() && !(data.labels == LabelSpace(labels))) {
            throw ConfigError(path.string() + ": label columns do not match the expected label space");
        }
        return {std::move(data.labels), std::move(data.records)};
    }
    if (format != "canonical") throw ConfigError("unknown data format '" + format + "'");
    auto records = load_canonical_tsv(path);
    if (labels.empty()) {
        std::set<std::string> seen;
        for (const auto& r : records) seen.insert(r.labels.begin(), r.labels.end());
        if (seen.empty()) throw DataError(path.string() + ": no labels occur; set `labels` explicitly");
        return {LabelSpace({seen.begin(), seen.end()}), std::move(records)};
    }
    LabelSpace space(labels);
    for (const auto& r : records) {
        for (const auto& l : r.labels) {
            if (!space.index(l)) {
                throw ConfigError(path.string() + ": label '" + l + "' (record " + r.id + ") is not in the label space");
            }
        }
    }
    return {std::move(space), std::move(records)};
}

FeatureStore load_features(const RunConfig& config) {
    FeatureStore f;
    if (!config.aux_sequence.empty()) f.sequence = load_aux_sequence_features(config.aux_sequence);
    if (!config.aux_instance.empty()) f.instance = load_aux_instance_features(config.aux_instance);
    f.check(config.dims);
    return f;
}

namespace {

ad::AdamState make_adam(double lr) { return lr > 0.0 ? ad::AdamState(lr) : ad::AdamState(); }

std::vector<ad::Tensor> tensors_of(const std::vector<ad::NamedTensor>& named) {
    std::vector<ad::Tensor> out;
    out.reserve(named.size());
    for (const auto& n : named) out.push_back(n.tensor);
    return out;
}

struct Snapshot {
    std::vector<std::vector<double>> values;
    ad::AdamState encoder_opt;
    ad::AdamState decoder_opt;
    std::size_t epoch = 0;
};

Snapshot take_snapshot(const TrainingState& s) {
    Snapshot snap{{}, s.encoder_opt, s.decoder_opt, s.epoch};
    for (const auto& p : s.model.parameters()) snap.values.emplace_back(p.tensor.data().begin(), p.tensor.data().end());
    return snap;
}

void restore_snapshot(TrainingState& s, const Snapshot& snap) {
    const auto params = s.model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
        ad::Tensor t = params[i].tensor;
        std::copy(snap.values[i].begin(), snap.values[i].end(), t.data().begin());
    }
    s.encoder_opt = snap.encoder_opt;
    s.decoder_opt = snap.decoder_opt;
    s.epoch = snap.epoch;
}

void zero_grads(std::vector<ad::Tensor>& ts) {
    for (auto& t : ts) t.zero_grad();
}

}  // namespace

TrainingState initial_state(const RunConfig& config, const LabelSpace& labels,
                            const std::vector<CorpusRecord>& train_records) {
    if (config.k != 0 && config.k != labels.size()) {
        throw ConfigError("k = " + std::to_string(config.k) + " but the data has " + std::to_string(labels.size()) +
                          " labels");
    }
    std::vector<std::vector<std::string>> corpus;
    corpus.reserve(train_records.size());
    for (const auto& r : train_records) corpus.push_back(r.tokens);

    TrainingState s;
    s.config = config;
    s.config.labels = labels.names();
    Rng rng(config.seed);
    s.model = ModelBundle::init(config.model, config.dims, Vocabulary::build(corpus, config.min_freq), labels, rng);
    if (!config.glove.empty()) {
        s.model.embeddings = load_glove_text(config.glove, config.dims.glove_dim, s.model.vocab, rng);
    }
    s.encoder_opt = make_adam(config.lr_encoder);
    s.decoder_opt = make_adam(config.lr_decoder);
    return s;
}

EvalResult evaluate(const ModelBundle& model, const std::vector<Instance>& data, const FeatureStore& features) {
    if (data.empty()) throw DataError("evaluation set is empty");
    EvalResult r;
    std::vector<BinaryLabelVector> gold;
    for (const auto& inst : data) {
        if (!inst.gold) throw ContractError("instance " + inst.id + " has no gold labels");
        gold.push_back(*inst.gold);
        r.predictions.push_back(predict(model, inst, features));
    }
    const EvalBatch batch(std::move(gold), r.predictions);
    r.report = multilabel_report(batch);
    r.jaccard = r.report.values.front().second;
    return r;
}

TrainingState train(TrainingState state, const std::vector<Instance>& train, const std::vector<Instance>& dev,
                    const FeatureStore& features, std::ostream* log) {
    const RunConfig& cfg = state.config;
    if (train.empty()) throw DataError("training set is empty");
    features.check(cfg.dims);

    auto enc_params = tensors_of(state.model.encoder_parameters());
    auto dec_params = tensors_of(state.model.decoder_parameters());
    const std::vector<Instance>& select_on = dev.empty() ? train : dev;

    // Separate streams so data order does not depend on dropout draws.
    Rng order_rng(cfg.seed + 0x9E3779B97F4A7C15ull);
    Rng dropout_rng(cfg.seed + 0xD1B54A32D192ED03ull);
    // Resuming replays the shuffles of the completed epochs.
    std::vector<std::size_t> order(train.size());
    for (std::size_t e = 0; e < state.epoch; ++e) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle(order, order_rng);
    }

    double best = -1.0;
    for (std::size_t i = 0; i < state.dev_history.size(); ++i) best = std::max(best, state.dev_history[i]);
    Snapshot best_snap = take_snapshot(state);
    std::size_t since_best = 0;

    zero_grads(enc_params);
    zero_grads(dec_params);
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle(order, order_rng);

        double epoch_loss = 0.0;
        std::size_t batch_no = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_no) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const double inv = 1.0 / static_cast<double>(end - start);
            for (std::size_t j = start; j < end; ++j) {
                ad::Tape tape;
                auto where = [&] {
                    std::ostringstream msg;
                    msg << "epoch " << state.epoch + 1 << ", batch " << batch_no + 1 << " (instance "
                        << train[order[j]].id << ")";
                    return msg.str();
                };
                ad::Tensor loss;
                try {
                    loss = training_loss(tape, state.model, train[order[j]], features, dropout_rng);
                } catch (const NumericError& e) {
                    throw NumericError(std::string(e.what()) + " at " + where());
                }
                const double value = loss.item();
                if (!std::isfinite(value)) {
                    std::ostringstream msg;
                    msg << "non-finite loss at " << where() << ": loss = " << value;
                    throw NumericError(msg.str());
                }
                epoch_loss += value;
                tape.backward(ad::scale(tape, loss, inv));
            }
            state.model.embeddings.mask_gradients();
            if (cfg.lr_encoder > 0.0) ad::adam_step(enc_params, state.encoder_opt);
            if (cfg.lr_decoder > 0.0) ad::adam_step(dec_params, state.decoder_opt);
            zero_grads(enc_params);
            zero_grads(dec_params);
        }
        ++state.epoch;

        const double score = evaluate(state.model, select_on, features).jaccard;
        state.dev_history.push_back(score);
        if (log) {
            char line[160];
            std::snprintf(line, sizeof line, "epoch %zu\tloss %.6f\t%s_jaccard %.6f\n", state.epoch,
                          epoch_loss / static_cast<double>(train.size()), dev.empty() ? "train" : "dev", score);
            *log << line << std::flush;
        }
        if (score > best) {
            best = score;
            best_snap = take_snapshot(state);
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            if (log) *log << "early stop: no improvement for " << cfg.patience << " epochs\n";
            break;
        }
    }
    restore_snapshot(state, best_snap);
    return state;
}

TrainingState run_training(const RunConfig& config, std::ostream* log) {
    if (config.train.empty()) throw ConfigError("`train` data file is not set");
    Dataset train_data = load_dataset(config.train, config.format, config.labels);
    std::vector<CorpusRecord> dev_records;
    if (!config.dev.empty()) dev_records = load_dataset(config.dev, config.format, train_data.labels.names()).records;

    TrainingState state = initial_state(config, train_data.labels, train_data.records);
    const FeatureStore features = load_features(config);
    const auto train_set = make_instances(train_data.records, state.model.vocab, state.model.labels);
    const auto dev_set = make_instances(dev_records, state.model.vocab, state.model.labels);
    if (log) {
        *log << "model " << to_string(config.model) << ": " << state.model.k() << " labels, vocabulary "
             << state.model.vocab.size() << ", " << train_set.size() << " train / " << dev_set.size() << " dev\n";
    }
    state = train(std::move(state), train_set, dev_set, features, log);
    if (!config.test.empty() && log) {
        const auto test_records = load_dataset(config.test, config.format, state.model.labels.names()).records;
        const auto test_set = make_instances(test_records, state.model.vocab, state.model.labels);
        *log << "test metrics:\n";
        evaluate(state.model, test_set, features).report.write(*log);
    }
    if (!config.checkpoint.empty()) save_checkpoint(config.checkpoint, state);
    return state;
}

}  // namespace lvc
