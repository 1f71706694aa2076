#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "lvc/config.hpp"
#include "lvc/metrics.hpp"
#include "lvc/model.hpp"

namespace lvc {

// Everything needed to resume or evaluate a run.
struct TrainingState {
    RunConfig config;
    ModelBundle model;
    ad::AdamState encoder_opt;
    ad::AdamState decoder_opt;
    std::size_t epoch = 0;             // epochs completed when this state was taken
    std::vector<double> dev_history;   // selection metric after each epoch
};

// Binary container: "LVC1", u64 length + config echo (UTF-8 key = value
// lines, including the label and vocabulary lists), u64 record count, then
// per tensor: u32 name length, name, u32 rank, u64 dims, little-endian f64
// values.
void write_checkpoint(std::ostream& out, const TrainingState& state);
TrainingState read_checkpoint(std::istream& in, const std::string& source);
void save_checkpoint(const std::filesystem::path& path, const TrainingState& state);
TrainingState load_checkpoint(const std::filesystem::path& path);

struct Dataset {
    LabelSpace labels;
    std::vector<CorpusRecord> records;
};

// Reads a data file in `format` ("canonical" or "semeval"). For canonical
// data with an empty `labels`, the label space is the sorted set of labels
// that occur.
Dataset load_dataset(const std::filesystem::path& path, const std::string& format,
                     const std::vector<std::string>& labels);

// Loads the optional feature files named in the config and checks them.
FeatureStore load_features(const RunConfig& config);

// Fresh model and optimizer state for `config` over the given training
// records. Initialisation draws only from Rng(config.seed).
TrainingState initial_state(const RunConfig& config, const LabelSpace& labels,
                            const std::vector<CorpusRecord>& train_records);

struct EvalResult {
    std::vector<BinaryLabelVector> predictions;
    MetricReport report;
    double jaccard = 0.0;
};

EvalResult evaluate(const ModelBundle& model, const std::vector<Instance>& data, const FeatureStore& features);

// Runs up to config.epochs further epochs from `state`. After each epoch the
// model is scored by Jaccard on `dev` (on `train` when dev is empty); the
// returned state holds the best-scoring parameters and optimizer state and
// the full score history. Stops after `patience` epochs without improvement.
TrainingState train(TrainingState state, const std::vector<Instance>& train, const std::vector<Instance>& dev,
                    const FeatureStore& features, std::ostream* log = nullptr);

// Loads the data named in `config`, trains, and saves to config.checkpoint
// when it is set.
TrainingState run_training(const RunConfig& config, std::ostream* log = nullptr);

}  // namespace lvc
