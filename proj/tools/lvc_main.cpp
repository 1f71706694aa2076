// Command-line front end: train, eval, predict, build-corpus, stats,
// grad-check and synth.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "lvc/config.hpp"
#include "lvc/corpus.hpp"
#include "lvc/errors.hpp"
#include "lvc/gradcheck_suite.hpp"
#include "lvc/strings.hpp"
#include "lvc/synth.hpp"
#include "lvc/trainer.hpp"

#ifndef LVC_DATA_DIR
#define LVC_DATA_DIR "data"
#endif

namespace {

using namespace lvc;

struct TrainArgs {
    std::string config;
    std::vector<std::string> overrides;
    bool quiet = false;
};

struct EvalArgs {
    std::string checkpoint;
    std::string data;
    std::string format = "canonical";
    std::string aux_sequence;
    std::string aux_instance;
};

struct PredictArgs {
    std::string checkpoint;
    std::string text;
};

struct BuildArgs {
    std::string input;
    std::string hashtags;
    std::string output;
    std::string aliases = std::string(LVC_DATA_DIR) + "/emoji_aliases.tsv";
    std::uint64_t seed = 0;
    std::size_t min_tokens = 3;
    std::size_t max_tokens = 50;
    std::size_t min_labels = 1;
};

struct StatsArgs {
    std::string data;
    std::string format = "canonical";
    std::string name;
};

struct GradArgs {
    std::string model = "seq2emo";
    std::uint64_t seed = 1;
};

struct SynthArgs {
    std::string kind;
    std::string out;
    std::uint64_t seed = 1;
    std::size_t count = 200;
};

int cmd_train(const TrainArgs& a) {
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const auto& o : a.overrides) overrides.push_back(split_override(o));
    const RunConfig cfg = load_config(a.config, overrides);
    const TrainingState state = run_training(cfg, a.quiet ? nullptr : &std::cerr);
    std::printf("best_epoch\t%zu\n", state.epoch);
    if (!state.dev_history.empty() && state.epoch > 0) {
        std::printf("best_jaccard\t%.6f\n", state.dev_history[state.epoch - 1]);
    }
    if (!cfg.checkpoint.empty()) std::printf("checkpoint\t%s\n", cfg.checkpoint.c_str());
    return 0;
}

FeatureStore features_for(const RunConfig& cfg, const std::string& aux_sequence, const std::string& aux_instance) {
    FeatureStore f;
    if (!aux_sequence.empty()) f.sequence = load_aux_sequence_features(aux_sequence);
    if (!aux_instance.empty()) f.instance = load_aux_instance_features(aux_instance);
    f.check(cfg.dims);
    return f;
}

int cmd_eval(const EvalArgs& a) {
    const TrainingState state = load_checkpoint(a.checkpoint);
    const Dataset data = load_dataset(a.data, a.format, state.model.labels.names());
    const auto instances = make_instances(data.records, state.model.vocab, state.model.labels);
    const FeatureStore features = features_for(state.config, a.aux_sequence, a.aux_instance);
    evaluate(state.model, instances, features).report.write(std::cout);
    return 0;
}

int cmd_predict(const PredictArgs& a) {
    const TrainingState state = load_checkpoint(a.checkpoint);
    CorpusRecord record{"cli", a.text, tokenize(a.text), {}};
    if (record.tokens.empty()) throw DataError("--text has no tokens");
    Instance inst = make_instance(record, state.model.vocab, state.model.labels);
    inst.gold.reset();
    const BinaryLabelVector bits = predict(state.model, inst, FeatureStore{});
    std::cout << str::join(bits.names(state.model.labels), ",") << '\n';
    return 0;
}

int cmd_build_corpus(const BuildArgs& a) {
    const HashtagMap map = load_hashtag_map(a.hashtags);
    const EmojiAliasTable aliases = load_emoji_aliases(a.aliases);
    std::ifstream in(a.input);
    if (!in) throw DataError("cannot open input " + a.input);
    BuildOptions options;
    options.seed = a.seed;
    options.min_tokens = a.min_tokens;
    options.max_tokens = a.max_tokens;
    options.min_labels = a.min_labels;
    if (options.min_tokens > options.max_tokens) throw ConfigError("--min-tokens exceeds --max-tokens");
    const auto records = build_corpus(in, map, aliases, options, &std::cerr);
    std::ofstream out(a.output, std::ios::binary);
    if (!out) throw DataError("cannot write " + a.output);
    write_canonical_tsv(out, records, map.label_space());
    std::cerr << "wrote " << records.size() << " records to " << a.output << '\n';
    return 0;
}

int cmd_stats(const StatsArgs& a) {
    const Dataset data = load_dataset(a.data, a.format, {});
    const std::string name = a.name.empty() ? std::filesystem::path(a.data).stem().string() : a.name;
    write_stats(std::cout, name, dataset_stats(data.records));
    return 0;
}

int cmd_grad_check(const GradArgs& a) {
    const auto start = std::chrono::steady_clock::now();
    auto cases = operator_gradient_cases(a.seed);
    cases.push_back(model_gradient_case(parse_model_kind(a.model), a.seed));
    bool ok = true;
    for (const auto& c : cases) {
        std::printf("%-24s max_error %.3e  %s\n", c.name.c_str(), c.report.max_error, c.report.passed() ? "ok" : "FAIL");
        ok = ok && c.report.passed();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s: %zu cases in %.2f s\n", ok ? "passed" : "FAILED", cases.size(), secs);
    return ok ? 0 : 3;
}

int cmd_synth(const SynthArgs& a) {
    const auto records = synthesize(parse_synth_kind(a.kind), a.seed, a.count);
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw DataError("cannot write " + a.out);
    write_canonical_tsv(out, records, synth_labels());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-label sequence classification: training, evaluation and corpus tools"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train a model from a config file");
    train->add_option("--config", train_args.config, "key = value config file")->required()->check(CLI::ExistingFile);
    train->add_option("--set", train_args.overrides, "Override a config value (key=value); repeatable");
    train->add_flag("--quiet", train_args.quiet, "No per-epoch log");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Score a checkpoint on a labelled data file");
    eval->add_option("--checkpoint", eval_args.checkpoint)->required();
    eval->add_option("--data", eval_args.data)->required();
    eval->add_option("--format", eval_args.format)->check(CLI::IsMember({"canonical", "semeval"}));
    eval->add_option("--aux-sequence", eval_args.aux_sequence, "Per-token feature file");
    eval->add_option("--aux-instance", eval_args.aux_instance, "Per-instance feature file");

    PredictArgs predict_args;
    auto* pred = app.add_subcommand("predict", "Print the predicted labels for one text");
    pred->add_option("--checkpoint", predict_args.checkpoint)->required();
    pred->add_option("--text", predict_args.text)->required();

    BuildArgs build_args;
    auto* build = app.add_subcommand("build-corpus", "Build a labelled corpus from raw tweets via emotion hashtags");
    build->add_option("--input", build_args.input, "Raw text, one tweet per line")->required();
    build->add_option("--hashtags", build_args.hashtags, "emotion<TAB>#tag,... file")->required();
    build->add_option("--output", build_args.output, "Canonical TSV output")->required();
    build->add_option("--seed", build_args.seed, "Balancing seed")->required();
    build->add_option("--aliases", build_args.aliases, "Emoji alias table")->capture_default_str();
    build->add_option("--min-tokens", build_args.min_tokens)->capture_default_str();
    build->add_option("--max-tokens", build_args.max_tokens)->capture_default_str();
    build->add_option("--min-labels", build_args.min_labels, "Drop tweets with fewer labels")->capture_default_str();

    StatsArgs stats_args;
    auto* stats = app.add_subcommand("stats", "Emotion count, instance count and multi-label share");
    stats->add_option("--data", stats_args.data)->required();
    stats->add_option("--format", stats_args.format)->check(CLI::IsMember({"canonical", "semeval"}));
    stats->add_option("--name", stats_args.name, "Dataset name in the output (default: file stem)");

    GradArgs grad_args;
    auto* grad = app.add_subcommand("grad-check", "Finite-difference gradient checks");
    grad->add_option("--model", grad_args.model)->capture_default_str();
    grad->add_option("--seed", grad_args.seed)->capture_default_str();

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Write a synthetic multi-label data set");
    synth->add_option("--kind", synth_args.kind)->required()->check(CLI::IsMember({"correlated", "independent"}));
    synth->add_option("--out", synth_args.out)->required();
    synth->add_option("--seed", synth_args.seed)->capture_default_str();
    synth->add_option("--count", synth_args.count)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*train) return cmd_train(train_args);
        if (*eval) return cmd_eval(eval_args);
        if (*pred) return cmd_predict(predict_args);
        if (*build) return cmd_build_corpus(build_args);
        if (*stats) return cmd_stats(stats_args);
        if (*grad) return cmd_grad_check(grad_args);
        if (*synth) return cmd_synth(synth_args);
    } catch (const lvc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
