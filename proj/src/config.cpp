#include "lvc/config.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "lvc/errors.hpp"
#include "lvc/strings.hpp"

namespace lvc {

namespace {

std::size_t to_size(const std::string& key, const std::string& value, const std::string& origin) {
    auto v = str::parse_int(value);
    if (!v || *v < 0) throw ConfigError(origin + ": " + key + " must be a non-negative integer, got '" + value + "'");
    return static_cast<std::size_t>(*v);
}

double to_double(const std::string& key, const std::string& value, const std::string& origin) {
    auto v = str::parse_double(value);
    if (!v || !std::isfinite(*v)) throw ConfigError(origin + ": " + key + " must be a number, got '" + value + "'");
    return *v;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value, const std::string& origin) {
    auto sz = [&] { return to_size(key, value, origin); };
    auto dbl = [&] { return to_double(key, value, origin); };
    if (key == "model") {
        model = parse_model_kind(value);
    } else if (key == "k") {
        k = sz();
    } else if (key == "H") {
        dims.hidden = sz();
    } else if (key == "layers") {
        dims.layers = sz();
    } else if (key == "D_G") {
        dims.glove_dim = sz();
    } else if (key == "D_E") {
        dims.aux_dim = sz();
    } else if (key == "D_M") {
        dims.moji_dim = sz();
    } else if (key == "D_S") {
        dims.signal_dim = sz();
    } else if (key == "D_F") {
        dims.moji_proj_dim = sz();
    } else if (key == "D_L") {
        dims.label_dim = sz();
    } else if (key == "tau") {
        dims.tau = dbl();
    } else if (key == "dropout_p") {
        dims.dropout = dbl();
    } else if (key == "lr_encoder") {
        lr_encoder = dbl();
    } else if (key == "lr_decoder") {
        lr_decoder = dbl();
    } else if (key == "epochs") {
        epochs = sz();
    } else if (key == "batch_size") {
        batch_size = sz();
    } else if (key == "patience") {
        patience = sz();
    } else if (key == "min_freq") {
        min_freq = sz();
    } else if (key == "seed") {
        seed = sz();
    } else if (key == "format") {
        if (value != "canonical" && value != "semeval") {
            throw ConfigError(origin + ": format must be canonical or semeval, got '" + value + "'");
        }
        format = value;
    } else if (key == "labels") {
        labels.clear();
        for (auto name : str::split(value, ',')) {
            const auto t = str::trim(name);
            if (!t.empty()) labels.emplace_back(t);
        }
    } else if (key == "train") {
        train = value;
    } else if (key == "dev") {
        dev = value;
    } else if (key == "test") {
        test = value;
    } else if (key == "glove") {
        glove = value;
    } else if (key == "aux_sequence") {
        aux_sequence = value;
    } else if (key == "aux_instance") {
        aux_instance = value;
    } else if (key == "checkpoint") {
        checkpoint = value;
    } else {
        throw ConfigError(origin + ": unknown key '" + key + "'");
    }
    explicit_keys.insert(key);
}

void RunConfig::validate() const {
    auto only_for = [&](const char* key, ModelKind kind) {
        if (explicit_keys.count(key) && model != kind) {
            throw ConfigError(std::string(key) + " applies only to model " + to_string(kind) + ", not " +
                              to_string(model));
        }
    };
    only_for("tau", ModelKind::binary_br_tau);
    only_for("D_L", ModelKind::sgm);
    only_for("D_S", ModelKind::seq2emo);
    only_for("D_F", ModelKind::seq2emo);
    only_for("D_M", ModelKind::seq2emo);
    only_for("aux_instance", ModelKind::seq2emo);

    if (dims.hidden == 0) throw ConfigError("H must be positive");
    if (dims.layers == 0) throw ConfigError("layers must be positive");
    if (dims.glove_dim == 0) throw ConfigError("D_G must be positive");
    if (model == ModelKind::sgm && dims.label_dim == 0) throw ConfigError("D_L must be positive");
    if (!(dims.tau > 0.0 && dims.tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
    if (!(dims.dropout >= 0.0 && dims.dropout < 1.0)) throw ConfigError("dropout_p must lie in [0, 1)");
    if (lr_encoder < 0.0 || lr_decoder < 0.0) throw ConfigError("learning rates must be non-negative");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (min_freq == 0) throw ConfigError("min_freq must be positive");
    if (!aux_sequence.empty() && dims.aux_dim == 0) throw ConfigError("aux_sequence given but D_E = 0");
    if (!aux_instance.empty() && dims.moji_dim == 0) throw ConfigError("aux_instance given but D_M = 0");
    if (format == "semeval" && !labels.empty()) {
        throw ConfigError("labels cannot be set for semeval data; they come from the file header");
    }
}

std::string RunConfig::echo() const {
    std::ostringstream os;
    os << "model = " << to_string(model) << '\n';
    os << "H = " << dims.hidden << '\n';
    os << "layers = " << dims.layers << '\n';
    os << "D_G = " << dims.glove_dim << '\n';
    os << "D_E = " << dims.aux_dim << '\n';
    if (model == ModelKind::seq2emo) {
        os << "D_M = " << dims.moji_dim << '\n';
        os << "D_S = " << dims.signal_dim << '\n';
        os << "D_F = " << dims.moji_proj_dim << '\n';
    }
    if (model == ModelKind::sgm) os << "D_L = " << dims.label_dim << '\n';
    if (model == ModelKind::binary_br_tau) os << "tau = " << format_double(dims.tau) << '\n';
    os << "dropout_p = " << format_double(dims.dropout) << '\n';
    os << "lr_encoder = " << format_double(lr_encoder) << '\n';
    os << "lr_decoder = " << format_double(lr_decoder) << '\n';
    os << "epochs = " << epochs << '\n';
    os << "batch_size = " << batch_size << '\n';
    os << "patience = " << patience << '\n';
    os << "min_freq = " << min_freq << '\n';
    os << "seed = " << seed << '\n';
    return os.str();
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in, const std::string& source) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = str::trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = str::trim(view.substr(0, eq));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
        out.emplace_back(std::string(key), std::string(str::trim(view.substr(eq + 1))));
    }
    return out;
}

RunConfig config_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs, const std::string& source) {
    RunConfig cfg;
    for (const auto& [k, v] : pairs) cfg.set(k, v, source);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    RunConfig cfg = config_from_pairs(parse_key_values(in, path.string()), path.string());
    // Relative paths in the file resolve against the file's directory.
    const auto base = path.parent_path();
    for (std::string* p : {&cfg.train, &cfg.dev, &cfg.test, &cfg.glove, &cfg.aux_sequence, &cfg.aux_instance,
                           &cfg.checkpoint}) {
        if (!p->empty() && std::filesystem::path(*p).is_relative() && !base.empty()) *p = (base / *p).string();
    }
    for (const auto& [key, value] : overrides) cfg.set(key, value, "command line");
    cfg.validate();
    return cfg;
}

std::pair<std::string, std::string> split_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + text + "' is not key=value");
    return {std::string(str::trim(text.substr(0, eq))), std::string(str::trim(text.substr(eq + 1)))};
}

}  // namespace lvc
