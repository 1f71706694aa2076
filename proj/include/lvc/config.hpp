#pragma once

// Flat `key = value` run configuration. '#' starts a comment; blank lines
// are ignored. Unknown keys and malformed values raise ConfigError.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lvc/model.hpp"

namespace lvc {

struct RunConfig {
    ModelKind model = ModelKind::seq2emo;
    ModelDims dims;
    double lr_encoder = 5e-4;
    double lr_decoder = 1e-4;
    std::size_t epochs = 50;
    std::size_t batch_size = 16;
    std::size_t patience = 5;
    std::size_t min_freq = 1;
    std::uint64_t seed = 1;
    std::size_t k = 0;                 // optional; must match the label space when set

    std::string format = "canonical";  // or "semeval"
    std::vector<std::string> labels;   // canonical data; derived from train when empty
    std::string train;
    std::string dev;
    std::string test;
    std::string glove;
    std::string aux_sequence;
    std::string aux_instance;
    std::string checkpoint;            // output path for train

    // Keys set explicitly, by file or override.
    std::set<std::string> explicit_keys;

    // Applies one key; `origin` prefixes error messages.
    void set(const std::string& key, const std::string& value, const std::string& origin);
    // Cross-field checks, run after all values are in.
    void validate() const;
    // The configuration as `key = value` lines (model-relevant keys only).
    std::string echo() const;
};

// Parses `key = value` text into an ordered list of pairs.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in, const std::string& source);

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides = {});
RunConfig config_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs, const std::string& source);

// Splits "key=value" (CLI override syntax).
std::pair<std::string, std::string> split_override(const std::string& text);

}  // namespace lvc
