#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "lvc/errors.hpp"
#include "lvc/strings.hpp"
#include "lvc/trainer.hpp"

namespace lvc {

namespace {

constexpr char kMagic[4] = {'L', 'V', 'C', '1'};

template <class T>
void put_le(std::ostream& out, T v) {
    unsigned char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in, const std::string& source) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw DataError(source + ": truncated checkpoint");
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[i]) << (8 * i);
    return v;
}

struct Record {
    ad::Shape shape;
    std::vector<double> values;
};

// Tensor records are buffered so the count can precede them.
struct RecordWriter {
    std::ostringstream body;
    std::uint64_t count = 0;

    void put(const std::string& name, const ad::Shape& shape, std::span<const double> values) {
        put_le<std::uint32_t>(body, static_cast<std::uint32_t>(name.size()));
        body.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_le<std::uint32_t>(body, static_cast<std::uint32_t>(shape.size()));
        for (auto d : shape) put_le<std::uint64_t>(body, d);
        for (double v : values) put_le<std::uint64_t>(body, std::bit_cast<std::uint64_t>(v));
        ++count;
    }
    void put(const std::string& name, const std::vector<double>& values) { put(name, {values.size()}, values); }
};

std::string state_text(const TrainingState& s) {
    std::string text = s.config.echo();
    text += "labels = " + str::join(s.model.labels.names(), ",") + "\n";
    text += "vocab = " + str::join(s.model.vocab.tokens(), " ") + "\n";
    return text;
}

// Echo lines are written by this file only, so no comment handling.
std::vector<std::pair<std::string, std::string>> parse_echo(const std::string& text, const std::string& source) {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto line : str::split(text, '\n')) {
        if (line.empty()) continue;
        const auto eq = line.find(" = ");
        if (eq == std::string_view::npos) throw DataError(source + ": malformed config echo line");
        out.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 3)));
    }
    return out;
}

void put_adam(RecordWriter& out, const std::string& prefix, const ad::AdamState& opt,
              const std::vector<ad::NamedTensor>& params) {
    out.put(prefix + ".step", {static_cast<double>(opt.step_count)});
    for (std::size_t i = 0; i < opt.first_moment.size() && i < params.size(); ++i) {
        out.put(prefix + ".m/" + params[i].name, opt.first_moment[i]);
        out.put(prefix + ".v/" + params[i].name, opt.second_moment[i]);
    }
}

void take_adam(std::map<std::string, Record>& records, const std::string& prefix, ad::AdamState& opt,
               const std::vector<ad::NamedTensor>& params, const std::string& source) {
    auto step = records.find(prefix + ".step");
    if (step == records.end() || step->second.values.size() != 1) {
        throw DataError(source + ": missing " + prefix + ".step");
    }
    opt.step_count = static_cast<std::size_t>(step->second.values[0]);
    opt.first_moment.clear();
    opt.second_moment.clear();
    for (const auto& p : params) {
        auto m = records.find(prefix + ".m/" + p.name);
        auto v = records.find(prefix + ".v/" + p.name);
        if (m == records.end() || v == records.end()) break;
        if (m->second.values.size() != p.tensor.size() || v->second.values.size() != p.tensor.size()) {
            throw DataError(source + ": optimizer state for " + p.name + " has the wrong size");
        }
        opt.first_moment.push_back(std::move(m->second.values));
        opt.second_moment.push_back(std::move(v->second.values));
    }
    if (!opt.first_moment.empty() && opt.first_moment.size() != params.size()) {
        throw DataError(source + ": incomplete optimizer state for " + prefix);
    }
}

ad::AdamState make_adam(double lr) { return lr > 0.0 ? ad::AdamState(lr) : ad::AdamState(); }

}  // namespace

void write_checkpoint(std::ostream& out, const TrainingState& state) {
    out.write(kMagic, 4);
    const std::string text = state_text(state);
    put_le<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));

    const auto enc = state.model.encoder_parameters();
    const auto dec = state.model.decoder_parameters();
    std::vector<double> frozen(state.model.embeddings.frozen.begin(), state.model.embeddings.frozen.end());

    RecordWriter w;
    for (const auto* group : {&enc, &dec}) {
        for (const auto& p : *group) w.put("param/" + p.name, p.tensor.shape(), p.tensor.data());
    }
    w.put("meta.frozen", frozen);
    w.put("meta.epoch", {static_cast<double>(state.epoch)});
    w.put("meta.dev_history", state.dev_history);
    put_adam(w, "adam.encoder", state.encoder_opt, enc);
    put_adam(w, "adam.decoder", state.decoder_opt, dec);

    put_le<std::uint64_t>(out, w.count);
    out << w.body.str();
    if (!out) throw DataError("failed writing checkpoint");
}

TrainingState read_checkpoint(std::istream& in, const std::string& source) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw DataError(source + ": not a checkpoint (bad magic)");
    }
    const auto text_len = get_le<std::uint64_t>(in, source);
    if (text_len > (1ull << 32)) throw DataError(source + ": implausible config length");
    std::string text(text_len, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(text_len))) throw DataError(source + ": truncated checkpoint");

    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<std::string> label_names, vocab_tokens;
    for (auto& [key, value] : parse_echo(text, source)) {
        if (key == "labels") {
            for (auto n : str::split(value, ',')) label_names.emplace_back(n);
        } else if (key == "vocab") {
            for (auto t : str::split(value, ' ')) vocab_tokens.emplace_back(t);
        } else {
            pairs.emplace_back(std::move(key), std::move(value));
        }
    }
    TrainingState state;
    state.config = config_from_pairs(pairs, source);
    state.config.labels = label_names;

    std::map<std::string, Record> records;
    const auto count = get_le<std::uint64_t>(in, source);
    for (std::uint64_t r = 0; r < count; ++r) {
        const auto name_len = get_le<std::uint32_t>(in, source);
        std::string name(name_len, '\0');
        if (!in.read(name.data(), name_len)) throw DataError(source + ": truncated checkpoint");
        const auto rank = get_le<std::uint32_t>(in, source);
        if (rank > 4) throw DataError(source + ": tensor " + name + " has rank " + std::to_string(rank));
        Record rec;
        for (std::uint32_t d = 0; d < rank; ++d) rec.shape.push_back(get_le<std::uint64_t>(in, source));
        const std::size_t n = ad::shape_size(rec.shape);
        if (n > (1ull << 31)) throw DataError(source + ": tensor " + name + " is implausibly large");
        rec.values.resize(n);
        for (auto& v : rec.values) v = std::bit_cast<double>(get_le<std::uint64_t>(in, source));
        records.emplace(std::move(name), std::move(rec));
    }

    Rng scratch(0);
    state.model = ModelBundle::init(state.config.model, state.config.dims, Vocabulary::from_tokens(vocab_tokens),
                                    LabelSpace(label_names), scratch);
    for (const auto& p : state.model.parameters()) {
        auto it = records.find("param/" + p.name);
        if (it == records.end()) throw DataError(source + ": missing tensor " + p.name);
        if (it->second.shape != p.tensor.shape()) {
            throw DataError(source + ": tensor " + p.name + " has shape " + ad::shape_string(it->second.shape) +
                            ", expected " + ad::shape_string(p.tensor.shape()));
        }
        ad::Tensor t = p.tensor;
        std::copy(it->second.values.begin(), it->second.values.end(), t.data().begin());
    }
    for (const char* meta : {"meta.frozen", "meta.epoch", "meta.dev_history"}) {
        if (!records.count(meta)) throw DataError(source + ": missing " + meta);
    }
    const auto& frozen = records["meta.frozen"].values;
    if (frozen.size() != state.model.embeddings.rows()) throw DataError(source + ": bad meta.frozen record");
    for (std::size_t i = 0; i < frozen.size(); ++i) state.model.embeddings.frozen[i] = frozen[i] != 0.0;
    state.model.embeddings.matched = static_cast<std::size_t>(std::count(frozen.begin(), frozen.end(), 1.0));
    if (records["meta.epoch"].values.size() != 1) throw DataError(source + ": bad meta.epoch record");
    state.epoch = static_cast<std::size_t>(records["meta.epoch"].values[0]);
    state.dev_history = records["meta.dev_history"].values;

    state.encoder_opt = make_adam(state.config.lr_encoder);
    state.decoder_opt = make_adam(state.config.lr_decoder);
    take_adam(records, "adam.encoder", state.encoder_opt, state.model.encoder_parameters(), source);
    take_adam(records, "adam.decoder", state.decoder_opt, state.model.decoder_parameters(), source);
    return state;
}

void save_checkpoint(const std::filesystem::path& path, const TrainingState& state) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    write_checkpoint(out, state);
}

TrainingState load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    return read_checkpoint(in, path.string());
}

}  // namespace lvc
