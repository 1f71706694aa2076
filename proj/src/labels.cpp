#include "lvc/labels.hpp"

#include <algorithm>

#include "lvc/errors.hpp"

namespace lvc {

LabelSpace::LabelSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw ConfigError("label space must hold at least one label");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i].empty()) throw ConfigError("label names must be non-empty");
        if (!index_.emplace(labels_[i], i).second) throw ConfigError("label '" + labels_[i] + "' listed twice");
    }
}

std::optional<std::size_t> LabelSpace::index(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

BinaryLabelVector::BinaryLabelVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) {
        if (b > 1) throw DomainError("label bits must be 0 or 1");
    }
}

BinaryLabelVector BinaryLabelVector::from_names(const LabelSpace& space, const std::set<std::string>& names) {
    BinaryLabelVector v(space.size());
    for (const auto& n : names) {
        auto i = space.index(n);
        if (!i) throw DataError("unknown label '" + n + "'");
        v.set(*i, true);
    }
    return v;
}

std::size_t BinaryLabelVector::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::string> BinaryLabelVector::names(const LabelSpace& space) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) out.push_back(space.name(i));
    }
    return out;
}

}  // namespace lvc
