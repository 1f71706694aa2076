#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lvc {

// Ordered, duplicate-free label set L = (l_1..l_k). Order is fixed for the
// lifetime of a model.
class LabelSpace {
public:
    LabelSpace() = default;
    explicit LabelSpace(std::vector<std::string> labels);

    std::size_t size() const { return labels_.size(); }
    const std::string& name(std::size_t i) const { return labels_.at(i); }
    const std::vector<std::string>& names() const { return labels_; }
    std::optional<std::size_t> index(std::string_view name) const;

    bool operator==(const LabelSpace& other) const { return labels_ == other.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Y^b: bit i is 1 iff label i is in the set.
class BinaryLabelVector {
public:
    BinaryLabelVector() = default;
    explicit BinaryLabelVector(std::size_t k) : bits_(k, 0) {}
    explicit BinaryLabelVector(std::vector<std::uint8_t> bits);

    // Label names must belong to `space`; unknown names throw DataError.
    static BinaryLabelVector from_names(const LabelSpace& space, const std::set<std::string>& names);

    std::size_t size() const { return bits_.size(); }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool on) { bits_.at(i) = on ? 1 : 0; }
    std::size_t count() const;
    bool empty_set() const { return count() == 0; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    // Names in label-space order.
    std::vector<std::string> names(const LabelSpace& space) const;

    bool operator==(const BinaryLabelVector& other) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

}  // namespace lvc
