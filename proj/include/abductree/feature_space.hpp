#ifndef ABDUCTREE_FEATURE_SPACE_HPP
#define ABDUCTREE_FEATURE_SPACE_HPP

#include "abductree/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace abductree {

using FeatureId = std::size_t;
using ClassId = std::size_t;

enum class FeatureKind : std::uint8_t { kBoolean, kCategorical, kContinuous };

std::string_view to_string(FeatureKind kind);

struct FeatureDecl {
    std::string name;
    FeatureKind kind = FeatureKind::kBoolean;
    /// Value names, categorical features only.
    std::vector<std::string> values;
    /// Strictly increasing split points, continuous features only. Harvested
    /// from the ensemble when it is parsed.
    std::vector<Rational> thresholds;

    friend bool operator==(const FeatureDecl&, const FeatureDecl&) = default;
};

/**
 * The declared input features. Immutable once built; the constructor checks
 * name uniqueness, value-name uniqueness and threshold ordering.
 */
class FeatureSpace {
public:
    FeatureSpace() = default;
    explicit FeatureSpace(std::vector<FeatureDecl> features);

    std::size_t size() const { return features_.size(); }
    bool empty() const { return features_.empty(); }
    const FeatureDecl& operator[](FeatureId id) const { return features_[id]; }
    const FeatureDecl& at(FeatureId id) const { return features_.at(id); }
    const std::vector<FeatureDecl>& decls() const { return features_; }

    std::optional<FeatureId> find(std::string_view name) const;
    std::optional<std::uint32_t> value_index(FeatureId id, std::string_view value) const;
    std::optional<std::uint32_t> threshold_index(FeatureId id, const Rational& threshold) const;

    friend bool operator==(const FeatureSpace& a, const FeatureSpace& b) { return a.features_ == b.features_; }

private:
    std::vector<FeatureDecl> features_;
    std::unordered_map<std::string, FeatureId> by_name_;
};

}  // namespace abductree

#endif  // ABDUCTREE_FEATURE_SPACE_HPP
