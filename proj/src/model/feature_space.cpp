#include "abductree/feature_space.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace abductree {

std::string_view to_string(FeatureKind kind)
{
    switch (kind) {
    case FeatureKind::kBoolean:
        return "binary";
    case FeatureKind::kCategorical:
        return "categorical";
    case FeatureKind::kContinuous:
        return "continuous";
    }
    return "?";
}

FeatureSpace::FeatureSpace(std::vector<FeatureDecl> features)
    : features_(std::move(features))
{
    for (FeatureId id = 0; id < features_.size(); ++id) {
        const FeatureDecl& decl = features_[id];
        if (decl.name.empty())
            throw std::invalid_argument("feature " + std::to_string(id) + " has an empty name");
        if (!by_name_.emplace(decl.name, id).second)
            throw std::invalid_argument("duplicate feature name '" + decl.name + "'");

        if (decl.kind == FeatureKind::kCategorical) {
            if (decl.values.empty())
                throw std::invalid_argument("categorical feature '" + decl.name + "' has no values");
            std::unordered_set<std::string> seen;
            for (const auto& v : decl.values)
                if (!seen.insert(v).second)
                    throw std::invalid_argument("feature '" + decl.name + "' repeats value '" + v + "'");
        } else if (!decl.values.empty()) {
            throw std::invalid_argument("feature '" + decl.name + "' lists values but is not categorical");
        }

        if (decl.kind != FeatureKind::kContinuous && !decl.thresholds.empty())
            throw std::invalid_argument("feature '" + decl.name + "' has thresholds but is not continuous");
        for (std::size_t i = 1; i < decl.thresholds.size(); ++i)
            if (!(decl.thresholds[i - 1] < decl.thresholds[i]))
                throw std::invalid_argument("thresholds of '" + decl.name + "' are not strictly increasing");
    }
}

std::optional<FeatureId> FeatureSpace::find(std::string_view name) const
{
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end())
        return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> FeatureSpace::value_index(FeatureId id, std::string_view value) const
{
    const auto& values = features_.at(id).values;
    auto it = std::find(values.begin(), values.end(), value);
    if (it == values.end())
        return std::nullopt;
    return static_cast<std::uint32_t>(it - values.begin());
}

std::optional<std::uint32_t> FeatureSpace::threshold_index(FeatureId id, const Rational& threshold) const
{
    const auto& ts = features_.at(id).thresholds;
    auto it = std::lower_bound(ts.begin(), ts.end(), threshold);
    if (it == ts.end() || *it != threshold)
        return std::nullopt;
    return static_cast<std::uint32_t>(it - ts.begin());
}

}  // namespace abductree
