#include "abductree/cube.hpp"

#include <algorithm>
#include <stdexcept>

namespace abductree {

namespace {

auto lower(std::vector<Literal>& lits, FeatureId f)
{
    return std::lower_bound(lits.begin(), lits.end(), f,
                            [](const Literal& l, FeatureId id) { return l.feature < id; });
}

auto lower(const std::vector<Literal>& lits, FeatureId f)
{
    return std::lower_bound(lits.begin(), lits.end(), f,
                            [](const Literal& l, FeatureId id) { return l.feature < id; });
}

}  // namespace

Cube::Cube(std::initializer_list<Literal> literals)
    : Cube(std::vector<Literal>(literals))
{
}

Cube::Cube(std::vector<Literal> literals)
    : literals_(std::move(literals))
{
    std::stable_sort(literals_.begin(), literals_.end(),
                     [](const Literal& a, const Literal& b) { return a.feature < b.feature; });
    for (std::size_t i = 1; i < literals_.size(); ++i)
        if (literals_[i - 1].feature == literals_[i].feature)
            throw std::invalid_argument("cube has two literals on feature " +
                                        std::to_string(literals_[i].feature));
}

void Cube::assign(FeatureId feature, Value value)
{
    auto it = lower(literals_, feature);
    if (it != literals_.end() && it->feature == feature)
        it->value = std::move(value);
    else
        literals_.insert(it, Literal{feature, std::move(value)});
}

bool Cube::erase(FeatureId feature)
{
    auto it = lower(literals_, feature);
    if (it == literals_.end() || it->feature != feature)
        return false;
    literals_.erase(it);
    return true;
}

const Value* Cube::find(FeatureId feature) const
{
    auto it = lower(literals_, feature);
    if (it == literals_.end() || it->feature != feature)
        return nullptr;
    return &it->value;
}

std::vector<FeatureId> Cube::features() const
{
    std::vector<FeatureId> out;
    out.reserve(literals_.size());
    for (const auto& l : literals_)
        out.push_back(l.feature);
    return out;
}

bool Cube::subset_of(const Cube& other) const
{
    for (const auto& l : literals_) {
        const Value* v = other.find(l.feature);
        if (v == nullptr || !(*v == l.value))
            return false;
    }
    return true;
}

Cube restrict(const Cube& cube, std::span<const FeatureId> features)
{
    std::vector<Literal> out;
    for (const auto& l : cube)
        if (std::find(features.begin(), features.end(), l.feature) != features.end())
            out.push_back(l);
    return Cube(std::move(out));
}

void check_value(const FeatureSpace& space, FeatureId feature, const Value& value)
{
    if (feature >= space.size())
        throw std::invalid_argument("literal on unknown feature " + std::to_string(feature));
    const FeatureDecl& decl = space[feature];
    switch (decl.kind) {
    case FeatureKind::kBoolean:
        if (!std::holds_alternative<bool>(value))
            throw std::invalid_argument("feature '" + decl.name + "' expects a boolean value");
        break;
    case FeatureKind::kCategorical:
        if (!std::holds_alternative<Category>(value))
            throw std::invalid_argument("feature '" + decl.name + "' expects a categorical value");
        if (std::get<Category>(value).index >= decl.values.size())
            throw std::invalid_argument("feature '" + decl.name + "' has no value index " +
                                        std::to_string(std::get<Category>(value).index));
        break;
    case FeatureKind::kContinuous:
        if (!std::holds_alternative<Rational>(value))
            throw std::invalid_argument("feature '" + decl.name + "' expects a numeric value");
        break;
    }
}

void check_cube(const FeatureSpace& space, const Cube& cube)
{
    for (const auto& l : cube)
        check_value(space, l.feature, l.value);
}

std::string format_value(const FeatureSpace& space, FeatureId feature, const Value& value)
{
    if (const bool* b = std::get_if<bool>(&value))
        return *b ? "1" : "0";
    if (const Category* c = std::get_if<Category>(&value))
        return space[feature].values.at(c->index);
    const Rational& r = std::get<Rational>(value);
    return is_finite_decimal(r) ? to_decimal_string(r) : r.get_str();
}

std::string format_literal(const FeatureSpace& space, const Literal& literal)
{
    return space[literal.feature].name + "=" + format_value(space, literal.feature, literal.value);
}

std::string format_cube(const FeatureSpace& space, const Cube& cube)
{
    std::string out = "{";
    bool first = true;
    for (const auto& l : cube) {
        if (!first)
            out += ", ";
        first = false;
        out += format_literal(space, l);
    }
    return out + "}";
}

}  // namespace abductree
