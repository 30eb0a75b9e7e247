#ifndef ABDUCTREE_CUBE_HPP
#define ABDUCTREE_CUBE_HPP

#include "abductree/feature_space.hpp"
#include "abductree/rational.hpp"

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace abductree {

/// Index into a categorical feature's value list.
struct Category {
    std::uint32_t index = 0;
    friend auto operator<=>(const Category&, const Category&) = default;
};

/// A feature value: boolean, categorical or continuous.
using Value = std::variant<bool, Category, Rational>;

struct Literal {
    FeatureId feature = 0;
    Value value;

    friend bool operator==(const Literal&, const Literal&) = default;
};

/**
 * A conjunction of feature literals with at most one literal per feature.
 * Instances (total cubes), explanations and counterexamples are all cubes.
 * Literals are kept sorted by feature.
 */
class Cube {
public:
    using const_iterator = std::vector<Literal>::const_iterator;

    Cube() = default;
    /// Throws std::invalid_argument on a repeated feature.
    Cube(std::initializer_list<Literal> literals);
    explicit Cube(std::vector<Literal> literals);

    /// Adds or replaces the literal on `feature`.
    void assign(FeatureId feature, Value value);
    bool erase(FeatureId feature);

    const Value* find(FeatureId feature) const;
    bool contains(FeatureId feature) const { return find(feature) != nullptr; }

    std::size_t size() const { return literals_.size(); }
    bool empty() const { return literals_.empty(); }
    const_iterator begin() const { return literals_.begin(); }
    const_iterator end() const { return literals_.end(); }
    const std::vector<Literal>& literals() const { return literals_; }

    std::vector<FeatureId> features() const;

    /// Every literal of *this also occurs, with the same value, in `other`.
    bool subset_of(const Cube& other) const;
    /// Assigns every feature of `space`.
    bool is_total(const FeatureSpace& space) const { return literals_.size() == space.size(); }

    friend bool operator==(const Cube&, const Cube&) = default;

private:
    std::vector<Literal> literals_;
};

/// The sub-cube of `cube` over the requested features that it assigns.
Cube restrict(const Cube& cube, std::span<const FeatureId> features);

/// Throws std::invalid_argument when the value does not fit the feature.
void check_value(const FeatureSpace& space, FeatureId feature, const Value& value);
void check_cube(const FeatureSpace& space, const Cube& cube);

/// "milk=1", "legs=6", "age=37.5".
std::string format_value(const FeatureSpace& space, FeatureId feature, const Value& value);
std::string format_literal(const FeatureSpace& space, const Literal& literal);
std::string format_cube(const FeatureSpace& space, const Cube& cube);

}  // namespace abductree

#endif  // ABDUCTREE_CUBE_HPP
