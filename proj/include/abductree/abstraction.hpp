#ifndef ABDUCTREE_ABSTRACTION_HPP
#define ABDUCTREE_ABSTRACTION_HPP

#include "abductree/cube.hpp"
#include "abductree/ensemble.hpp"

#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

namespace abductree {

enum class Truth : std::uint8_t { kFalse, kTrue, kUnknown };

/**
 * Domain restriction of one feature inside an AbstractCell. Boolean and
 * categorical features use `mask` (bit a set = atom a allowed); continuous
 * features use the closed atom range [lo, hi].
 */
struct Restriction {
    std::uint64_t mask = 0;
    std::uint32_t lo = 0;
    std::uint32_t hi = 0;

    friend bool operator==(const Restriction&, const Restriction&) = default;
};

/** Product of per-feature restrictions, indexed by FeatureId. */
struct AbstractCell {
    std::vector<Restriction> restrictions;

    friend bool operator==(const AbstractCell&, const AbstractCell&) = default;
};

/// One atom per feature, indexed by FeatureId.
using AtomPoint = std::vector<std::uint32_t>;

/**
 * Finite abstraction of the instance space induced by the ensemble's splits.
 *
 * Every feature gets a finite set of atoms such that all values in one atom
 * satisfy exactly the same split predicates:
 *   boolean      atom 0 = false, atom 1 = true
 *   categorical  one atom per value some split tests, plus one shared atom
 *                for all untested values (if any)
 *   continuous   atom i = [t_{i-1}, t_i) with t_{-1} = -inf, t_K = +inf
 *
 * Scores are constant on atoms, so searching over atoms is exact.
 */
class Abstraction {
public:
    explicit Abstraction(const Model& model);

    const Model& model() const { return *model_; }
    std::size_t num_features() const { return atom_count_.size(); }

    std::uint32_t atom_count(FeatureId f) const { return atom_count_[f]; }
    bool relevant(FeatureId f) const { return relevant_[f]; }
    const std::vector<FeatureId>& relevant_features() const { return relevant_list_; }

    std::uint32_t atom_of(FeatureId f, const Value& value) const;
    /// Canonical concrete value of an atom: the interval midpoint for bounded
    /// continuous atoms, the finite end -/+ 1 for unbounded ones.
    Value representative(FeatureId f, std::uint32_t atom) const;

    AbstractCell full_cell() const;
    /// Tightest cell containing every instance that extends `cube`.
    AbstractCell cell_of(const Cube& cube) const;

    void fix(AbstractCell& cell, FeatureId f, std::uint32_t atom) const;
    bool allows(const AbstractCell& cell, FeatureId f, std::uint32_t atom) const;
    std::uint32_t allowed_count(const AbstractCell& cell, FeatureId f) const;
    std::uint32_t lowest_allowed(const AbstractCell& cell, FeatureId f) const;
    bool is_point(const AbstractCell& cell, FeatureId f) const { return allowed_count(cell, f) == 1; }
    /// True when some feature has no allowed atom left.
    bool is_empty(const AbstractCell& cell) const;

    Truth evaluate(const SplitPredicate& split, const AbstractCell& cell) const
    {
        const Restriction& r = cell.restrictions[split.feature];
        switch (split.kind) {
        case SplitKind::kIsTrue:
            return r.mask == 0b10 ? Truth::kTrue : r.mask == 0b01 ? Truth::kFalse : Truth::kUnknown;
        case SplitKind::kIndicator: {
            const std::uint64_t bit = std::uint64_t{1} << category_atom_[split.feature][split.operand];
            if (r.mask == bit)
                return Truth::kTrue;
            return (r.mask & bit) == 0 ? Truth::kFalse : Truth::kUnknown;
        }
        case SplitKind::kLessThan:
            if (r.hi <= split.operand)
                return Truth::kTrue;
            return r.lo > split.operand ? Truth::kFalse : Truth::kUnknown;
        }
        return Truth::kUnknown;
    }

    /// Splits `cell` into the parts where `split` is false and true.
    std::pair<AbstractCell, AbstractCell> branch(const AbstractCell& cell, const SplitPredicate& split) const;

    /// Truth value of `split` at a single atom of its feature.
    bool holds(const SplitPredicate& split, std::uint32_t atom) const;

    /// The point made of every feature's lowest allowed atom.
    AtomPoint lowest_point(const AbstractCell& cell) const;

    /// Total instance: literals of `fixed` verbatim, other features from
    /// the representatives of `point`.
    Cube materialize(const Cube& fixed, const AtomPoint& point) const;

private:
    const Model* model_;
    std::vector<std::uint32_t> atom_count_;
    std::vector<bool> relevant_;
    std::vector<FeatureId> relevant_list_;
    // categorical only: value index -> atom, atom -> representative value
    std::vector<std::vector<std::uint32_t>> category_atom_;
    std::vector<std::vector<std::uint32_t>> atom_category_;
};

}  // namespace abductree

#endif  // ABDUCTREE_ABSTRACTION_HPP
