#ifndef ABDUCTREE_ENSEMBLE_HPP
#define ABDUCTREE_ENSEMBLE_HPP

#include "abductree/feature_space.hpp"
#include "abductree/rational.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace abductree {

enum class SplitKind : std::uint8_t {
    kIsTrue,     ///< boolean feature is true
    kIndicator,  ///< categorical feature takes the value `operand`
    kLessThan,   ///< continuous feature < thresholds[operand]
};

/**
 * A node test. The operand is a category index for indicators and an index
 * into the feature's declared thresholds for less-than tests.
 */
struct SplitPredicate {
    FeatureId feature = 0;
    SplitKind kind = SplitKind::kIsTrue;
    std::uint32_t operand = 0;

    friend auto operator<=>(const SplitPredicate&, const SplitPredicate&) = default;
};

inline constexpr std::int32_t kNoChild = -1;

/** Flat tree node; `left` is taken when the split is false, `right` when true. */
struct TreeNode {
    SplitPredicate split;
    std::int32_t left = kNoChild;
    std::int32_t right = kNoChild;
    Rational value;  // leaves only

    bool is_leaf() const { return left == kNoChild; }

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/** Binary tree stored as a node array, root at index 0. */
struct Tree {
    std::vector<TreeNode> nodes;

    const TreeNode& root() const { return nodes.front(); }
    std::size_t depth() const;
    std::size_t num_leaves() const;

    friend bool operator==(const Tree&, const Tree&) = default;
};

/**
 * Boosted ensemble with `trees_per_class` trees per class, class-major:
 * class c owns trees [c*q, (c+1)*q).
 */
struct Ensemble {
    std::size_t num_classes = 1;
    std::size_t trees_per_class = 1;
    std::vector<Tree> trees;
    /// Uniform offset added to every class score. Never affects the argmax.
    Rational base_score;
    std::vector<std::string> class_names;

    std::span<const Tree> class_trees(ClassId c) const
    {
        return std::span<const Tree>(trees).subspan(c * trees_per_class, trees_per_class);
    }
    ClassId class_of_tree(std::size_t tree_index) const { return tree_index / trees_per_class; }
    std::string class_name(ClassId c) const;

    friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

/** An ensemble together with the feature space its splits refer to. */
struct Model {
    FeatureSpace features;
    Ensemble ensemble;

    /// Throws std::invalid_argument when any structural invariant fails.
    void validate(std::size_t max_depth = kDefaultMaxDepth) const;

    /// used[f] is true iff some split tests feature f.
    std::vector<bool> used_features() const;

    static constexpr std::size_t kDefaultMaxDepth = 64;

    friend bool operator==(const Model&, const Model&) = default;
};

}  // namespace abductree

#endif  // ABDUCTREE_ENSEMBLE_HPP
