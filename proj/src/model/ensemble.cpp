#include "abductree/ensemble.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace abductree {

std::size_t Tree::depth() const
{
    if (nodes.empty())
        return 0;
    std::size_t best = 0;
    std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        const TreeNode& n = nodes[static_cast<std::size_t>(id)];
        if (n.is_leaf()) {
            best = std::max(best, d);
        } else {
            stack.emplace_back(n.left, d + 1);
            stack.emplace_back(n.right, d + 1);
        }
    }
    return best;
}

std::size_t Tree::num_leaves() const
{
    std::size_t count = 0;
    for (const auto& n : nodes)
        count += n.is_leaf() ? 1 : 0;
    return count;
}

std::string Ensemble::class_name(ClassId c) const
{
    if (c < class_names.size())
        return class_names[c];
    return std::to_string(c);
}

namespace {

void validate_tree(const FeatureSpace& features, const Tree& tree, std::size_t tree_index,
                   std::size_t max_depth)
{
    const std::string where = "tree " + std::to_string(tree_index);
    if (tree.nodes.empty())
        throw std::invalid_argument(where + " has no nodes");

    // Every node must be reached exactly once from the root.
    std::vector<char> seen(tree.nodes.size(), 0);
    std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
    std::size_t reached = 0;
    while (!stack.empty()) {
        auto [id, depth] = stack.back();
        stack.pop_back();
        if (id < 0 || static_cast<std::size_t>(id) >= tree.nodes.size())
            throw std::invalid_argument(where + " has a dangling child reference");
        if (seen[static_cast<std::size_t>(id)]++)
            throw std::invalid_argument(where + " is not a tree (node shared or cyclic)");
        ++reached;
        if (depth > max_depth)
            throw std::invalid_argument(where + " exceeds the maximum depth " + std::to_string(max_depth));

        const TreeNode& n = tree.nodes[static_cast<std::size_t>(id)];
        if (n.is_leaf()) {
            if (n.right != kNoChild)
                throw std::invalid_argument(where + " has a node with a single child");
            continue;
        }
        if (n.right == kNoChild)
            throw std::invalid_argument(where + " has a node with a single child");

        const SplitPredicate& s = n.split;
        if (s.feature >= features.size())
            throw std::invalid_argument(where + " splits on an undeclared feature");
        const FeatureDecl& decl = features[s.feature];
        switch (s.kind) {
        case SplitKind::kIsTrue:
            if (decl.kind != FeatureKind::kBoolean)
                throw std::invalid_argument(where + ": boolean test on non-boolean feature '" + decl.name + "'");
            break;
        case SplitKind::kIndicator:
            if (decl.kind != FeatureKind::kCategorical || s.operand >= decl.values.size())
                throw std::invalid_argument(where + ": bad indicator test on '" + decl.name + "'");
            break;
        case SplitKind::kLessThan:
            if (decl.kind != FeatureKind::kContinuous || s.operand >= decl.thresholds.size())
                throw std::invalid_argument(where + ": threshold not declared for '" + decl.name + "'");
            break;
        }
        stack.emplace_back(n.left, depth + 1);
        stack.emplace_back(n.right, depth + 1);
    }
    if (reached != tree.nodes.size())
        throw std::invalid_argument(where + " has unreachable nodes");
}

}  // namespace

void Model::validate(std::size_t max_depth) const
{
    const Ensemble& e = ensemble;
    if (e.num_classes == 0 || e.trees_per_class == 0)
        throw std::invalid_argument("ensemble needs at least one class and one tree per class");
    if (e.trees.size() != e.num_classes * e.trees_per_class)
        throw std::invalid_argument("ensemble has " + std::to_string(e.trees.size()) + " trees, expected " +
                                    std::to_string(e.num_classes * e.trees_per_class));
    if (!e.class_names.empty() && e.class_names.size() != e.num_classes)
        throw std::invalid_argument("class name count does not match the class count");
    for (std::size_t t = 0; t < e.trees.size(); ++t)
        validate_tree(features, e.trees[t], t, max_depth);
}

std::vector<bool> Model::used_features() const
{
    std::vector<bool> used(features.size(), false);
    for (const auto& tree : ensemble.trees)
        for (const auto& n : tree.nodes)
            if (!n.is_leaf())
                used[n.split.feature] = true;
    return used;
}

}  // namespace abductree
