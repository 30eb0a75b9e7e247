#include "abductree/semantics.hpp"

#include "abductree/abstraction.hpp"

#include <stdexcept>

namespace abductree {

namespace {

bool split_holds(const FeatureSpace& fs, const SplitPredicate& s, const Value& v)
{
    switch (s.kind) {
    case SplitKind::kIsTrue:
        return std::get<bool>(v);
    case SplitKind::kIndicator:
        return std::get<Category>(v).index == s.operand;
    case SplitKind::kLessThan:
        return std::get<Rational>(v) < fs[s.feature].thresholds[s.operand];
    }
    return false;
}

const Rational& leaf_reached(const FeatureSpace& fs, const Tree& tree, const std::vector<const Value*>& values)
{
    std::int32_t id = 0;
    while (true) {
        const TreeNode& n = tree.nodes[static_cast<std::size_t>(id)];
        if (n.is_leaf())
            return n.value;
        id = split_holds(fs, n.split, *values[n.split.feature]) ? n.right : n.left;
    }
}

}  // namespace

std::vector<Rational> score(const Model& model, const Cube& instance)
{
    const FeatureSpace& fs = model.features;
    if (!instance.is_total(fs))
        throw std::invalid_argument("score() needs a total instance; use the oracle for partial cubes");
    std::vector<const Value*> values(fs.size(), nullptr);
    for (const auto& l : instance) {
        check_value(fs, l.feature, l.value);
        values[l.feature] = &l.value;
    }

    const Ensemble& e = model.ensemble;
    std::vector<Rational> scores(e.num_classes);
    for (std::size_t t = 0; t < e.trees.size(); ++t)
        scores[e.class_of_tree(t)] += leaf_reached(fs, e.trees[t], values);
    return scores;
}

std::vector<Rational> raw_scores(const Model& model, const Cube& instance)
{
    auto scores = score(model, instance);
    for (auto& s : scores)
        s += model.ensemble.base_score;
    return scores;
}

ClassId argmax(std::span<const Rational> scores)
{
    ClassId best = 0;
    for (ClassId c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best])
            best = c;
    return best;
}

Prediction predict(const Model& model, const Cube& instance)
{
    Prediction p;
    p.scores = score(model, instance);
    p.pi = argmax(p.scores);
    return p;
}

std::vector<ScoreInequality> prediction_formula(std::size_t num_classes, ClassId pi)
{
    if (pi >= num_classes)
        throw std::invalid_argument("class index out of range");
    std::vector<ScoreInequality> out;
    for (ClassId c = 0; c < num_classes; ++c)
        if (c != pi)
            out.push_back({pi, c});
    return out;
}

std::vector<AdversaryCondition> negated_prediction(std::size_t num_classes, ClassId pi)
{
    if (pi >= num_classes)
        throw std::invalid_argument("class index out of range");
    std::vector<AdversaryCondition> out;
    for (ClassId c = 0; c < num_classes; ++c)
        if (c != pi)
            out.push_back({c, c > pi});
    return out;
}

std::vector<PathConstraint> tree_paths(const Model& model, std::size_t tree_index)
{
    const Tree& tree = model.ensemble.trees.at(tree_index);
    const Abstraction abs(model);
    std::vector<PathConstraint> out;

    struct Frame {
        std::int32_t node;
        AbstractCell cell;
        PathConstraint path;
    };
    std::vector<Frame> stack;
    stack.push_back({0, abs.full_cell(), PathConstraint{tree_index, {}, {}, 0, {}}});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        const TreeNode& n = tree.nodes[static_cast<std::size_t>(f.node)];
        if (n.is_leaf()) {
            f.path.leaf = f.node;
            f.path.value = n.value;
            out.push_back(std::move(f.path));
            continue;
        }
        auto [no, yes] = abs.branch(f.cell, n.split);
        // push the true branch first so the false branch is emitted first
        if (!abs.is_empty(yes)) {
            Frame g{n.right, std::move(yes), f.path};
            g.path.right_nodes.push_back(f.node);
            stack.push_back(std::move(g));
        }
        if (!abs.is_empty(no)) {
            Frame g{n.left, std::move(no), std::move(f.path)};
            g.path.left_nodes.push_back(f.node);
            stack.push_back(std::move(g));
        }
    }
    return out;
}

}  // namespace abductree
