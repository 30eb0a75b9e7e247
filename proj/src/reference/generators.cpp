#include "abductree/reference/generators.hpp"

#include <algorithm>
#include <set>

namespace abductree::reference {

namespace {

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

struct Builder {
    const RandomModelSpec& spec;
    const std::vector<FeatureDecl>& decls;
    // candidate thresholds per continuous feature
    const std::vector<std::vector<Rational>>& pool;
    Rng& rng;
    // thresholds by value until the final index assignment
    std::vector<std::pair<std::size_t, Rational>> pending;  // node index -> threshold

    void grow(Tree& tree, std::size_t depth)
    {
        const std::size_t id = tree.nodes.size();
        tree.nodes.emplace_back();
        if (depth >= spec.max_depth || !coin(rng, depth == 0 ? 0.95 : spec.split_probability)) {
            const std::int64_t k = std::uniform_int_distribution<std::int64_t>(-spec.leaf_range * spec.leaf_denominator,
                                                                               spec.leaf_range * spec.leaf_denominator)(rng);
            Rational v(k, spec.leaf_denominator);
            v.canonicalize();
            tree.nodes[id].value = v;
            return;
        }
        const FeatureId f = pick(rng, decls.size());
        SplitPredicate s{f, SplitKind::kIsTrue, 0};
        switch (decls[f].kind) {
        case FeatureKind::kBoolean:
            break;
        case FeatureKind::kCategorical:
            s.kind = SplitKind::kIndicator;
            s.operand = static_cast<std::uint32_t>(pick(rng, decls[f].values.size()));
            break;
        case FeatureKind::kContinuous:
            s.kind = SplitKind::kLessThan;
            pending.emplace_back(id, pool[f][pick(rng, pool[f].size())]);
            break;
        }
        tree.nodes[id].split = s;
        const auto left = static_cast<std::int32_t>(tree.nodes.size());
        grow(tree, depth + 1);
        const auto right = static_cast<std::int32_t>(tree.nodes.size());
        grow(tree, depth + 1);
        tree.nodes[id].left = left;
        tree.nodes[id].right = right;
    }
};

}  // namespace

Model random_model(const RandomModelSpec& spec, Rng& rng)
{
    std::vector<FeatureDecl> decls(spec.num_features);
    std::vector<std::vector<Rational>> pool(spec.num_features);
    for (FeatureId f = 0; f < spec.num_features; ++f) {
        FeatureDecl& d = decls[f];
        d.name = "f" + std::to_string(f);
        const double u = std::uniform_real_distribution<double>(0, 1)(rng);
        if (u < spec.categorical_share) {
            d.kind = FeatureKind::kCategorical;
            const auto n = 2 + pick(rng, std::max<std::uint32_t>(spec.max_categories, 2) - 1);
            for (std::size_t v = 0; v < n; ++v)
                d.values.push_back("v" + std::to_string(v));
        } else if (u < spec.categorical_share + spec.continuous_share) {
            d.kind = FeatureKind::kContinuous;
            std::set<Rational> ts;
            const auto n = 1 + pick(rng, std::max<std::uint32_t>(spec.max_thresholds, 1));
            while (ts.size() < n) {
                Rational t(std::uniform_int_distribution<int>(-50, 50)(rng), 10);
                t.canonicalize();
                ts.insert(t);
            }
            pool[f].assign(ts.begin(), ts.end());
        }
    }

    std::vector<Tree> trees(spec.num_classes * spec.trees_per_class);
    std::vector<std::vector<std::pair<std::size_t, Rational>>> pending(trees.size());
    for (std::size_t t = 0; t < trees.size(); ++t) {
        Builder b{spec, decls, pool, rng, {}};
        b.grow(trees[t], 0);
        pending[t] = std::move(b.pending);
    }

    // declare exactly the thresholds in use, then point splits at them
    std::vector<std::set<Rational>> used(spec.num_features);
    for (std::size_t t = 0; t < trees.size(); ++t)
        for (const auto& [node, value] : pending[t])
            used[trees[t].nodes[node].split.feature].insert(value);
    for (FeatureId f = 0; f < spec.num_features; ++f)
        decls[f].thresholds.assign(used[f].begin(), used[f].end());
    for (std::size_t t = 0; t < trees.size(); ++t)
        for (const auto& [node, value] : pending[t]) {
            SplitPredicate& s = trees[t].nodes[node].split;
            const auto& ts = decls[s.feature].thresholds;
            s.operand = static_cast<std::uint32_t>(std::lower_bound(ts.begin(), ts.end(), value) - ts.begin());
        }

    Model model;
    model.features = FeatureSpace(std::move(decls));
    model.ensemble.num_classes = spec.num_classes;
    model.ensemble.trees_per_class = spec.trees_per_class;
    model.ensemble.trees = std::move(trees);
    for (std::size_t c = 0; c < spec.num_classes; ++c)
        model.ensemble.class_names.push_back("c" + std::to_string(c));
    model.validate();
    return model;
}

Cube random_instance(const FeatureSpace& features, Rng& rng)
{
    std::vector<Literal> lits;
    for (FeatureId f = 0; f < features.size(); ++f) {
        const FeatureDecl& d = features[f];
        switch (d.kind) {
        case FeatureKind::kBoolean:
            lits.push_back({f, coin(rng, 0.5)});
            break;
        case FeatureKind::kCategorical:
            lits.push_back({f, Category{static_cast<std::uint32_t>(pick(rng, d.values.size()))}});
            break;
        case FeatureKind::kContinuous: {
            if (d.thresholds.empty()) {
                Rational v(std::uniform_int_distribution<int>(-20, 20)(rng), 4);
                v.canonicalize();
                lits.push_back({f, v});
                break;
            }
            const Rational& t = d.thresholds[pick(rng, d.thresholds.size())];
            static const int offsets[] = {-1, 0, 0, 1};
            Rational delta(offsets[pick(rng, 4)] * (1 + static_cast<int>(pick(rng, 3))), 20);
            delta.canonicalize();
            Rational v = t + delta;
            lits.push_back({f, v});
            break;
        }
        }
    }
    return Cube(std::move(lits));
}

Cube random_subcube(const Cube& cube, double keep, Rng& rng)
{
    std::vector<Literal> kept;
    for (const Literal& l : cube)
        if (coin(rng, keep))
            kept.push_back(l);
    return Cube(std::move(kept));
}

}  // namespace abductree::reference
