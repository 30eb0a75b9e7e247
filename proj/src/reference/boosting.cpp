#include "abductree/reference/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

namespace abductree::reference {

namespace {

struct Candidate {
    SplitPredicate split;  // operand unresolved for less-than
    Rational threshold;    // less-than only
    std::vector<char> holds;
};

std::vector<Candidate> candidate_splits(const Dataset& data, std::size_t bins)
{
    std::vector<Candidate> out;
    const std::size_t n = data.rows.size();
    for (FeatureId f = 0; f < data.features.size(); ++f) {
        const FeatureDecl& d = data.features[f];
        switch (d.kind) {
        case FeatureKind::kBoolean: {
            Candidate c{{f, SplitKind::kIsTrue, 0}, {}, std::vector<char>(n)};
            for (std::size_t r = 0; r < n; ++r)
                c.holds[r] = std::get<bool>(*data.rows[r].find(f)) ? 1 : 0;
            out.push_back(std::move(c));
            break;
        }
        case FeatureKind::kCategorical:
            for (std::uint32_t v = 0; v < d.values.size(); ++v) {
                Candidate c{{f, SplitKind::kIndicator, v}, {}, std::vector<char>(n)};
                for (std::size_t r = 0; r < n; ++r)
                    c.holds[r] = std::get<Category>(*data.rows[r].find(f)).index == v ? 1 : 0;
                out.push_back(std::move(c));
            }
            break;
        case FeatureKind::kContinuous: {
            std::set<Rational> distinct;
            for (const Cube& row : data.rows)
                distinct.insert(std::get<Rational>(*row.find(f)));
            std::vector<Rational> values(distinct.begin(), distinct.end());
            std::vector<Rational> mids;
            for (std::size_t i = 1; i < values.size(); ++i) {
                Rational m = (values[i - 1] + values[i]) / 2;
                mids.push_back(m);
            }
            // keep roughly `bins` evenly spaced ranks
            const std::size_t step = std::max<std::size_t>(1, (mids.size() + bins - 1) / std::max<std::size_t>(bins, 1));
            for (std::size_t i = step / 2; i < mids.size(); i += step) {
                Candidate c{{f, SplitKind::kLessThan, 0}, mids[i], std::vector<char>(n)};
                for (std::size_t r = 0; r < n; ++r)
                    c.holds[r] = std::get<Rational>(*data.rows[r].find(f)) < mids[i] ? 1 : 0;
                out.push_back(std::move(c));
            }
            break;
        }
        }
    }
    return out;
}

Rational round_leaf(double w)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", w);
    return parse_decimal(buf);
}

struct Grower {
    const std::vector<Candidate>& candidates;
    const std::vector<double>& grad;
    const std::vector<double>& hess;
    const BoostingParams& params;
    Tree tree;
    std::vector<std::pair<std::size_t, Rational>> pending;  // node -> threshold

    void grow(const std::vector<std::size_t>& rows, std::size_t depth)
    {
        double g = 0;
        double h = 0;
        for (std::size_t r : rows) {
            g += grad[r];
            h += hess[r];
        }
        const std::size_t id = tree.nodes.size();
        tree.nodes.emplace_back();

        double best_gain = 1e-9;
        const Candidate* best = nullptr;
        if (depth < params.max_depth) {
            const double parent = g * g / (h + params.lambda);
            for (const Candidate& c : candidates) {
                double gt = 0;
                double ht = 0;
                for (std::size_t r : rows)
                    if (c.holds[r] != 0) {
                        gt += grad[r];
                        ht += hess[r];
                    }
                const double gf = g - gt;
                const double hf = h - ht;
                if (ht < params.min_child_weight || hf < params.min_child_weight)
                    continue;
                const double gain = gt * gt / (ht + params.lambda) + gf * gf / (hf + params.lambda) - parent;
                if (gain > best_gain) {
                    best_gain = gain;
                    best = &c;
                }
            }
        }
        if (best == nullptr) {
            tree.nodes[id].value = round_leaf(-params.eta * g / (h + params.lambda));
            return;
        }
        std::vector<std::size_t> yes;
        std::vector<std::size_t> no;
        for (std::size_t r : rows)
            (best->holds[r] != 0 ? yes : no).push_back(r);
        tree.nodes[id].split = best->split;
        if (best->split.kind == SplitKind::kLessThan)
            pending.emplace_back(id, best->threshold);
        const auto left = static_cast<std::int32_t>(tree.nodes.size());
        grow(no, depth + 1);
        const auto right = static_cast<std::int32_t>(tree.nodes.size());
        grow(yes, depth + 1);
        tree.nodes[id].left = left;
        tree.nodes[id].right = right;
    }
};

}  // namespace

Model train_boosted(const Dataset& data, const BoostingParams& params)
{
    const std::size_t n = data.rows.size();
    const std::size_t m = data.class_names.size();
    const auto candidates = candidate_splits(data, params.bins);

    std::vector<std::vector<double>> margin(n, std::vector<double>(m, 0.0));
    std::vector<Tree> trees(m * params.rounds);
    std::vector<std::vector<std::pair<std::size_t, Rational>>> pending(trees.size());
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::vector<double> grad(n);
    std::vector<double> hess(n);

    for (std::size_t round = 0; round < params.rounds; ++round) {
        std::vector<std::vector<double>> prob(n, std::vector<double>(m));
        for (std::size_t r = 0; r < n; ++r) {
            const double top = *std::max_element(margin[r].begin(), margin[r].end());
            double z = 0;
            for (std::size_t c = 0; c < m; ++c)
                z += prob[r][c] = std::exp(margin[r][c] - top);
            for (std::size_t c = 0; c < m; ++c)
                prob[r][c] /= z;
        }
        for (std::size_t c = 0; c < m; ++c) {
            for (std::size_t r = 0; r < n; ++r) {
                const double p = prob[r][c];
                grad[r] = p - (data.labels[r] == c ? 1.0 : 0.0);
                hess[r] = std::max(2.0 * p * (1.0 - p), 1e-16);
            }
            Grower grower{candidates, grad, hess, params, {}, {}};
            grower.grow(all, 0);
            // class-major layout: class c owns trees [c*q, (c+1)*q)
            const std::size_t t = c * params.rounds + round;
            // advance the margins with the new tree's rounded leaves
            for (std::size_t r = 0; r < n; ++r) {
                std::size_t id = 0;
                while (!grower.tree.nodes[id].is_leaf()) {
                    const TreeNode& node = grower.tree.nodes[id];
                    bool holds = false;
                    const Value& v = *data.rows[r].find(node.split.feature);
                    switch (node.split.kind) {
                    case SplitKind::kIsTrue:
                        holds = std::get<bool>(v);
                        break;
                    case SplitKind::kIndicator:
                        holds = std::get<Category>(v).index == node.split.operand;
                        break;
                    case SplitKind::kLessThan: {
                        auto it = std::find_if(grower.pending.begin(), grower.pending.end(),
                                               [&](const auto& p) { return p.first == id; });
                        holds = std::get<Rational>(v) < it->second;
                        break;
                    }
                    }
                    id = static_cast<std::size_t>(holds ? node.right : node.left);
                }
                margin[r][c] += to_double(grower.tree.nodes[id].value);
            }
            trees[t] = std::move(grower.tree);
            pending[t] = std::move(grower.pending);
        }
    }

    std::vector<FeatureDecl> decls = data.features;
    std::vector<std::set<Rational>> used(decls.size());
    for (std::size_t t = 0; t < trees.size(); ++t)
        for (const auto& [node, value] : pending[t])
            used[trees[t].nodes[node].split.feature].insert(value);
    for (FeatureId f = 0; f < decls.size(); ++f)
        decls[f].thresholds.assign(used[f].begin(), used[f].end());
    for (std::size_t t = 0; t < trees.size(); ++t)
        for (const auto& [node, value] : pending[t]) {
            SplitPredicate& s = trees[t].nodes[node].split;
            const auto& ts = decls[s.feature].thresholds;
            s.operand = static_cast<std::uint32_t>(std::lower_bound(ts.begin(), ts.end(), value) - ts.begin());
        }

    Model model;
    model.features = FeatureSpace(std::move(decls));
    model.ensemble.num_classes = m;
    model.ensemble.trees_per_class = params.rounds;
    model.ensemble.trees = std::move(trees);
    model.ensemble.class_names = data.class_names;
    model.validate();
    return model;
}

Dataset synthetic_tabular(std::size_t num_rows, std::size_t num_features, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Dataset data;
    data.class_names = {"negative", "positive"};
    for (FeatureId f = 0; f < num_features; ++f) {
        FeatureDecl d;
        switch (f % 3) {
        case 0:
            d.name = "num" + std::to_string(f);
            d.kind = FeatureKind::kContinuous;
            break;
        case 1:
            d.name = "flag" + std::to_string(f);
            d.kind = FeatureKind::kBoolean;
            break;
        default:
            d.name = "cat" + std::to_string(f);
            d.kind = FeatureKind::kCategorical;
            for (std::size_t v = 0; v < 3 + f % 4; ++v)
                d.values.push_back("k" + std::to_string(v));
            break;
        }
        data.features.push_back(std::move(d));
    }

    // per-feature effect weights, halving per column so the leading few
    // dominate whatever the width
    std::vector<double> weight(num_features);
    for (FeatureId f = 0; f < num_features; ++f)
        weight[f] = 2.0 * std::pow(0.5, static_cast<double>(f));
    std::normal_distribution<double> noise(0.0, 0.6);
    std::uniform_int_distribution<int> age(17, 90);

    std::vector<double> raw;
    for (std::size_t r = 0; r < num_rows; ++r) {
        std::vector<Literal> lits;
        double s = 0;
        double first_numeric = 0;
        for (FeatureId f = 0; f < num_features; ++f) {
            const FeatureDecl& d = data.features[f];
            switch (d.kind) {
            case FeatureKind::kContinuous: {
                const int x = age(rng);
                lits.push_back({f, Rational(x)});
                const double z = (x - 50.0) / 20.0;
                if (f == 0)
                    first_numeric = z;
                s += weight[f] * z;
                break;
            }
            case FeatureKind::kBoolean: {
                const bool b = std::bernoulli_distribution(0.4)(rng);
                lits.push_back({f, b});
                s += weight[f] * (b ? 1.0 : -0.5);
                break;
            }
            case FeatureKind::kCategorical: {
                const auto v = std::uniform_int_distribution<std::uint32_t>(
                    0, static_cast<std::uint32_t>(d.values.size() - 1))(rng);
                lits.push_back({f, Category{v}});
                s += weight[f] * (v == 0 ? 1.2 : v == 1 ? -0.8 : 0.0);
                break;
            }
            }
        }
        s += 0.8 * first_numeric * first_numeric;  // a nonlinear bump
        raw.push_back(s + noise(rng));
        data.rows.emplace_back(std::move(lits));
    }
    std::vector<double> sorted = raw;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    const double median = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
    for (double v : raw)
        data.labels.push_back(v > median ? 1 : 0);
    return data;
}

}  // namespace abductree::reference
