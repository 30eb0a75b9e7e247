#include "abductree/reference/brute_force.hpp"

#include <algorithm>
#include <set>

namespace abductree::reference {

namespace {

std::vector<bool> used_features(const Model& model)
{
    std::vector<bool> used(model.features.size(), false);
    for (const Tree& t : model.ensemble.trees)
        for (const TreeNode& n : t.nodes)
            if (!n.is_leaf())
                used[n.split.feature] = true;
    return used;
}

const Rational& leaf_of(const FeatureSpace& fs, const Tree& tree, std::size_t node, const Cube& instance)
{
    const TreeNode& n = tree.nodes[node];
    if (n.is_leaf())
        return n.value;
    const Value& v = *instance.find(n.split.feature);
    bool holds = false;
    switch (n.split.kind) {
    case SplitKind::kIsTrue:
        holds = std::get<bool>(v);
        break;
    case SplitKind::kIndicator:
        holds = std::get<Category>(v).index == n.split.operand;
        break;
    case SplitKind::kLessThan:
        holds = std::get<Rational>(v) < fs[n.split.feature].thresholds[n.split.operand];
        break;
    }
    return leaf_of(fs, tree, static_cast<std::size_t>(holds ? n.right : n.left), instance);
}

std::uint64_t checked_product(const std::vector<std::vector<Value>>& domains, const std::vector<FeatureId>& free,
                              std::uint64_t cap)
{
    std::uint64_t total = 1;
    for (FeatureId f : free) {
        total *= domains[f].size();
        if (total > cap)
            throw CapExceeded("brute force would visit more than " + std::to_string(cap) + " instances");
    }
    return total;
}

// Odometer over the domains of `free`, on top of `base`.
void odometer(const std::vector<std::vector<Value>>& domains, const std::vector<FeatureId>& free, Cube base,
              const std::function<bool(const Cube&)>& visit)
{
    std::vector<std::size_t> digit(free.size(), 0);
    for (FeatureId f : free)
        base.assign(f, domains[f][0]);
    while (true) {
        if (!visit(base))
            return;
        std::size_t i = free.size();
        while (i > 0) {
            const FeatureId f = free[i - 1];
            if (++digit[i - 1] < domains[f].size()) {
                base.assign(f, domains[f][digit[i - 1]]);
                break;
            }
            digit[i - 1] = 0;
            base.assign(f, domains[f][0]);
            --i;
        }
        if (i == 0)
            return;
    }
}

ClassId lowest_argmax(const std::vector<Rational>& scores)
{
    ClassId best = 0;
    for (ClassId c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best])
            best = c;
    return best;
}

}  // namespace

std::vector<Rational> walk_scores(const Model& model, const Cube& instance)
{
    const Ensemble& e = model.ensemble;
    std::vector<Rational> scores(e.num_classes);
    for (std::size_t t = 0; t < e.trees.size(); ++t)
        scores[t / e.trees_per_class] += leaf_of(model.features, e.trees[t], 0, instance);
    return scores;
}

ClassId walk_predict(const Model& model, const Cube& instance) { return lowest_argmax(walk_scores(model, instance)); }

std::vector<Value> probe_values(const Model& model, FeatureId f)
{
    const FeatureDecl& d = model.features[f];
    std::vector<Value> out;
    switch (d.kind) {
    case FeatureKind::kBoolean:
        out = {false, true};
        break;
    case FeatureKind::kCategorical: {
        std::set<std::uint32_t> tested;
        for (const Tree& t : model.ensemble.trees)
            for (const TreeNode& n : t.nodes)
                if (!n.is_leaf() && n.split.feature == f)
                    tested.insert(n.split.operand);
        bool untested_added = false;
        for (std::uint32_t v = 0; v < d.values.size(); ++v) {
            if (tested.count(v) != 0) {
                out.emplace_back(Category{v});
            } else if (!untested_added) {
                out.emplace_back(Category{v});
                untested_added = true;
            }
        }
        break;
    }
    case FeatureKind::kContinuous:
        if (d.thresholds.empty()) {
            out.emplace_back(Rational(7));
        } else {
            out.emplace_back(Rational(d.thresholds.front() - 1));
            for (const Rational& t : d.thresholds)
                out.emplace_back(t);
        }
        break;
    }
    return out;
}

void for_each_extension(const Model& model, const Cube& fixed, const std::function<bool(const Cube&)>& visit,
                        std::uint64_t cap)
{
    const std::size_t k = model.features.size();
    const auto used = used_features(model);
    std::vector<std::vector<Value>> domains(k);
    std::vector<FeatureId> free;
    Cube base = fixed;
    for (FeatureId f = 0; f < k; ++f) {
        if (fixed.contains(f))
            continue;
        domains[f] = probe_values(model, f);
        if (used[f])
            free.push_back(f);
        else
            base.assign(f, domains[f][0]);
    }
    checked_product(domains, free, cap);
    odometer(domains, free, std::move(base), visit);
}

std::optional<Cube> counterexample(const Model& model, const Cube& fixed, ClassId pi, std::uint64_t cap)
{
    std::optional<Cube> found;
    for_each_extension(
        model, fixed,
        [&](const Cube& x) {
            if (walk_predict(model, x) != pi) {
                found = x;
                return false;
            }
            return true;
        },
        cap);
    return found;
}

bool entails(const Model& model, const Cube& fixed, ClassId pi, std::uint64_t cap)
{
    return !counterexample(model, fixed, pi, cap).has_value();
}

std::uint64_t count_counterexample_cells(const Model& model, const Cube& fixed, ClassId pi, std::uint64_t cap)
{
    std::uint64_t count = 0;
    for_each_extension(
        model, fixed,
        [&](const Cube& x) {
            count += walk_predict(model, x) != pi ? 1 : 0;
            return true;
        },
        cap);
    return count;
}

Rational max_margin(const Model& model, const Abstraction& abs, const AbstractCell& cell, ClassId c, ClassId pi,
                    std::uint64_t cap)
{
    const std::size_t k = model.features.size();
    const auto used = used_features(model);
    std::vector<std::vector<Value>> domains(k);
    std::vector<FeatureId> free;
    Cube base;
    for (FeatureId f = 0; f < k; ++f) {
        for (Value& v : probe_values(model, f))
            if (abs.allows(cell, f, abs.atom_of(f, v)))
                domains[f].push_back(std::move(v));
        if (domains[f].empty())
            throw std::invalid_argument("cell is empty");
        if (used[f])
            free.push_back(f);
        else
            base.assign(f, domains[f][0]);
    }
    checked_product(domains, free, cap);
    std::optional<Rational> best;
    odometer(domains, free, std::move(base), [&](const Cube& x) {
        const auto s = walk_scores(model, x);
        Rational margin = s[c] - s[pi];
        if (!best || margin > *best)
            best = margin;
        return true;
    });
    return *best;
}

std::size_t minimum_explanation_size(const Model& model, const Cube& instance, ClassId pi, std::uint64_t cap)
{
    const auto used = used_features(model);
    std::vector<FeatureId> pool;
    for (const Literal& l : instance)
        if (used[l.feature])
            pool.push_back(l.feature);
    const std::size_t n = pool.size();
    for (std::size_t size = 0; size <= n; ++size) {
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
        do {
            std::vector<FeatureId> chosen;
            for (std::size_t i = 0; i < n; ++i)
                if (pick[i])
                    chosen.push_back(pool[i]);
            if (entails(model, restrict(instance, chosen), pi, cap))
                return size;
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    throw std::logic_error("instance does not entail its own prediction");
}

bool is_subset_minimal(const Model& model, const Cube& cube, ClassId pi, std::uint64_t cap)
{
    if (!entails(model, cube, pi, cap))
        return false;
    for (const Literal& l : cube) {
        Cube smaller = cube;
        smaller.erase(l.feature);
        if (entails(model, smaller, pi, cap))
            return false;
    }
    return true;
}

Status classify(const Model& model, const Cube& candidate, ClassId pi, std::uint64_t cap)
{
    if (!entails(model, candidate, pi, cap))
        return Status::kOptimistic;
    return is_subset_minimal(model, candidate, pi, cap) ? Status::kRealistic : Status::kPessimistic;
}

}  // namespace abductree::reference
