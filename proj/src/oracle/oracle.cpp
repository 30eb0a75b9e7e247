#include "abductree/oracle.hpp"

#include "abductree/semantics.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <set>
#include <type_traits>

namespace abductree {

namespace {

struct CompiledNode {
    std::int32_t left = kNoChild;
    std::int32_t right = kNoChild;
    std::uint32_t pred = 0;
};

// Adversary c beats pi on a scaled integer margin v_c - v_pi >= need.
int need_for(ClassId c, ClassId pi) { return c < pi ? 0 : 1; }

}  // namespace

struct Oracle::Compiled {
    std::vector<SplitPredicate> preds;  // sorted, unique
    std::vector<std::vector<CompiledNode>> trees;
    // leaf values times `scale`, indexed like the nodes
    std::vector<std::vector<mpz_class>> leaf_big;
    std::vector<std::vector<std::int64_t>> leaf_small;
    bool small = false;
    mpz_class scale = 1;
    std::size_t max_depth = 0;
};

struct Oracle::Cache {
    std::mutex mutex;
    std::vector<std::vector<Cube>> entailed;                // per target class
    std::vector<std::vector<Counterexample>> witnesses;     // per target class
    static constexpr std::size_t kMaxEntries = 4096;
};

namespace {

class Budget {
public:
    Budget(const OracleConfig& config, std::atomic<std::uint64_t>& total)
        : limit_(config.node_budget)
        , deadline_(std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(config.time_budget_seconds)))
        , total_(total)
    {
    }
    ~Budget() { total_.fetch_add(used_, std::memory_order_relaxed); }
    Budget(const Budget&) = delete;
    Budget& operator=(const Budget&) = delete;

    void tick()
    {
        if (++used_ > limit_)
            throw ResourceLimitExceeded("node budget of " + std::to_string(limit_) + " exhausted");
        if ((used_ & 255U) == 0 && std::chrono::steady_clock::now() > deadline_)
            throw ResourceLimitExceeded("time budget exhausted");
    }

private:
    std::uint64_t limit_;
    std::uint64_t used_ = 0;
    std::chrono::steady_clock::time_point deadline_;
    std::atomic<std::uint64_t>& total_;
};

/**
 * Branch and bound for one (adversary, target) pair. `Int` is int64 when the
 * scaled leaf sums provably fit, mpz_class otherwise.
 */
template <class Int>
class MarginSearch {
public:
    struct Eval {
        Int bound{};
        std::int64_t pred = -1;  // branching predicate, -1 once resolved
    };

    MarginSearch(const Oracle::Compiled& compiled, const Abstraction& abs, const Ensemble& ensemble, Budget* budget)
        : c_(compiled)
        , abs_(abs)
        , ensemble_(ensemble)
        , budget_(budget)
        , counts_(compiled.preds.size(), 0)
        , stamp_(compiled.preds.size(), 0)
    {
    }

    void set_pair(ClassId adversary, ClassId pi)
    {
        adversary_ = adversary;
        pi_ = pi;
        need_ = need_for(adversary, pi);
    }
    const Int& need() const { return need_; }

    Eval evaluate(const AbstractCell& cell)
    {
        if (budget_ != nullptr)
            budget_->tick();
        Eval e;
        const std::size_t q = ensemble_.trees_per_class;
        for (std::size_t t = adversary_ * q; t < (adversary_ + 1) * q; ++t)
            e.bound += walk(t, cell, true);
        for (std::size_t t = pi_ * q; t < (pi_ + 1) * q; ++t)
            e.bound -= walk(t, cell, false);

        std::uint32_t best = 0;
        for (std::uint32_t p : touched_) {
            if (counts_[p] > best || (counts_[p] == best && static_cast<std::int64_t>(p) < e.pred)) {
                best = counts_[p];
                e.pred = p;
            }
            counts_[p] = 0;
        }
        touched_.clear();
        return e;
    }

    /// Calls `visit(cell)` on every resolved cell whose margin reaches the
    /// tie-rule threshold, depth first, until it returns false.
    template <class Visitor>
    bool run(const AbstractCell& root, const Eval& root_eval, Visitor&& visit)
    {
        if (root_eval.bound < need_)
            return true;
        return descend(root, root_eval, visit);
    }

private:
    const Oracle::Compiled& c_;
    const Abstraction& abs_;
    const Ensemble& ensemble_;
    Budget* budget_;
    ClassId adversary_ = 0;
    ClassId pi_ = 0;
    Int need_{};

    std::vector<std::uint32_t> counts_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t tree_stamp_ = 0;
    std::vector<std::uint32_t> touched_;
    std::vector<std::int32_t> stack_;

    const std::vector<Int>& leaves(std::size_t t) const
    {
        if constexpr (std::is_same_v<Int, std::int64_t>)
            return c_.leaf_small[t];
        else
            return c_.leaf_big[t];
    }

    // Largest (or smallest) reachable leaf; records ambiguous predicates.
    Int walk(std::size_t t, const AbstractCell& cell, bool want_max)
    {
        const auto& nodes = c_.trees[t];
        const auto& vals = leaves(t);
        ++tree_stamp_;
        bool first = true;
        Int out{};
        stack_.clear();
        stack_.push_back(0);
        while (!stack_.empty()) {
            const std::int32_t id = stack_.back();
            stack_.pop_back();
            const CompiledNode& n = nodes[static_cast<std::size_t>(id)];
            if (n.left == kNoChild) {
                const Int& v = vals[static_cast<std::size_t>(id)];
                if (first || (want_max ? v > out : v < out))
                    out = v;
                first = false;
                continue;
            }
            switch (abs_.evaluate(c_.preds[n.pred], cell)) {
            case Truth::kTrue:
                stack_.push_back(n.right);
                break;
            case Truth::kFalse:
                stack_.push_back(n.left);
                break;
            case Truth::kUnknown:
                stack_.push_back(n.right);
                stack_.push_back(n.left);
                if (stamp_[n.pred] != tree_stamp_) {
                    stamp_[n.pred] = tree_stamp_;
                    if (counts_[n.pred]++ == 0)
                        touched_.push_back(n.pred);
                }
                break;
            }
        }
        return out;
    }

    template <class Visitor>
    bool descend(const AbstractCell& cell, const Eval& e, Visitor& visit)
    {
        if (e.pred < 0)
            return visit(cell);
        auto [no, yes] = abs_.branch(cell, c_.preds[static_cast<std::size_t>(e.pred)]);
        const Eval eno = evaluate(no);
        const Eval eyes = evaluate(yes);
        if (eyes.bound > eno.bound) {
            if (eyes.bound >= need_ && !descend(yes, eyes, visit))
                return false;
            if (eno.bound >= need_ && !descend(no, eno, visit))
                return false;
        } else {
            if (eno.bound >= need_ && !descend(no, eno, visit))
                return false;
            if (eyes.bound >= need_ && !descend(yes, eyes, visit))
                return false;
        }
        return true;
    }
};

// Adversaries worth searching, strongest root bound first.
template <class Int>
std::vector<std::pair<ClassId, typename MarginSearch<Int>::Eval>> ranked_adversaries(MarginSearch<Int>& search,
                                                                                    const AbstractCell& root,
                                                                                    std::size_t num_classes,
                                                                                    ClassId pi)
{
    std::vector<std::pair<ClassId, typename MarginSearch<Int>::Eval>> out;
    for (ClassId c = 0; c < num_classes; ++c) {
        if (c == pi)
            continue;
        search.set_pair(c, pi);
        auto e = search.evaluate(root);
        if (e.bound >= search.need())
            out.emplace_back(c, std::move(e));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second.bound > b.second.bound; });
    return out;
}

template <class Int>
std::optional<AtomPoint> first_counterexample_point(const Oracle::Compiled& compiled, const Abstraction& abs,
                                                    const Ensemble& ensemble, Budget& budget,
                                                    const AbstractCell& root, ClassId pi)
{
    MarginSearch<Int> search(compiled, abs, ensemble, &budget);
    std::optional<AtomPoint> found;
    for (auto& [c, eval] : ranked_adversaries(search, root, ensemble.num_classes, pi)) {
        search.set_pair(c, pi);
        search.run(root, eval, [&](const AbstractCell& cell) {
            found = abs.lowest_point(cell);
            return false;
        });
        if (found)
            break;
    }
    return found;
}

// Expands a resolved cell into its atomic points over the free relevant
// features, in lexicographic order.
template <class Fn>
bool for_each_point(const Abstraction& abs, const AbstractCell& cell, Fn&& fn)
{
    std::vector<FeatureId> free;
    for (FeatureId f : abs.relevant_features())
        if (!abs.is_point(cell, f))
            free.push_back(f);
    AtomPoint point = abs.lowest_point(cell);
    while (true) {
        if (!fn(point))
            return false;
        // odometer increment over allowed atoms, last feature fastest
        std::size_t i = free.size();
        while (i > 0) {
            const FeatureId f = free[i - 1];
            std::uint32_t a = point[f] + 1;
            while (a < abs.atom_count(f) && !abs.allows(cell, f, a))
                ++a;
            if (a < abs.atom_count(f)) {
                point[f] = a;
                break;
            }
            point[f] = abs.lowest_allowed(cell, f);
            --i;
        }
        if (i == 0)
            return true;
    }
}

template <class Int>
void enumerate_points(const Oracle::Compiled& compiled, const Abstraction& abs, const Ensemble& ensemble,
                      Budget& budget, const AbstractCell& root, ClassId pi, std::size_t limit,
                      std::vector<AtomPoint>& out)
{
    MarginSearch<Int> search(compiled, abs, ensemble, &budget);
    std::set<AtomPoint> seen;
    for (auto& [c, eval] : ranked_adversaries(search, root, ensemble.num_classes, pi)) {
        search.set_pair(c, pi);
        const bool complete = search.run(root, eval, [&](const AbstractCell& cell) {
            return for_each_point(abs, cell, [&](const AtomPoint& p) {
                budget.tick();
                if (seen.insert(p).second)
                    out.push_back(p);
                return out.size() < limit;
            });
        });
        if (!complete)
            return;
    }
}

}  // namespace

Oracle::Oracle(const Model& model, OracleConfig config)
    : model_(&model)
    , config_(config)
    , abstraction_(model)
    , compiled_(std::make_unique<Compiled>())
{
    const Ensemble& e = model.ensemble;
    Compiled& c = *compiled_;

    std::set<SplitPredicate> preds;
    for (const Tree& t : e.trees)
        for (const TreeNode& n : t.nodes)
            if (!n.is_leaf())
                preds.insert(n.split);
    c.preds.assign(preds.begin(), preds.end());

    for (const Tree& t : e.trees)
        for (const TreeNode& n : t.nodes)
            if (n.is_leaf())
                mpz_lcm(c.scale.get_mpz_t(), c.scale.get_mpz_t(), n.value.get_den().get_mpz_t());

    mpz_class total_magnitude = 0;
    for (const Tree& t : e.trees) {
        std::vector<CompiledNode> nodes(t.nodes.size());
        std::vector<mpz_class> leaves(t.nodes.size());
        mpz_class largest = 0;
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            const TreeNode& n = t.nodes[i];
            nodes[i].left = n.left;
            nodes[i].right = n.right;
            if (n.is_leaf()) {
                leaves[i] = n.value.get_num() * (c.scale / n.value.get_den());
                largest = std::max<mpz_class>(largest, abs(leaves[i]));
            } else {
                nodes[i].pred = static_cast<std::uint32_t>(
                    std::lower_bound(c.preds.begin(), c.preds.end(), n.split) - c.preds.begin());
            }
        }
        total_magnitude += largest;
        c.trees.push_back(std::move(nodes));
        c.leaf_big.push_back(std::move(leaves));
        c.max_depth = std::max(c.max_depth, t.depth());
    }

    c.small = total_magnitude < (mpz_class(1) << 62);
    if (c.small) {
        for (const auto& leaves : c.leaf_big) {
            std::vector<std::int64_t> small(leaves.size());
            for (std::size_t i = 0; i < leaves.size(); ++i)
                small[i] = leaves[i].get_si();
            c.leaf_small.push_back(std::move(small));
        }
    }

    if (config_.use_cache) {
        cache_ = std::make_unique<Cache>();
        cache_->entailed.resize(e.num_classes);
        cache_->witnesses.resize(e.num_classes);
    }
}

Oracle::~Oracle() = default;

Counterexample Oracle::verified_witness(const Cube& fixed, const AtomPoint& point, ClassId pi) const
{
    Cube instance = abstraction_.materialize(fixed, point);
    Prediction p = predict(*model_, instance);
    if (p.pi == pi || !fixed.subset_of(instance))
        throw InternalError("counterexample " + format_cube(model_->features, instance) +
                            " does not re-verify against class " + model_->ensemble.class_name(pi));
    return Counterexample{std::move(instance), p.pi, std::move(p.scores)};
}

std::optional<Counterexample> Oracle::search_counterexample(const Cube& fixed, ClassId pi) const
{
    check_cube(model_->features, fixed);
    if (pi >= model_->ensemble.num_classes)
        throw std::invalid_argument("target class out of range");

    const AbstractCell root = abstraction_.cell_of(fixed);
    Budget budget(config_, nodes_expanded_);
    const auto point = compiled_->small
                           ? first_counterexample_point<std::int64_t>(*compiled_, abstraction_, model_->ensemble,
                                                                      budget, root, pi)
                           : first_counterexample_point<mpz_class>(*compiled_, abstraction_, model_->ensemble,
                                                                   budget, root, pi);
    if (!point)
        return std::nullopt;
    return verified_witness(fixed, *point, pi);
}

std::optional<Counterexample> Oracle::find_counterexample(const Cube& fixed, ClassId pi) const
{
    if (cache_) {
        std::lock_guard lock(cache_->mutex);
        if (pi < cache_->witnesses.size()) {
            for (const auto& w : cache_->witnesses[pi])
                if (fixed.subset_of(w.instance))
                    return w;
            for (const auto& e : cache_->entailed[pi])
                if (e.subset_of(fixed))
                    return std::nullopt;
        }
    }

    auto result = search_counterexample(fixed, pi);

    if (cache_) {
        std::lock_guard lock(cache_->mutex);
        if (result) {
            auto& bucket = cache_->witnesses[pi];
            if (bucket.size() >= Cache::kMaxEntries)
                bucket.clear();
            bucket.push_back(*result);
        } else {
            auto& bucket = cache_->entailed[pi];
            if (bucket.size() >= Cache::kMaxEntries)
                bucket.clear();
            bucket.push_back(fixed);
        }
    }
    return result;
}

bool Oracle::entails(const Cube& fixed, ClassId pi) const { return !find_counterexample(fixed, pi).has_value(); }

CounterexampleList Oracle::enumerate_counterexamples(const Cube& fixed, ClassId pi, std::size_t limit) const
{
    check_cube(model_->features, fixed);
    if (pi >= model_->ensemble.num_classes)
        throw std::invalid_argument("target class out of range");
    if (limit == 0)
        throw std::invalid_argument("enumeration limit must be at least 1");

    const AbstractCell root = abstraction_.cell_of(fixed);
    std::vector<AtomPoint> points;
    CounterexampleList out;
    try {
        Budget budget(config_, nodes_expanded_);
        if (compiled_->small)
            enumerate_points<std::int64_t>(*compiled_, abstraction_, model_->ensemble, budget, root, pi, limit,
                                           points);
        else
            enumerate_points<mpz_class>(*compiled_, abstraction_, model_->ensemble, budget, root, pi, limit,
                                        points);
    } catch (const ResourceLimitExceeded&) {
        out.truncated = true;
    }
    out.items.reserve(points.size());
    for (const auto& p : points)
        out.items.push_back(verified_witness(fixed, p, pi));
    return out;
}

Rational Oracle::max_margin_bound(const AbstractCell& cell, ClassId c, ClassId pi) const
{
    const std::size_t m = model_->ensemble.num_classes;
    if (c >= m || pi >= m)
        throw std::invalid_argument("class index out of range");
    if (cell.restrictions.size() != abstraction_.num_features() || abstraction_.is_empty(cell))
        throw std::invalid_argument("max_margin_bound needs a non-empty cell over the model's features");
    MarginSearch<mpz_class> search(*compiled_, abstraction_, model_->ensemble, nullptr);
    search.set_pair(c, pi);
    Rational bound(search.evaluate(cell).bound, compiled_->scale);
    bound.canonicalize();
    return bound;
}

}  // namespace abductree
