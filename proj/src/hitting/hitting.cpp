#include "abductree/hitting.hpp"

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace abductree {

namespace {

using Bits = boost::dynamic_bitset<>;

/// The problem re-indexed: elements become positions 0..n-1 in ascending id
/// order, sets become bitsets over positions.
struct Indexed {
    std::vector<std::size_t> elements;
    std::vector<Bits> sets;    // per set, over positions
    std::vector<Bits> covers;  // per position, over sets
};

Indexed index_problem(const HitProblem& problem)
{
    Indexed ix;
    ix.elements = problem.universe;
    std::sort(ix.elements.begin(), ix.elements.end());
    ix.elements.erase(std::unique(ix.elements.begin(), ix.elements.end()), ix.elements.end());
    const std::size_t n = ix.elements.size();
    const std::size_t m = problem.sets.size();
    ix.covers.assign(n, Bits(m));
    for (std::size_t s = 0; s < m; ++s) {
        if (problem.sets[s].empty())
            throw std::invalid_argument("hitting set instance contains an empty set");
        Bits bits(n);
        for (std::size_t e : problem.sets[s]) {
            auto it = std::lower_bound(ix.elements.begin(), ix.elements.end(), e);
            if (it == ix.elements.end() || *it != e)
                throw std::invalid_argument("set element " + std::to_string(e) + " is outside the universe");
            const auto pos = static_cast<std::size_t>(it - ix.elements.begin());
            bits.set(pos);
            ix.covers[pos].set(s);
        }
        ix.sets.push_back(std::move(bits));
    }
    return ix;
}

std::vector<std::size_t> greedy_positions(const Indexed& ix, Bits unhit)
{
    std::vector<std::size_t> out;
    while (unhit.any()) {
        std::size_t best = 0;
        std::size_t best_count = 0;
        for (std::size_t e = 0; e < ix.covers.size(); ++e) {
            const std::size_t count = (ix.covers[e] & unhit).count();
            if (count > best_count) {
                best = e;
                best_count = count;
            }
        }
        out.push_back(best);
        unhit -= ix.covers[best];
    }
    std::sort(out.begin(), out.end());
    return out;
}

class Solver {
public:
    explicit Solver(const Indexed& ix)
        : ix_(ix)
        , n_(ix.elements.size())
    {
        suffix_.assign(n_ + 1, Bits(n_));
        for (std::size_t i = n_; i-- > 0;) {
            suffix_[i] = suffix_[i + 1];
            suffix_[i].set(i);
        }
    }

    /// Number of pairwise disjoint unhit sets, restricted to positions >= from.
    /// Returns n+1 when some unhit set cannot be hit any more.
    std::size_t lower_bound(const Bits& unhit, std::size_t from)
    {
        scratch_.clear();
        for (std::size_t s = unhit.find_first(); s != Bits::npos; s = unhit.find_next(s)) {
            Bits rest = ix_.sets[s] & suffix_[from];
            if (rest.none())
                return n_ + 1;
            scratch_.push_back(std::move(rest));
        }
        std::stable_sort(scratch_.begin(), scratch_.end(),
                         [](const Bits& a, const Bits& b) { return a.count() < b.count(); });
        Bits used(n_);
        std::size_t bound = 0;
        for (const Bits& b : scratch_)
            if (!b.intersects(used)) {
                used |= b;
                ++bound;
            }
        return bound;
    }

    bool solve(std::size_t k, std::vector<std::size_t>& chosen)
    {
        chosen.clear();
        k_ = k;
        return dfs(0, Bits(ix_.sets.size()).set(), chosen);
    }

private:
    const Indexed& ix_;
    std::size_t n_;
    std::size_t k_ = 0;
    std::vector<Bits> suffix_;
    std::vector<Bits> scratch_;

    // Include-first over ascending positions, so the first solution of a
    // given size is the lexicographically least one.
    bool dfs(std::size_t i, const Bits& unhit, std::vector<std::size_t>& chosen)
    {
        if (unhit.none())
            return true;
        if (chosen.size() == k_ || i == n_)
            return false;
        if (chosen.size() + lower_bound(unhit, i) > k_)
            return false;
        if (ix_.covers[i].intersects(unhit)) {
            chosen.push_back(i);
            if (dfs(i + 1, unhit - ix_.covers[i], chosen))
                return true;
            chosen.pop_back();
        }
        return dfs(i + 1, unhit, chosen);
    }
};

}  // namespace

std::vector<std::size_t> greedy_hitting_set(const HitProblem& problem)
{
    const Indexed ix = index_problem(problem);
    std::vector<std::size_t> out;
    for (std::size_t p : greedy_positions(ix, Bits(ix.sets.size()).set()))
        out.push_back(ix.elements[p]);
    return out;
}

std::vector<std::size_t> minimum_hitting_set(const HitProblem& problem)
{
    const Indexed ix = index_problem(problem);
    Solver solver(ix);
    Bits unhit(ix.sets.size());
    unhit.set();

    const std::size_t upper = greedy_positions(ix, unhit).size();
    std::vector<std::size_t> chosen;
    for (std::size_t k = solver.lower_bound(unhit, 0); k <= upper; ++k) {
        if (solver.solve(k, chosen)) {
            std::vector<std::size_t> out;
            for (std::size_t p : chosen)
                out.push_back(ix.elements[p]);
            return out;
        }
    }
    // unreachable: the greedy cover has size `upper`
    throw std::logic_error("hitting set search missed the greedy cover");
}

}  // namespace abductree
