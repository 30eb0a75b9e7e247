#ifndef ABDUCTREE_ORACLE_HPP
#define ABDUCTREE_ORACLE_HPP

#include "abductree/abstraction.hpp"
#include "abductree/cube.hpp"
#include "abductree/ensemble.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace abductree {

/// A query ran out of nodes or wall-clock time. The answer is unknown.
class ResourceLimitExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A result failed its own re-verification. Indicates a bug, never bad input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct OracleConfig {
    /// Search nodes per query, summed over adversary classes.
    std::uint64_t node_budget = 10'000'000;
    double time_budget_seconds = 60.0;
    /// Remember entailed cubes and witnesses across queries (monotone
    /// subsumption). Off by default so that every query is answered fresh.
    bool use_cache = false;
};

/// A total instance extending the queried cube whose predicted class is not
/// the target.
struct Counterexample {
    Cube instance;
    ClassId predicted = 0;
    std::vector<Rational> scores;
};

struct CounterexampleList {
    std::vector<Counterexample> items;
    /// The search hit a resource limit before it was exhausted.
    bool truncated = false;
};

/**
 * Exact entailment oracle for one model.
 *
 * Decides whether every total instance extending a cube is predicted as a
 * given class, under the lowest-index tie rule. The search runs one
 * branch-and-bound per adversary class over abstract cells, with leaf
 * values scaled to integers by their common denominator.
 *
 * Thread-safe: const methods may be called concurrently. The model must
 * outlive the oracle.
 */
class Oracle {
public:
    explicit Oracle(const Model& model, OracleConfig config = {});
    ~Oracle();
    Oracle(const Oracle&) = delete;
    Oracle& operator=(const Oracle&) = delete;

    const Model& model() const { return *model_; }
    const Abstraction& abstraction() const { return abstraction_; }
    const OracleConfig& config() const { return config_; }

    /// Throws ResourceLimitExceeded when the budget runs out.
    bool entails(const Cube& fixed, ClassId pi) const;

    /// Empty iff entails(fixed, pi). The witness is re-predicted before it is
    /// returned; a mismatch throws InternalError.
    std::optional<Counterexample> find_counterexample(const Cube& fixed, ClassId pi) const;

    /**
     * Up to `limit` counterexamples from pairwise distinct atomic cells
     * (distinct atoms on some free relevant feature). Never throws on budget
     * exhaustion; sets `truncated` instead.
     */
    CounterexampleList enumerate_counterexamples(const Cube& fixed, ClassId pi, std::size_t limit) const;

    /// Sum of the largest reachable leaves of c's trees minus the sum of the
    /// smallest reachable leaves of pi's trees. Never below the true maximum
    /// of v_c - v_pi over the cell.
    Rational max_margin_bound(const AbstractCell& cell, ClassId c, ClassId pi) const;

    /// Search nodes expanded by this oracle since construction.
    std::uint64_t nodes_expanded() const { return nodes_expanded_.load(std::memory_order_relaxed); }

    struct Compiled;
    struct Cache;

private:
    const Model* model_;
    OracleConfig config_;
    Abstraction abstraction_;
    std::unique_ptr<Compiled> compiled_;
    std::unique_ptr<Cache> cache_;
    mutable std::atomic<std::uint64_t> nodes_expanded_{0};

    Counterexample verified_witness(const Cube& fixed, const AtomPoint& point, ClassId pi) const;
    std::optional<Counterexample> search_counterexample(const Cube& fixed, ClassId pi) const;
};

}  // namespace abductree

#endif  // ABDUCTREE_ORACLE_HPP
