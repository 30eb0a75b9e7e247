#ifndef ABDUCTREE_EXPLAIN_HPP
#define ABDUCTREE_EXPLAIN_HPP

#include "abductree/cube.hpp"
#include "abductree/oracle.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace abductree {

enum class ExplanationKind : std::uint8_t { kSubsetMinimal, kCardinalityMinimal, kRepaired, kRefined };
std::string_view to_string(ExplanationKind kind);

/// Literals of `instance` that entail class `pi`.
struct Explanation {
    Cube literals;
    ExplanationKind kind = ExplanationKind::kSubsetMinimal;
    Cube instance;
    ClassId pi = 0;
};

enum class AuditStatus : std::uint8_t { kOptimistic, kPessimistic, kRealistic };
std::string_view to_string(AuditStatus status);

/// Seconds spent per phase of an audit; zero for phases that did not run.
struct PhaseTimings {
    double validation = 0;
    double repair = 0;
    double refinement = 0;
};

struct Verdict {
    AuditStatus status = AuditStatus::kRealistic;
    /// Optimistic only; at least one.
    std::vector<Counterexample> counterexamples;
    bool counterexamples_truncated = false;
    std::optional<Explanation> repaired;  // optimistic
    std::optional<Explanation> refined;   // pessimistic and realistic
    PhaseTimings timings;
};

/// The implicit hitting set loop needed more correction sets than allowed.
class IterationLimitExceeded : public ResourceLimitExceeded {
public:
    using ResourceLimitExceeded::ResourceLimitExceeded;
};

/// A call whose arguments break its contract, e.g. refining a candidate that
/// does not entail the prediction.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class RefineMode : std::uint8_t { kSubset, kCardinality };

struct ExplainOptions {
    /// Cap on correction sets collected by cardinality_minimal.
    std::size_t max_hitting_sets = 100'000;
    /// Greedily shrink each correction set before adding it.
    bool shrink_correction_sets = false;
    /// Counterexamples attached to an optimistic verdict.
    std::size_t max_counterexamples = 5;
};

/**
 * Explanation algorithms over one oracle.
 *
 * Every method requires `instance` to be total and predicted as `pi`, and
 * every candidate to be a sub-cube of `instance`; violations throw
 * PreconditionError. Budget exhaustion in the oracle propagates as
 * ResourceLimitExceeded.
 *
 * Deletion scans use `order` when given: the listed features first, in the
 * listed order, then the rest ascending. Features the model never tests are
 * dropped before any scan.
 */
class Explainer {
public:
    explicit Explainer(const Oracle& oracle, ExplainOptions options = {});

    const Oracle& oracle() const { return *oracle_; }
    const ExplainOptions& options() const { return options_; }

    Explanation subset_minimal(const Cube& instance, ClassId pi, const std::vector<FeatureId>& order = {}) const;
    Explanation cardinality_minimal(const Cube& instance, ClassId pi) const;

    /// Empty iff `candidate` entails `pi`.
    std::optional<Counterexample> validate(const Cube& instance, ClassId pi, const Cube& candidate) const;

    /// Deletion over the literals outside `broken` first, then over those
    /// inside it, so the candidate's own literals are dropped last.
    Explanation repair(const Cube& instance, ClassId pi, const Cube& broken,
                       const std::vector<FeatureId>& order = {}) const;

    /// Minimal sub-cube of an entailing candidate. Throws PreconditionError if
    /// the candidate does not entail.
    Explanation refine(const Cube& instance, ClassId pi, const Cube& candidate, RefineMode mode,
                       const std::vector<FeatureId>& order = {}) const;

    Verdict audit(const Cube& instance, ClassId pi, const Cube& candidate) const;

private:
    const Oracle* oracle_;
    ExplainOptions options_;

    void check_instance(const Cube& instance, ClassId pi) const;
    void check_candidate(const Cube& instance, const Cube& candidate) const;
    Cube used_part(const Cube& cube) const;
    Cube deletion(Cube current, const std::vector<FeatureId>& scan, ClassId pi) const;
    Cube implicit_hitting_set(const Cube& base, ClassId pi) const;
};

/// The scan order: `order` first (unknown or repeated ids ignored), then the
/// remaining ids below `num_features` ascending.
std::vector<FeatureId> scan_order(std::size_t num_features, const std::vector<FeatureId>& order);

}  // namespace abductree

#endif  // ABDUCTREE_EXPLAIN_HPP
