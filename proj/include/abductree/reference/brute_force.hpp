#ifndef ABDUCTREE_REFERENCE_BRUTE_FORCE_HPP
#define ABDUCTREE_REFERENCE_BRUTE_FORCE_HPP

// Exhaustive reference implementations, for tests and the selftest command.
// They share no search code with the oracle: scores come from a separate
// tree walk and the candidate values per feature are chosen independently.

#include "abductree/abstraction.hpp"
#include "abductree/cube.hpp"
#include "abductree/ensemble.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace abductree::reference {

class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultCap = std::uint64_t{1} << 22;

/// Straight recursive tree walk over concrete values.
std::vector<Rational> walk_scores(const Model& model, const Cube& instance);
ClassId walk_predict(const Model& model, const Cube& instance);

/**
 * One concrete value per distinct behaviour of a feature: both booleans;
 * every tested category plus one untested one; for thresholds t_0 < ... the
 * values t_0 - 1, t_0, t_1, ... (t_j lies in the interval starting at t_j).
 */
std::vector<Value> probe_values(const Model& model, FeatureId f);

/// Calls `visit` on every total instance that extends `fixed`, drawn from the
/// probe values of the free used features. Unused free features take their
/// first probe value. Stops early when `visit` returns false.
void for_each_extension(const Model& model, const Cube& fixed, const std::function<bool(const Cube&)>& visit,
                        std::uint64_t cap = kDefaultCap);

bool entails(const Model& model, const Cube& fixed, ClassId pi, std::uint64_t cap = kDefaultCap);
std::optional<Cube> counterexample(const Model& model, const Cube& fixed, ClassId pi,
                                   std::uint64_t cap = kDefaultCap);

/// Distinct misclassified behaviours among the extensions of `fixed`.
std::uint64_t count_counterexample_cells(const Model& model, const Cube& fixed, ClassId pi,
                                         std::uint64_t cap = kDefaultCap);

/// Exact max of v_c - v_pi over the instances of `cell`.
Rational max_margin(const Model& model, const Abstraction& abs, const AbstractCell& cell, ClassId c, ClassId pi,
                    std::uint64_t cap = kDefaultCap);

/// Size of a smallest entailing sub-cube of `instance`, by increasing size.
std::size_t minimum_explanation_size(const Model& model, const Cube& instance, ClassId pi,
                                     std::uint64_t cap = kDefaultCap);

/// Entails, and dropping any single literal breaks entailment.
bool is_subset_minimal(const Model& model, const Cube& cube, ClassId pi, std::uint64_t cap = kDefaultCap);

enum class Status { kOptimistic, kPessimistic, kRealistic };
/// Heuristic-explanation class of `candidate`: has a counterexample,
/// entails with a redundant literal, or entails minimally.
Status classify(const Model& model, const Cube& candidate, ClassId pi, std::uint64_t cap = kDefaultCap);

}  // namespace abductree::reference

#endif  // ABDUCTREE_REFERENCE_BRUTE_FORCE_HPP
