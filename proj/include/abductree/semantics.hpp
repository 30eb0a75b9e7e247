#ifndef ABDUCTREE_SEMANTICS_HPP
#define ABDUCTREE_SEMANTICS_HPP

#include "abductree/cube.hpp"
#include "abductree/ensemble.hpp"

#include <span>
#include <string>
#include <vector>

namespace abductree {

/**
 * Forward evaluation result. `pi` is the argmax of `scores`; ties go to the
 * lowest class index.
 */
struct Prediction {
    ClassId pi = 0;
    std::vector<Rational> scores;
};

/// Per-class sums of the leaves reached by a total instance. The base score
/// is not included. Throws std::invalid_argument for partial cubes.
std::vector<Rational> score(const Model& model, const Cube& instance);

/// score() plus the ensemble's base score, for reporting.
std::vector<Rational> raw_scores(const Model& model, const Cube& instance);

Prediction predict(const Model& model, const Cube& instance);

/// Lowest index among the maximal entries.
ClassId argmax(std::span<const Rational> scores);

/// v_winner > v_loser
struct ScoreInequality {
    ClassId winner;
    ClassId loser;

    friend bool operator==(const ScoreInequality&, const ScoreInequality&) = default;
};

/// The m-1 strict inequalities v_pi > v_i, i != pi, in class order.
std::vector<ScoreInequality> prediction_formula(std::size_t num_classes, ClassId pi);

/**
 * One disjunct of the negated prediction under the lowest-index tie rule:
 * v_adversary >= v_pi when adversary < pi, v_adversary > v_pi otherwise.
 */
struct AdversaryCondition {
    ClassId adversary;
    bool strict;
};
std::vector<AdversaryCondition> negated_prediction(std::size_t num_classes, ClassId pi);

/**
 * A root-to-leaf path of one tree: `right_nodes` are the nodes whose test
 * holds along the path, `left_nodes` those whose test fails.
 */
struct PathConstraint {
    std::size_t tree = 0;
    std::vector<std::int32_t> right_nodes;
    std::vector<std::int32_t> left_nodes;
    std::int32_t leaf = 0;
    Rational value;
};

/// All syntactically realizable root-to-leaf paths of a tree.
std::vector<PathConstraint> tree_paths(const Model& model, std::size_t tree_index);

enum class QueryMode { kEntailment, kCounterexampleSearch };

/// I' /\ M /\ not(pi): unsatisfiable iff `fixed` entails class `target`.
struct Query {
    Cube fixed;
    ClassId target = 0;
    QueryMode mode = QueryMode::kEntailment;
};

/**
 * SMT-LIB 2.6 (QF_LRA) document for the query: satisfiable iff some total
 * instance extending `query.fixed` is not predicted as `query.target`.
 * Only features used by the model are declared.
 */
std::string export_smtlib(const Model& model, const Query& query);

/// SMT-LIB rendering of a rational: `0.5`, `(- 2.0)`, `(/ 1.0 3.0)`.
std::string smtlib_real(const Rational& value);

}  // namespace abductree

#endif  // ABDUCTREE_SEMANTICS_HPP
