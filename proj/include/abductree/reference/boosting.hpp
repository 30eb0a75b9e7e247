#ifndef ABDUCTREE_REFERENCE_BOOSTING_HPP
#define ABDUCTREE_REFERENCE_BOOSTING_HPP

// A small softmax gradient-boosting trainer in the style of XGBoost's exact
// greedy method. It exists to produce realistic ensembles (many shared
// thresholds, correlated trees) for benchmarks and size statistics.

#include "abductree/cube.hpp"
#include "abductree/ensemble.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace abductree::reference {

struct Dataset {
    /// Continuous features carry no thresholds; training fills them in.
    std::vector<FeatureDecl> features;
    std::vector<Cube> rows;
    std::vector<ClassId> labels;
    std::vector<std::string> class_names;
};

struct BoostingParams {
    std::size_t rounds = 50;  ///< trees per class
    std::size_t max_depth = 3;
    double eta = 0.3;
    double lambda = 1.0;
    double min_child_weight = 1.0;
    std::size_t bins = 32;  ///< candidate thresholds per continuous feature
};

/// Leaves are rounded to 9 significant digits, as in a text model dump.
Model train_boosted(const Dataset& data, const BoostingParams& params);

/**
 * Two-class tabular data with `num_features` columns cycling through
 * continuous, boolean and categorical kinds. The label depends mostly on a
 * few leading columns, plus noise.
 */
Dataset synthetic_tabular(std::size_t num_rows, std::size_t num_features, std::uint64_t seed);

}  // namespace abductree::reference

#endif  // ABDUCTREE_REFERENCE_BOOSTING_HPP
