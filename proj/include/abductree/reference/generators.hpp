#ifndef ABDUCTREE_REFERENCE_GENERATORS_HPP
#define ABDUCTREE_REFERENCE_GENERATORS_HPP

// Random models and instances for property tests. Everything is a pure
// function of the RandomModelSpec and the generator state.

#include "abductree/cube.hpp"
#include "abductree/ensemble.hpp"

#include <random>

namespace abductree::reference {

using Rng = std::mt19937_64;

struct RandomModelSpec {
    std::size_t num_features = 6;
    std::size_t num_classes = 2;
    std::size_t trees_per_class = 2;
    std::size_t max_depth = 3;
    /// Share of categorical and continuous features; the rest is boolean.
    double categorical_share = 0.0;
    double continuous_share = 0.0;
    std::uint32_t max_categories = 4;
    std::uint32_t max_thresholds = 3;
    /// Chance that a node above max_depth splits instead of becoming a leaf.
    double split_probability = 0.8;
    /// Leaves are multiples of 1/leaf_denominator in [-leaf_range, leaf_range].
    /// Small denominators make score ties common.
    std::int64_t leaf_denominator = 4;
    std::int64_t leaf_range = 4;
};

/// Valid model whose continuous features declare exactly the thresholds its
/// splits use, with nodes in the parser's canonical order.
Model random_model(const RandomModelSpec& spec, Rng& rng);

/// Total instance; continuous values land on thresholds, between them and
/// beyond both ends.
Cube random_instance(const FeatureSpace& features, Rng& rng);

/// Keeps each literal with probability `keep`.
Cube random_subcube(const Cube& cube, double keep, Rng& rng);

}  // namespace abductree::reference

#endif  // ABDUCTREE_REFERENCE_GENERATORS_HPP
