#ifndef ABDUCTREE_HITTING_HPP
#define ABDUCTREE_HITTING_HPP

#include <cstddef>
#include <vector>

namespace abductree {

/// Sets to hit over a universe of element ids (feature indices).
struct HitProblem {
    std::vector<std::size_t> universe;
    std::vector<std::vector<std::size_t>> sets;
};

/**
 * A smallest subset of the universe meeting every set, returned sorted.
 * Among all smallest ones, the lexicographically least.
 *
 * Throws std::invalid_argument if a set is empty or leaves the universe.
 */
std::vector<std::size_t> minimum_hitting_set(const HitProblem& problem);

/// Greedy cover: repeatedly take the element in the most unhit sets, lowest
/// id on ties. Not minimum in general; used as the upper bound.
std::vector<std::size_t> greedy_hitting_set(const HitProblem& problem);

}  // namespace abductree

#endif  // ABDUCTREE_HITTING_HPP
