#ifndef ABDUCTREE_MODEL_IO_HPP
#define ABDUCTREE_MODEL_IO_HPP

#include "abductree/cube.hpp"
#include "abductree/ensemble.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace abductree {

/** Malformed input file. The message names the offending line or node. */
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Reads a feature map: one `index<TAB>name<TAB>kind` line per feature, kind
 * one of `binary`, `categorical:v1|v2|...`, `continuous` (XGBoost's `i`,
 * `q`, `int` and `float` are accepted as aliases). Blank lines and lines
 * starting with '#' are skipped. Continuous thresholds are left empty.
 */
std::vector<FeatureDecl> parse_feature_map(std::string_view text);

/**
 * Reads a model document (XGBoost JSON dump layout wrapped in a header
 * object) against a feature map and returns the validated model. Leaf
 * values and split conditions are read from their decimal text exactly.
 */
Model parse_model(std::string_view model_json, std::string_view feature_map,
                  std::size_t max_depth = Model::kDefaultMaxDepth);

/**
 * Reads a comma-separated instance file. The header must name every
 * declared feature exactly once; a trailing `label` column is ignored.
 */
std::vector<Cube> parse_instances(std::string_view csv, const FeatureSpace& features);

std::string write_model_json(const Model& model);
std::string write_feature_map(const FeatureSpace& features);
std::string write_instances(const FeatureSpace& features, std::span<const Cube> instances);

std::string read_file(const std::string& path);

}  // namespace abductree

#endif  // ABDUCTREE_MODEL_IO_HPP
