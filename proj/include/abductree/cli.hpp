#ifndef ABDUCTREE_CLI_HPP
#define ABDUCTREE_CLI_HPP

#include "abductree/cube.hpp"
#include "abductree/explain.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace abductree::cli {

enum ExitCode : int {
    kOk = 0,
    kUsageError = 1,
    kIndeterminate = 2,
    kInternalFailure = 3,
};

struct Options {
    std::string command;
    std::string model_path;
    std::string fmap_path;
    std::string instances_path;
    std::string candidates_path;
    std::string out_path;    ///< empty: standard output
    std::string table_path;  ///< optional CSV view of the records
    std::string mode = "subset";
    std::string seed_order = "asc";
    std::uint64_t node_budget = 10'000'000;
    double time_budget = 60.0;
    std::size_t max_cex = 5;
    std::size_t workers = 0;  ///< 0: hardware concurrency
    bool timings = true;
    bool verify = false;
    bool shrink = false;
    std::optional<std::size_t> instance_id;
    std::string target_class;  ///< export-smt; name or index
    std::size_t selftest_queries = 2000;
    std::uint64_t selftest_seed = 1;
};

/// One line per candidate: `<row id>: name,name,...`. Rows are 0-based data
/// rows of the instance file. '#' starts a comment line.
struct CandidateLine {
    std::size_t id = 0;
    std::vector<FeatureId> features;
};
std::vector<CandidateLine> parse_candidates(std::string_view text, const FeatureSpace& features);

/// "asc", "desc" or a decimal seed for a shuffled order.
std::vector<FeatureId> parse_seed_order(std::string_view spec, std::size_t num_features);

/// JSON array of "name=value" strings.
nlohmann::json cube_json(const FeatureSpace& features, const Cube& cube);

struct SizeStats {
    std::size_t count = 0;
    double min = 0;
    double max = 0;
    double mean = 0;
    double stddev = 0;  ///< population
};
SizeStats size_stats(const std::vector<double>& values);
nlohmann::json stats_json(const SizeStats& stats);

/// The summary object of an audit report, computed from its records only.
nlohmann::json audit_summary(const nlohmann::json& records);
/// The summary object of an explain report, computed from its records only.
nlohmann::json explain_summary(const nlohmann::json& records);

/// Runs one subcommand. Diagnostics go to `err`; the report goes to
/// `options.out_path` or `out`.
int run(const Options& options, std::ostream& out, std::ostream& err);

}  // namespace abductree::cli

#endif  // ABDUCTREE_CLI_HPP
