#include "abductree/cli.hpp"

#include "abductree/model_io.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace abductree::cli {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::optional<std::size_t> parse_index(std::string_view s)
{
    if (s.empty() || s.size() > 18 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
        return std::nullopt;
    std::size_t v = 0;
    for (char c : s)
        v = v * 10 + static_cast<std::size_t>(c - '0');
    return v;
}

}  // namespace

std::vector<CandidateLine> parse_candidates(std::string_view text, const FeatureSpace& features)
{
    std::vector<CandidateLine> out;
    std::set<std::size_t> ids;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#')
            continue;
        const std::string where = "candidates line " + std::to_string(line_no);
        const auto colon = line.find(':');
        if (colon == std::string_view::npos)
            throw ParseError(where + ": expected '<id>: feature,feature,...'");
        const auto id = parse_index(trim(line.substr(0, colon)));
        if (!id)
            throw ParseError(where + ": instance id must be a non-negative integer");
        if (!ids.insert(*id).second)
            throw ParseError(where + ": instance id " + std::to_string(*id) + " listed twice");
        CandidateLine entry{*id, {}};
        std::string_view rest = trim(line.substr(colon + 1));
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view name = trim(rest.substr(0, comma));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            if (name.empty())
                throw ParseError(where + ": empty feature name");
            const auto f = features.find(name);
            if (!f)
                throw ParseError(where + ": unknown feature '" + std::string(name) + "'");
            if (std::find(entry.features.begin(), entry.features.end(), *f) != entry.features.end())
                throw ParseError(where + ": feature '" + std::string(name) + "' repeated");
            entry.features.push_back(*f);
        }
        out.push_back(std::move(entry));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

std::vector<FeatureId> parse_seed_order(std::string_view spec, std::size_t num_features)
{
    std::vector<FeatureId> order(num_features);
    std::iota(order.begin(), order.end(), FeatureId{0});
    if (spec == "asc")
        return order;
    if (spec == "desc") {
        std::reverse(order.begin(), order.end());
        return order;
    }
    const auto seed = parse_index(spec);
    if (!seed)
        throw std::invalid_argument("--seed-order must be 'asc', 'desc' or a non-negative integer seed");
    std::mt19937_64 rng(*seed);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

nlohmann::json cube_json(const FeatureSpace& features, const Cube& cube)
{
    auto out = nlohmann::json::array();
    for (const Literal& l : cube)
        out.push_back(format_literal(features, l));
    return out;
}

SizeStats size_stats(const std::vector<double>& values)
{
    SizeStats s;
    s.count = values.size();
    if (values.empty())
        return s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    double sum = 0;
    for (double v : values)
        sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0;
    for (double v : values)
        sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
    return s;
}

nlohmann::json stats_json(const SizeStats& stats)
{
    return {{"count", stats.count}, {"min", stats.min}, {"max", stats.max}, {"mean", stats.mean},
            {"stddev", stats.stddev}};
}

namespace {

// Mean of each timing field over the records that report it.
nlohmann::json mean_timings(const nlohmann::json& records)
{
    std::map<std::string, std::vector<double>> by_phase;
    for (const auto& r : records) {
        auto it = r.find("timings");
        if (it == r.end())
            continue;
        for (auto& [phase, seconds] : it->items())
            by_phase[phase].push_back(seconds.get<double>());
    }
    auto out = nlohmann::json::object();
    for (const auto& [phase, values] : by_phase)
        out[phase] = size_stats(values).mean;
    return out;
}

std::vector<double> explanation_sizes(const nlohmann::json& records)
{
    std::vector<double> out;
    for (const auto& r : records)
        if (auto it = r.find("explanation"); it != r.end())
            out.push_back(static_cast<double>(it->at("size").get<std::size_t>()));
    return out;
}

}  // namespace

nlohmann::json audit_summary(const nlohmann::json& records)
{
    std::map<std::string, std::size_t> counts{
        {"optimistic", 0}, {"pessimistic", 0}, {"realistic", 0}, {"indeterminate", 0}, {"error", 0}};
    std::vector<double> candidate_sizes;
    for (const auto& r : records) {
        const auto status = r.at("status").get<std::string>();
        ++counts[status];
        if (status == "optimistic" || status == "pessimistic" || status == "realistic")
            candidate_sizes.push_back(static_cast<double>(r.at("candidate").size()));
    }
    const std::size_t decided = counts["optimistic"] + counts["pessimistic"] + counts["realistic"];
    auto percent = nlohmann::json::object();
    for (const char* s : {"optimistic", "pessimistic", "realistic"})
        percent[s] = decided == 0 ? 0.0 : 100.0 * static_cast<double>(counts[s]) / static_cast<double>(decided);

    return {{"records", records.size()},
            {"decided", decided},
            {"counts", counts},
            {"percent", percent},
            {"candidate_size", stats_json(size_stats(candidate_sizes))},
            {"explanation_size", stats_json(size_stats(explanation_sizes(records)))},
            {"mean_timings", mean_timings(records)}};
}

nlohmann::json explain_summary(const nlohmann::json& records)
{
    std::map<std::string, std::size_t> counts{{"ok", 0}, {"indeterminate", 0}, {"error", 0}};
    for (const auto& r : records)
        ++counts[r.at("status").get<std::string>()];
    return {{"records", records.size()},
            {"counts", counts},
            {"explanation_size", stats_json(size_stats(explanation_sizes(records)))},
            {"mean_timings", mean_timings(records)}};
}

}  // namespace abductree::cli
