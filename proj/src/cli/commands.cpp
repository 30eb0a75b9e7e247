#include "abductree/cli.hpp"

#include "abductree/model_io.hpp"
#include "abductree/reference/brute_force.hpp"
#include "abductree/reference/generators.hpp"
#include "abductree/semantics.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

namespace abductree::cli {

namespace {

using nlohmann::json;

struct Workspace {
    Model model;
    std::vector<Cube> instances;
};

Workspace load(const Options& o)
{
    if (o.model_path.empty() || o.fmap_path.empty())
        throw std::invalid_argument("--model and --fmap are required");
    Workspace ws{parse_model(read_file(o.model_path), read_file(o.fmap_path)), {}};
    if (!o.instances_path.empty())
        ws.instances = parse_instances(read_file(o.instances_path), ws.model.features);
    return ws;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json explanation_json(const FeatureSpace& fs, const Explanation& e)
{
    return {{"kind", to_string(e.kind)}, {"literals", cube_json(fs, e.literals)}, {"size", e.literals.size()}};
}

json scores_json(const std::vector<Rational>& scores)
{
    auto out = json::array();
    for (const Rational& s : scores)
        out.push_back(to_decimal_string(s));
    return out;
}

json counterexample_json(const Model& model, const Counterexample& c)
{
    return {{"instance", cube_json(model.features, c.instance)},
            {"predicted", model.ensemble.class_name(c.predicted)},
            {"scores", scores_json(c.scores)}};
}

/// Fills `record` via `body`; budget and verification failures become
/// statuses instead of aborting the batch.
json guarded(json record, const std::function<void(json&)>& body)
{
    try {
        body(record);
    } catch (const ResourceLimitExceeded& e) {
        record["status"] = "indeterminate";
        record["message"] = e.what();
    } catch (const InternalError& e) {
        record["status"] = "error";
        record["internal"] = true;
        record["message"] = e.what();
    } catch (const std::exception& e) {
        record["status"] = "error";
        record["message"] = e.what();
    }
    return record;
}

/// Runs `task(i)` for i < n on a worker pool; results keep index order.
json run_parallel(std::size_t n, std::size_t workers, const std::function<json(std::size_t)>& task)
{
    std::vector<json> results(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++)
            results[i] = task(i);
    };
    if (workers == 0)
        workers = std::max(1U, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(n, 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    auto out = json::array();
    for (auto& r : results)
        out.push_back(std::move(r));
    return out;
}

/// Re-derives the explanation's guarantees with a fresh oracle.
void verify_explanation(const Model& model, const OracleConfig& config, const Explanation& e)
{
    const Oracle fresh(model, config);
    if (!e.literals.subset_of(e.instance))
        throw InternalError("explanation is not part of its instance");
    if (!fresh.entails(e.literals, e.pi))
        throw InternalError("explanation does not entail its class");
    for (const Literal& l : e.literals) {
        Cube smaller = e.literals;
        smaller.erase(l.feature);
        if (fresh.entails(smaller, e.pi))
            throw InternalError("literal " + format_literal(model.features, l) + " is redundant");
    }
}

std::size_t symmetric_difference(const Cube& a, const Cube& b)
{
    std::size_t n = 0;
    for (const Literal& l : a)
        n += b.contains(l.feature) ? 0 : 1;
    for (const Literal& l : b)
        n += a.contains(l.feature) ? 0 : 1;
    return n;
}

json report_header(const Options& o, const Model& model)
{
    return {{"command", o.command},
            {"model",
             {{"classes", model.ensemble.num_classes},
              {"trees_per_class", model.ensemble.trees_per_class},
              {"features", model.features.size()}}},
            {"options",
             {{"mode", o.mode},
              {"seed_order", o.seed_order},
              {"node_budget", o.node_budget},
              {"time_budget", o.time_budget},
              {"max_cex", o.max_cex}}}};
}

void write_table(const std::string& path, const json& records)
{
    std::ofstream os(path);
    if (!os)
        throw std::invalid_argument("cannot write " + path);
    os << "id,pi,status,candidate_size,explanation_size,validation_s,repair_s,refinement_s,explain_s\n";
    for (const auto& r : records) {
        auto field = [&](const char* key) -> std::string {
            auto it = r.find(key);
            return it == r.end() ? "" : it->is_string() ? it->get<std::string>() : it->dump();
        };
        auto size_of = [&](const char* key) -> std::string {
            auto it = r.find(key);
            if (it == r.end())
                return "";
            return std::to_string(it->is_array() ? it->size() : it->at("size").get<std::size_t>());
        };
        auto timing = [&](const char* key) -> std::string {
            auto it = r.find("timings");
            if (it == r.end() || !it->contains(key))
                return "";
            return it->at(key).dump();
        };
        os << field("id") << ',' << field("pi") << ',' << field("status") << ',' << size_of("candidate") << ','
           << size_of("explanation") << ',' << timing("validation") << ',' << timing("repair") << ','
           << timing("refinement") << ',' << timing("explain") << '\n';
    }
}

int exit_code_for(const json& records)
{
    int code = kOk;
    for (const auto& r : records) {
        if (r.value("internal", false))
            return kInternalFailure;
        if (r.at("status") == "indeterminate")
            code = kIndeterminate;
    }
    return code;
}

OracleConfig oracle_config(const Options& o)
{
    OracleConfig c;
    c.node_budget = o.node_budget;
    c.time_budget_seconds = o.time_budget;
    return c;
}

ExplainOptions explain_options(const Options& o)
{
    ExplainOptions e;
    e.max_counterexamples = o.max_cex;
    e.shrink_correction_sets = o.shrink;
    return e;
}

RefineMode refine_mode(const std::string& mode)
{
    if (mode == "subset")
        return RefineMode::kSubset;
    if (mode == "cardinality")
        return RefineMode::kCardinality;
    throw std::invalid_argument("--mode must be 'subset' or 'cardinality'");
}

json cmd_explain(const Options& o, const Workspace& ws, const Explainer& explainer)
{
    const Model& model = ws.model;
    const RefineMode mode = refine_mode(o.mode);
    const auto order = parse_seed_order(o.seed_order, model.features.size());

    // identical rows are explained once
    std::vector<std::vector<std::size_t>> groups;
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < ws.instances.size(); ++i) {
        const auto key = format_cube(model.features, ws.instances[i]);
        auto [it, fresh] = seen.emplace(key, groups.size());
        if (fresh)
            groups.emplace_back();
        groups[it->second].push_back(i);
    }

    return run_parallel(groups.size(), o.workers, [&](std::size_t g) {
        const Cube& instance = ws.instances[groups[g].front()];
        const ClassId pi = predict(model, instance).pi;
        json base = {{"id", groups[g].front()},
                     {"rows", groups[g]},
                     {"pi", model.ensemble.class_name(pi)},
                     {"instance", cube_json(model.features, instance)}};
        return guarded(std::move(base), [&](json& r) {
            const auto start = std::chrono::steady_clock::now();
            const Explanation e = mode == RefineMode::kSubset ? explainer.subset_minimal(instance, pi, order)
                                                              : explainer.cardinality_minimal(instance, pi);
            const double elapsed = seconds_since(start);
            if (o.verify)
                verify_explanation(model, oracle_config(o), e);
            r["status"] = "ok";
            r["explanation"] = explanation_json(model.features, e);
            if (o.timings)
                r["timings"] = {{"explain", elapsed}};
        });
    });
}

struct Job {
    std::size_t id;
    Cube instance;
    Cube candidate;
    ClassId pi;
};

std::vector<Job> candidate_jobs(const Options& o, const Workspace& ws)
{
    if (o.candidates_path.empty())
        throw std::invalid_argument("--candidates is required for " + o.command);
    std::vector<Job> jobs;
    for (const auto& line : parse_candidates(read_file(o.candidates_path), ws.model.features)) {
        if (line.id >= ws.instances.size())
            throw ParseError("candidate id " + std::to_string(line.id) + " has no instance row (" +
                             std::to_string(ws.instances.size()) + " rows)");
        const Cube& instance = ws.instances[line.id];
        jobs.push_back({line.id, instance, restrict(instance, line.features), predict(ws.model, instance).pi});
    }
    return jobs;
}

json job_base(const Model& model, const Job& job)
{
    return {{"id", job.id},
            {"pi", model.ensemble.class_name(job.pi)},
            {"candidate", cube_json(model.features, job.candidate)}};
}

json cmd_candidates(const Options& o, const Workspace& ws, const Explainer& explainer)
{
    const Model& model = ws.model;
    const auto jobs = candidate_jobs(o, ws);
    const auto order = parse_seed_order(o.seed_order, model.features.size());
    const RefineMode mode = refine_mode(o.mode);

    return run_parallel(jobs.size(), o.workers, [&](std::size_t i) {
        const Job& job = jobs[i];
        return guarded(job_base(model, job), [&](json& r) {
            auto start = std::chrono::steady_clock::now();
            if (o.command == "validate") {
                const auto cex = explainer.validate(job.instance, job.pi, job.candidate);
                r["status"] = cex ? "invalid" : "valid";
                if (cex)
                    r["counterexample"] = counterexample_json(model, *cex);
                if (o.timings)
                    r["timings"] = {{"validation", seconds_since(start)}};
            } else if (o.command == "repair") {
                const Explanation e = explainer.repair(job.instance, job.pi, job.candidate, order);
                const double elapsed = seconds_since(start);
                if (o.verify)
                    verify_explanation(model, oracle_config(o), e);
                r["status"] = "repaired";
                r["explanation"] = explanation_json(model.features, e);
                r["symmetric_difference"] = symmetric_difference(job.candidate, e.literals);
                if (o.timings)
                    r["timings"] = {{"repair", elapsed}};
            } else if (o.command == "refine") {
                if (!explainer.oracle().entails(job.candidate, job.pi)) {
                    r["status"] = "not-entailing";
                    r["message"] = "candidate does not entail the prediction; use repair";
                    return;
                }
                const Explanation e = explainer.refine(job.instance, job.pi, job.candidate, mode, order);
                const double elapsed = seconds_since(start);
                if (o.verify)
                    verify_explanation(model, oracle_config(o), e);
                r["status"] = "refined";
                r["explanation"] = explanation_json(model.features, e);
                if (o.timings)
                    r["timings"] = {{"refinement", elapsed}};
            } else {
                const Verdict v = explainer.audit(job.instance, job.pi, job.candidate);
                r["status"] = to_string(v.status);
                if (!v.counterexamples.empty()) {
                    auto list = json::array();
                    for (const auto& c : v.counterexamples)
                        list.push_back(counterexample_json(model, c));
                    r["counterexamples"] = std::move(list);
                    r["counterexamples_truncated"] = v.counterexamples_truncated;
                }
                const std::optional<Explanation>& e = v.repaired ? v.repaired : v.refined;
                if (e) {
                    if (o.verify)
                        verify_explanation(model, oracle_config(o), *e);
                    r["explanation"] = explanation_json(model.features, *e);
                    if (v.repaired)
                        r["symmetric_difference"] = symmetric_difference(job.candidate, e->literals);
                }
                if (o.timings) {
                    json t = {{"validation", v.timings.validation}};
                    if (v.repaired)
                        t["repair"] = v.timings.repair;
                    else
                        t["refinement"] = v.timings.refinement;
                    r["timings"] = std::move(t);
                }
            }
        });
    });
}

json status_summary(const json& records)
{
    std::map<std::string, std::size_t> counts;
    for (const auto& r : records)
        ++counts[r.at("status").get<std::string>()];
    return {{"records", records.size()}, {"counts", counts}};
}

ClassId resolve_class(const Model& model, const std::string& name)
{
    for (ClassId c = 0; c < model.ensemble.num_classes; ++c)
        if (model.ensemble.class_name(c) == name)
            return c;
    try {
        std::size_t pos = 0;
        const auto c = std::stoul(name, &pos);
        if (pos == name.size() && c < model.ensemble.num_classes)
            return c;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("unknown class '" + name + "'");
}

int cmd_export_smt(const Options& o, const Workspace& ws, std::ostream& out)
{
    if (!o.instance_id)
        throw std::invalid_argument("export-smt needs --instance-id");
    if (*o.instance_id >= ws.instances.size())
        throw std::invalid_argument("--instance-id out of range");
    const Cube& instance = ws.instances[*o.instance_id];
    Query q;
    q.fixed = instance;
    if (!o.candidates_path.empty()) {
        bool found = false;
        for (const auto& line : parse_candidates(read_file(o.candidates_path), ws.model.features))
            if (line.id == *o.instance_id) {
                q.fixed = restrict(instance, line.features);
                found = true;
            }
        if (!found)
            throw std::invalid_argument("no candidate for instance " + std::to_string(*o.instance_id));
    }
    q.target = o.target_class.empty() ? predict(ws.model, instance).pi : resolve_class(ws.model, o.target_class);
    const std::string doc = export_smtlib(ws.model, q);
    if (o.out_path.empty()) {
        out << doc;
    } else {
        std::ofstream os(o.out_path);
        if (!os)
            throw std::invalid_argument("cannot write " + o.out_path);
        os << doc;
    }
    return kOk;
}

// Cross-checks the oracle and the explainer against brute force on random
// small models.
int cmd_selftest(const Options& o, std::ostream& out)
{
    reference::Rng rng(o.selftest_seed);
    std::size_t queries = 0;
    std::size_t mismatches = 0;
    std::size_t explanations = 0;
    while (queries < o.selftest_queries) {
        reference::RandomModelSpec spec;
        spec.num_features = 2 + rng() % 7;
        spec.num_classes = 1 + rng() % 3;
        spec.trees_per_class = 1 + rng() % 3;
        spec.max_depth = 1 + rng() % 3;
        spec.categorical_share = 0.2;
        spec.continuous_share = 0.2;
        const Model model = reference::random_model(spec, rng);
        const Oracle oracle(model, oracle_config(o));
        const Explainer explainer(oracle);
        for (int k = 0; k < 20 && queries < o.selftest_queries; ++k, ++queries) {
            const Cube instance = reference::random_instance(model.features, rng);
            const Cube fixed = reference::random_subcube(instance, 0.4, rng);
            const ClassId pi = rng() % model.ensemble.num_classes;
            if (oracle.entails(fixed, pi) != reference::entails(model, fixed, pi))
                ++mismatches;
            if (k % 5 == 0) {
                const ClassId own = predict(model, instance).pi;
                const Explanation e = explainer.subset_minimal(instance, own);
                ++explanations;
                if (!reference::is_subset_minimal(model, e.literals, own))
                    ++mismatches;
            }
        }
    }
    out << "selftest: " << queries << " entailment queries, " << explanations << " explanations, " << mismatches
        << " mismatches\n";
    return mismatches == 0 ? kOk : kInternalFailure;
}

void emit(const Options& o, const json& report, std::ostream& out)
{
    if (o.out_path.empty()) {
        out << report.dump(2) << '\n';
        return;
    }
    std::ofstream os(o.out_path);
    if (!os)
        throw std::invalid_argument("cannot write " + o.out_path);
    os << report.dump(2) << '\n';
}

}  // namespace

int run(const Options& o, std::ostream& out, std::ostream& err)
{
    try {
        if (o.command == "selftest")
            return cmd_selftest(o, out);

        const Workspace ws = load(o);
        if (o.command == "export-smt")
            return cmd_export_smt(o, ws, out);

        const Oracle oracle(ws.model, oracle_config(o));
        const Explainer explainer(oracle, explain_options(o));
        json report = report_header(o, ws.model);
        json records;
        if (o.command == "explain") {
            records = cmd_explain(o, ws, explainer);
            report["summary"] = explain_summary(records);
        } else if (o.command == "validate" || o.command == "repair" || o.command == "refine" ||
                   o.command == "audit") {
            records = cmd_candidates(o, ws, explainer);
            report["summary"] = o.command == "audit" ? audit_summary(records) : status_summary(records);
        } else {
            err << "error: unknown command '" << o.command << "'\n";
            return kUsageError;
        }
        report["records"] = records;
        emit(o, report, out);
        if (!o.table_path.empty())
            write_table(o.table_path, records);

        const int code = exit_code_for(records);
        for (const auto& r : records)
            if (r.at("status") == "error")
                err << "record " << r.at("id") << ": " << r.value("message", std::string{}) << '\n';
        return code;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalFailure;
    } catch (const ResourceLimitExceeded& e) {
        err << "indeterminate: " << e.what() << '\n';
        return kIndeterminate;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
}

}  // namespace abductree::cli
