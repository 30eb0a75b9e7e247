#include "abductree/explain.hpp"

#include "abductree/hitting.hpp"
#include "abductree/semantics.hpp"

#include <algorithm>
#include <chrono>
#include <string>

namespace abductree {

std::string_view to_string(ExplanationKind kind)
{
    switch (kind) {
    case ExplanationKind::kSubsetMinimal:
        return "subset-minimal";
    case ExplanationKind::kCardinalityMinimal:
        return "cardinality-minimal";
    case ExplanationKind::kRepaired:
        return "repaired";
    case ExplanationKind::kRefined:
        return "refined";
    }
    return "?";
}

std::string_view to_string(AuditStatus status)
{
    switch (status) {
    case AuditStatus::kOptimistic:
        return "optimistic";
    case AuditStatus::kPessimistic:
        return "pessimistic";
    case AuditStatus::kRealistic:
        return "realistic";
    }
    return "?";
}

std::vector<FeatureId> scan_order(std::size_t num_features, const std::vector<FeatureId>& order)
{
    std::vector<bool> seen(num_features, false);
    std::vector<FeatureId> out;
    out.reserve(num_features);
    for (FeatureId f : order)
        if (f < num_features && !seen[f]) {
            seen[f] = true;
            out.push_back(f);
        }
    for (FeatureId f = 0; f < num_features; ++f)
        if (!seen[f])
            out.push_back(f);
    return out;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

Explainer::Explainer(const Oracle& oracle, ExplainOptions options)
    : oracle_(&oracle)
    , options_(options)
{
}

void Explainer::check_instance(const Cube& instance, ClassId pi) const
{
    const Model& model = oracle_->model();
    if (!instance.is_total(model.features))
        throw PreconditionError("explanations need a total instance");
    const ClassId predicted = predict(model, instance).pi;
    if (predicted != pi)
        throw PreconditionError("instance is predicted as " + model.ensemble.class_name(predicted) + ", not " +
                                model.ensemble.class_name(pi));
}

void Explainer::check_candidate(const Cube& instance, const Cube& candidate) const
{
    if (!candidate.subset_of(instance))
        throw PreconditionError("candidate " + format_cube(oracle_->model().features, candidate) +
                                " is not part of the instance");
}

Cube Explainer::used_part(const Cube& cube) const
{
    std::vector<Literal> kept;
    for (const Literal& l : cube)
        if (oracle_->abstraction().relevant(l.feature))
            kept.push_back(l);
    return Cube(std::move(kept));
}

Cube Explainer::deletion(Cube current, const std::vector<FeatureId>& scan, ClassId pi) const
{
    for (FeatureId f : scan) {
        const Value* v = current.find(f);
        if (v == nullptr)
            continue;
        Cube trial = current;
        trial.erase(f);
        if (oracle_->entails(trial, pi))
            current = std::move(trial);
    }
    return current;
}

Cube Explainer::implicit_hitting_set(const Cube& base, ClassId pi) const
{
    const Abstraction& abs = oracle_->abstraction();
    const Model& model = oracle_->model();
    HitProblem problem;
    problem.universe = base.features();

    while (true) {
        const auto hit = minimum_hitting_set(problem);
        Cube candidate = restrict(base, hit);
        auto cex = oracle_->find_counterexample(candidate, pi);
        if (!cex)
            return candidate;

        Cube point = cex->instance;
        std::vector<FeatureId> correction;
        for (const Literal& l : base)
            if (abs.atom_of(l.feature, *point.find(l.feature)) != abs.atom_of(l.feature, l.value))
                correction.push_back(l.feature);
        if (options_.shrink_correction_sets) {
            std::vector<FeatureId> kept;
            for (FeatureId f : correction) {
                Cube trial = point;
                trial.assign(f, *base.find(f));
                if (predict(model, trial).pi != pi)
                    point = std::move(trial);
                else
                    kept.push_back(f);
            }
            correction = std::move(kept);
        }
        if (correction.empty())
            throw InternalError("counterexample agrees with the entailing cube on every tested feature");
        if (problem.sets.size() >= options_.max_hitting_sets)
            throw IterationLimitExceeded("more than " + std::to_string(options_.max_hitting_sets) +
                                         " correction sets needed");
        problem.sets.push_back(std::move(correction));
    }
}

Explanation Explainer::subset_minimal(const Cube& instance, ClassId pi, const std::vector<FeatureId>& order) const
{
    check_instance(instance, pi);
    const auto scan = scan_order(instance.size(), order);
    return {deletion(used_part(instance), scan, pi), ExplanationKind::kSubsetMinimal, instance, pi};
}

Explanation Explainer::cardinality_minimal(const Cube& instance, ClassId pi) const
{
    check_instance(instance, pi);
    return {implicit_hitting_set(used_part(instance), pi), ExplanationKind::kCardinalityMinimal, instance, pi};
}

std::optional<Counterexample> Explainer::validate(const Cube& instance, ClassId pi, const Cube& candidate) const
{
    check_instance(instance, pi);
    check_candidate(instance, candidate);
    return oracle_->find_counterexample(candidate, pi);
}

Explanation Explainer::repair(const Cube& instance, ClassId pi, const Cube& broken,
                              const std::vector<FeatureId>& order) const
{
    check_instance(instance, pi);
    check_candidate(instance, broken);
    const auto scan = scan_order(instance.size(), order);
    std::vector<FeatureId> outside;
    std::vector<FeatureId> inside;
    for (FeatureId f : scan)
        (broken.contains(f) ? inside : outside).push_back(f);

    Cube current = deletion(used_part(instance), outside, pi);
    current = deletion(std::move(current), inside, pi);
    return {std::move(current), ExplanationKind::kRepaired, instance, pi};
}

Explanation Explainer::refine(const Cube& instance, ClassId pi, const Cube& candidate, RefineMode mode,
                              const std::vector<FeatureId>& order) const
{
    check_instance(instance, pi);
    check_candidate(instance, candidate);
    if (!oracle_->entails(candidate, pi))
        throw PreconditionError("candidate " + format_cube(oracle_->model().features, candidate) +
                                " does not entail the prediction; repair it instead");
    Cube base = used_part(candidate);
    Cube out = mode == RefineMode::kSubset ? deletion(std::move(base), scan_order(instance.size(), order), pi)
                                           : implicit_hitting_set(base, pi);
    return {std::move(out), ExplanationKind::kRefined, instance, pi};
}

Verdict Explainer::audit(const Cube& instance, ClassId pi, const Cube& candidate) const
{
    check_instance(instance, pi);
    check_candidate(instance, candidate);
    Verdict verdict;

    auto start = std::chrono::steady_clock::now();
    auto cex = oracle_->find_counterexample(candidate, pi);
    if (cex) {
        auto listed = oracle_->enumerate_counterexamples(candidate, pi, std::max<std::size_t>(1, options_.max_counterexamples));
        verdict.counterexamples = std::move(listed.items);
        verdict.counterexamples_truncated = listed.truncated;
        if (verdict.counterexamples.empty())
            verdict.counterexamples.push_back(std::move(*cex));
    }
    verdict.timings.validation = seconds_since(start);

    if (cex) {
        verdict.status = AuditStatus::kOptimistic;
        start = std::chrono::steady_clock::now();
        verdict.repaired = repair(instance, pi, candidate);
        verdict.timings.repair = seconds_since(start);
        return verdict;
    }

    start = std::chrono::steady_clock::now();
    verdict.refined = refine(instance, pi, candidate, RefineMode::kSubset);
    verdict.timings.refinement = seconds_since(start);
    verdict.status = verdict.refined->literals.size() < candidate.size() ? AuditStatus::kPessimistic
                                                                         : AuditStatus::kRealistic;
    return verdict;
}

}  // namespace abductree
