#include "abductree/explain.hpp"
#include "abductree/reference/brute_force.hpp"
#include "abductree/reference/generators.hpp"
#include "abductree/semantics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace abductree;

namespace {

// Both explanation invariants, checked by brute force.
void check_explanation(const Model& model, const Explanation& e, bool minimal)
{
    CHECK(e.literals.subset_of(e.instance));
    CHECK(reference::entails(model, e.literals, e.pi));
    if (minimal)
        CHECK(reference::is_subset_minimal(model, e.literals, e.pi));
    const auto used = model.used_features();
    for (const Literal& l : e.literals)
        CHECK(used[l.feature]);
}

// Deletion over `scan` with the exhaustive oracle.
Cube replay_deletion(const Model& model, Cube current, const std::vector<FeatureId>& scan, ClassId pi)
{
    for (FeatureId f : scan) {
        if (!current.contains(f))
            continue;
        Cube trial = current;
        trial.erase(f);
        if (reference::entails(model, trial, pi))
            current = std::move(trial);
    }
    return current;
}

Cube used_only(const Model& model, const Cube& cube)
{
    const auto used = model.used_features();
    std::vector<Literal> kept;
    for (const Literal& l : cube)
        if (used[l.feature])
            kept.push_back(l);
    return Cube(std::move(kept));
}

struct Case {
    Model model;
    Cube instance;
    ClassId pi;
};

template <class Fn>
void for_random_cases(std::uint64_t seed, int models, int per_model, Fn&& fn)
{
    reference::Rng rng(seed);
    for (int m = 0; m < models; ++m) {
        const Model model = reference::random_model(test::mixed_spec(rng), rng);
        for (int i = 0; i < per_model; ++i) {
            const Cube instance = reference::random_instance(model.features, rng);
            fn(Case{model, instance, predict(model, instance).pi}, rng);
        }
    }
}

}  // namespace

TEST_SUITE("zoo explanations")
{
    TEST_CASE("bear is a mammal because of milk")
    {
        const Model model = test::zoo_model();
        const Oracle oracle(model);
        const Explainer explainer(oracle);
        const Cube bear = test::zoo_rows(model)[test::kBear];
        const Cube milk{test::lit(model, "milk", true)};

        const Explanation s = explainer.subset_minimal(bear, test::kMammal);
        CHECK(s.literals == milk);
        CHECK(s.kind == ExplanationKind::kSubsetMinimal);
        CHECK(s.pi == test::kMammal);
        CHECK(s.instance == bear);

        const Explanation c = explainer.cardinality_minimal(bear, test::kMammal);
        CHECK(c.literals == milk);
        CHECK(c.kind == ExplanationKind::kCardinalityMinimal);
        CHECK(reference::minimum_explanation_size(model, bear, test::kMammal) == 1);
    }

    TEST_CASE("refining milk and no feathers")
    {
        const Model model = test::zoo_model();
        const Oracle oracle(model);
        const Explainer explainer(oracle);
        const Cube bear = test::zoo_rows(model)[test::kBear];
        const Cube candidate = test::pick(model, bear, {"milk", "feathers"});
        // both sub-cubes of size one, checked exhaustively
        CHECK(reference::entails(model, test::pick(model, bear, {"milk"}), test::kMammal));
        CHECK_FALSE(reference::entails(model, test::pick(model, bear, {"feathers"}), test::kMammal));
        for (RefineMode mode : {RefineMode::kSubset, RefineMode::kCardinality}) {
            const Explanation r = explainer.refine(bear, test::kMammal, candidate, mode);
            CHECK(r.literals == Cube{test::lit(model, "milk", true)});
            CHECK(r.kind == ExplanationKind::kRefined);
        }
        const Verdict v = explainer.audit(bear, test::kMammal, candidate);
        CHECK(v.status == AuditStatus::kPessimistic);
        REQUIRE(v.refined);
        CHECK(v.refined->literals.size() == 1);
    }

    TEST_CASE("pitviper and the anchor cube")
    {
        const Model model = test::zoo_model();
        const Oracle oracle(model);
        const Explainer explainer(oracle);
        const Cube pitviper = test::zoo_rows(model)[test::kPitviper];
        const Cube anchor = test::pick(model, pitviper, {"hair", "milk", "toothed", "fins"});

        const auto cex = explainer.validate(pitviper, test::kReptile, anchor);
        REQUIRE(cex);
        CHECK(cex->predicted != test::kReptile);
        CHECK(predict(model, cex->instance).pi == cex->predicted);
        CHECK(anchor.subset_of(cex->instance));

        CHECK_FALSE(explainer.validate(pitviper, test::kReptile, pitviper));

        const Cube expected{test::lit(model, "feathers", false), test::lit(model, "milk", false),
                            test::lit(model, "backbone", true),  test::lit(model, "fins", false),
                            test::lit(model, "legs", Category{0}), test::lit(model, "tail", true)};
        REQUIRE(model.features[test::feature(model, "legs")].values[0] == "0");
        const Explanation r = explainer.repair(pitviper, test::kReptile, anchor);
        CHECK(r.literals == expected);
        CHECK(r.kind == ExplanationKind::kRepaired);
        check_explanation(model, r, true);

        const Verdict v = explainer.audit(pitviper, test::kReptile, anchor);
        CHECK(v.status == AuditStatus::kOptimistic);
        CHECK(v.counterexamples.size() >= 1);
        CHECK(v.counterexamples.size() <= 5);
        REQUIRE(v.repaired);
        CHECK(v.repaired->literals == expected);
        CHECK_FALSE(v.refined);
    }

    TEST_CASE("every row explains realistically against itself")
    {
        const Model model = test::zoo_model();
        const Oracle oracle(model);
        const Explainer explainer(oracle);
        for (const Cube& row : test::zoo_rows(model)) {
            const ClassId pi = predict(model, row).pi;
            const Explanation e = explainer.subset_minimal(row, pi);
            check_explanation(model, e, true);
            const Verdict v = explainer.audit(row, pi, e.literals);
            CHECK(v.status == AuditStatus::kRealistic);
            REQUIRE(v.refined);
            CHECK(v.refined->literals == e.literals);
            CHECK(v.counterexamples.empty());
        }
    }

    TEST_CASE("contract violations")
    {
        const Model model = test::zoo_model();
        const Oracle oracle(model);
        const Explainer explainer(oracle);
        const auto rows = test::zoo_rows(model);
        const Cube& pitviper = rows[test::kPitviper];
        const Cube anchor = test::pick(model, pitviper, {"hair", "milk", "toothed", "fins"});

        CHECK_THROWS_AS(explainer.subset_minimal(pitviper, test::kMammal), PreconditionError);
        CHECK_THROWS_AS(explainer.subset_minimal(anchor, test::kReptile), PreconditionError);
        CHECK_THROWS_AS(explainer.refine(pitviper, test::kReptile, anchor, RefineMode::kSubset), PreconditionError);
        // a literal the instance does not have
        const Cube foreign{test::lit(model, "milk", true)};
        CHECK_THROWS_AS(explainer.validate(pitviper, test::kReptile, foreign), PreconditionError);
        CHECK_THROWS_AS(explainer.audit(pitviper, test::kReptile, foreign), PreconditionError);
    }
}

TEST_SUITE("degenerate models")
{
    TEST_CASE("one class is explained by nothing")
    {
        reference::Rng rng(1);
        reference::RandomModelSpec spec;
        spec.num_classes = 1;
        const Model model = reference::random_model(spec, rng);
        const Oracle oracle(model);
        const Explainer explainer(oracle);
        const Cube instance = reference::random_instance(model.features, rng);
        CHECK(explainer.subset_minimal(instance, 0).literals.empty());
        CHECK(explainer.cardinality_minimal(instance, 0).literals.empty());
        CHECK(explainer.audit(instance, 0, Cube{}).status == AuditStatus::kRealistic);
        CHECK(explainer.audit(instance, 0, instance).status ==
              (instance.empty() ? AuditStatus::kRealistic : AuditStatus::kPessimistic));
    }

    TEST_CASE("correction set cap")
    {
        const Model model = test::zoo_model();
        const Oracle oracle(model);
        ExplainOptions options;
        options.max_hitting_sets = 0;
        const Explainer explainer(oracle, options);
        const Cube bear = test::zoo_rows(model)[test::kBear];
        CHECK_THROWS_AS(explainer.cardinality_minimal(bear, test::kMammal), IterationLimitExceeded);
        CHECK_THROWS_AS(explainer.cardinality_minimal(bear, test::kMammal), ResourceLimitExceeded);
    }

    TEST_CASE("oracle budget propagates")
    {
        const Model model = test::zoo_model();
        OracleConfig tight;
        tight.node_budget = 1;
        const Oracle oracle(model, tight);
        const Explainer explainer(oracle);
        const Cube bear = test::zoo_rows(model)[test::kBear];
        CHECK_THROWS_AS(explainer.subset_minimal(bear, test::kMammal), ResourceLimitExceeded);
    }
}

TEST_SUITE("explanations against brute force")
{
    TEST_CASE("scan order")
    {
        CHECK(scan_order(4, {}) == std::vector<FeatureId>{0, 1, 2, 3});
        CHECK(scan_order(4, {2, 2, 9, 0}) == std::vector<FeatureId>{2, 0, 1, 3});
    }

    TEST_CASE("subset-minimal in any order")
    {
        for_random_cases(11, 60, 5, [](const Case& c, reference::Rng& rng) {
            const Oracle oracle(c.model);
            const Explainer explainer(oracle);
            std::vector<FeatureId> order(c.model.features.size());
            std::iota(order.begin(), order.end(), 0);
            const std::size_t minimum = reference::minimum_explanation_size(c.model, c.instance, c.pi);
            for (int k = 0; k < 3; ++k) {
                std::shuffle(order.begin(), order.end(), rng);
                const Explanation e = explainer.subset_minimal(c.instance, c.pi, k == 0 ? std::vector<FeatureId>{} : order);
                check_explanation(c.model, e, true);
                CHECK(e.literals.size() >= minimum);
            }
        });
    }

    TEST_CASE("cardinality-minimal equals the exhaustive minimum")
    {
        for_random_cases(12, 60, 5, [](const Case& c, reference::Rng& rng) {
            const Oracle oracle(c.model);
            const Explainer explainer(oracle);
            ExplainOptions shrink;
            shrink.shrink_correction_sets = true;
            const Explainer shrinking(oracle, shrink);
            const Explanation e = explainer.cardinality_minimal(c.instance, c.pi);
            check_explanation(c.model, e, true);
            const std::size_t minimum = reference::minimum_explanation_size(c.model, c.instance, c.pi);
            CHECK(e.literals.size() == minimum);
            CHECK(shrinking.cardinality_minimal(c.instance, c.pi).literals.size() == minimum);

            std::vector<FeatureId> order(c.model.features.size());
            std::iota(order.begin(), order.end(), 0);
            std::shuffle(order.begin(), order.end(), rng);
            CHECK(e.literals.size() <= explainer.subset_minimal(c.instance, c.pi, order).literals.size());
        });
    }

    TEST_CASE("repair replays two-phase deletion")
    {
        for_random_cases(13, 60, 5, [](const Case& c, reference::Rng& rng) {
            const Oracle oracle(c.model);
            const Explainer explainer(oracle);
            const Cube broken = reference::random_subcube(c.instance, 0.4, rng);
            const Explanation r = explainer.repair(c.instance, c.pi, broken);
            check_explanation(c.model, r, true);
            CHECK(r.literals.subset_of(c.instance));

            std::vector<FeatureId> outside;
            std::vector<FeatureId> inside;
            for (FeatureId f = 0; f < c.model.features.size(); ++f)
                (broken.contains(f) ? inside : outside).push_back(f);
            Cube expected = replay_deletion(c.model, used_only(c.model, c.instance), outside, c.pi);
            expected = replay_deletion(c.model, expected, inside, c.pi);
            CHECK(r.literals == expected);

            // an empty broken cube reduces to the plain deletion scan
            CHECK(explainer.repair(c.instance, c.pi, Cube{}).literals ==
                  explainer.subset_minimal(c.instance, c.pi).literals);
            if (reference::entails(c.model, broken, c.pi)) {
                std::vector<FeatureId> two_phase = outside;
                two_phase.insert(two_phase.end(), inside.begin(), inside.end());
                CHECK(r.literals == explainer.subset_minimal(c.instance, c.pi, two_phase).literals);
            }
        });
    }

    TEST_CASE("refine stays inside the candidate")
    {
        for_random_cases(14, 60, 5, [](const Case& c, reference::Rng& rng) {
            const Oracle oracle(c.model);
            const Explainer explainer(oracle);
            Cube candidate = reference::random_subcube(c.instance, 0.7, rng);
            if (!reference::entails(c.model, candidate, c.pi)) {
                CHECK_THROWS_AS(explainer.refine(c.instance, c.pi, candidate, RefineMode::kSubset), PreconditionError);
                candidate = c.instance;
            }
            for (RefineMode mode : {RefineMode::kSubset, RefineMode::kCardinality}) {
                const Explanation r = explainer.refine(c.instance, c.pi, candidate, mode);
                check_explanation(c.model, r, true);
                CHECK(r.literals.subset_of(candidate));
                CHECK(r.literals.size() <= candidate.size());
            }
            // idempotent on its own output
            const Explanation s = explainer.subset_minimal(c.instance, c.pi);
            CHECK(explainer.refine(c.instance, c.pi, s.literals, RefineMode::kSubset).literals == s.literals);
        });
    }

    TEST_CASE("audit status matches the exhaustive classification")
    {
        std::size_t seen[3] = {0, 0, 0};
        for_random_cases(15, 80, 6, [&](const Case& c, reference::Rng& rng) {
            const Oracle oracle(c.model);
            const Explainer explainer(oracle);
            const Cube candidate = reference::random_subcube(c.instance, 0.5, rng);
            const Verdict v = explainer.audit(c.instance, c.pi, candidate);
            const auto expected = reference::classify(c.model, candidate, c.pi);
            switch (expected) {
            case reference::Status::kOptimistic:
                CHECK(v.status == AuditStatus::kOptimistic);
                CHECK_FALSE(v.counterexamples.empty());
                for (const auto& cex : v.counterexamples) {
                    CHECK(candidate.subset_of(cex.instance));
                    CHECK(predict(c.model, cex.instance).pi == cex.predicted);
                    CHECK(cex.predicted != c.pi);
                }
                REQUIRE(v.repaired);
                check_explanation(c.model, *v.repaired, true);
                ++seen[0];
                break;
            case reference::Status::kPessimistic:
                CHECK(v.status == AuditStatus::kPessimistic);
                REQUIRE(v.refined);
                CHECK(v.refined->literals.size() < candidate.size());
                check_explanation(c.model, *v.refined, true);
                ++seen[1];
                break;
            case reference::Status::kRealistic:
                CHECK(v.status == AuditStatus::kRealistic);
                REQUIRE(v.refined);
                CHECK(v.refined->literals == candidate);
                ++seen[2];
                break;
            }
        });
        // the sample reaches all three outcomes
        CHECK(seen[0] > 0);
        CHECK(seen[1] > 0);
        CHECK(seen[2] > 0);
    }

    TEST_CASE("audit of a subset-minimal explanation is realistic")
    {
        for_random_cases(16, 40, 5, [](const Case& c, reference::Rng&) {
            const Oracle oracle(c.model);
            const Explainer explainer(oracle);
            const Explanation e = explainer.subset_minimal(c.instance, c.pi);
            CHECK(explainer.audit(c.instance, c.pi, e.literals).status == AuditStatus::kRealistic);
        });
    }
}
