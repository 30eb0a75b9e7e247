#include "abductree/cli.hpp"
#include "abductree/model_io.hpp"
#include "abductree/reference/brute_force.hpp"
#include "abductree/reference/generators.hpp"
#include "abductree/semantics.hpp"

#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <map>
#include <sstream>

using namespace abductree;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
    json report() const { return json::parse(out); }
};

Result run(cli::Options o)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(o, out, err);
    return {code, out.str(), err.str()};
}

cli::Options zoo(const std::string& command)
{
    cli::Options o;
    o.command = command;
    o.model_path = test::fixture("zoo/zoo.model.json");
    o.fmap_path = test::fixture("zoo/zoo.fmap");
    o.instances_path = test::fixture("zoo/zoo.csv");
    o.timings = false;
    o.workers = 1;
    return o;
}

// A random model with its rows written next to it.
struct Bundle {
    test::TempDir dir;
    Model model;
    std::vector<Cube> rows;
    cli::Options options(const std::string& command) const
    {
        cli::Options o;
        o.command = command;
        o.model_path = dir.path("model.json");
        o.fmap_path = dir.path("model.fmap");
        o.instances_path = dir.path("rows.csv");
        o.timings = false;
        return o;
    }
};

void make_bundle(Bundle& b, std::uint64_t seed, std::size_t rows)
{
    reference::Rng rng(seed);
    reference::RandomModelSpec spec;
    spec.num_features = 7;
    spec.num_classes = 3;
    spec.trees_per_class = 3;
    spec.max_depth = 3;
    spec.categorical_share = 0.3;
    spec.continuous_share = 0.3;
    b.model = reference::random_model(spec, rng);
    for (std::size_t i = 0; i < rows; ++i)
        b.rows.push_back(reference::random_instance(b.model.features, rng));
    b.dir.write("model.json", write_model_json(b.model));
    b.dir.write("model.fmap", write_feature_map(b.model.features));
    b.dir.write("rows.csv", write_instances(b.model.features, b.rows));
}

// Rebuilds a cube from its "name=value" strings.
Cube cube_from(const Model& model, const json& strings)
{
    std::vector<Literal> lits;
    for (const auto& s : strings) {
        const auto text = s.get<std::string>();
        const auto eq = text.find('=');
        const FeatureId f = test::feature(model, text.substr(0, eq));
        const std::string v = text.substr(eq + 1);
        const FeatureDecl& d = model.features[f];
        switch (d.kind) {
        case FeatureKind::kBoolean:
            lits.push_back({f, v == "1"});
            break;
        case FeatureKind::kCategorical:
            lits.push_back({f, Category{*model.features.value_index(f, v)}});
            break;
        case FeatureKind::kContinuous:
            lits.push_back({f, parse_decimal(v)});
            break;
        }
    }
    return Cube(std::move(lits));
}

std::string candidate_line(const Model& model, std::size_t id, const Cube& cube)
{
    std::string line = std::to_string(id) + ":";
    for (std::size_t i = 0; i < cube.size(); ++i)
        line += (i ? "," : " ") + model.features[cube.literals()[i].feature].name;
    return line + "\n";
}

}  // namespace

TEST_SUITE("explain command")
{
    TEST_CASE("zoo subset mode")
    {
        cli::Options o = zoo("explain");
        o.verify = true;
        const Result r = run(o);
        REQUIRE(r.code == cli::kOk);
        const json report = r.report();
        CHECK(report["command"] == "explain");
        CHECK(report["model"]["classes"] == 7);
        const json& records = report["records"];
        REQUIRE(records.size() == 10);
        const json& bear = records[test::kBear];
        CHECK(bear["pi"] == "mammal");
        CHECK(bear["status"] == "ok");
        CHECK(bear["explanation"]["literals"] == json::array({"milk=1"}));
        CHECK(bear["explanation"]["kind"] == "subset-minimal");
        CHECK(report["summary"]["counts"]["ok"] == 10);
    }

    TEST_CASE("cardinality mode agrees on bear")
    {
        cli::Options o = zoo("explain");
        o.mode = "cardinality";
        o.verify = true;
        const json report = run(o).report();
        REQUIRE(report["records"].size() == 10);
        CHECK(report["records"][test::kBear]["explanation"]["literals"] == json::array({"milk=1"}));
        CHECK(report["records"][test::kBear]["explanation"]["kind"] == "cardinality-minimal");
    }

    TEST_CASE("no rows")
    {
        test::TempDir dir;
        cli::Options o = zoo("explain");
        o.instances_path = dir.write("empty.csv", "animal_name,hair,feathers,eggs,milk,airborne,aquatic,predator,"
                                                  "toothed,backbone,breathes,venomous,fins,legs,tail,domestic,catsize\n");
        const Result r = run(o);
        CHECK(r.code == cli::kOk);
        CHECK(r.report()["records"].empty());
        CHECK(r.report()["summary"]["records"] == 0);
    }

    TEST_CASE("duplicate rows are explained once")
    {
        test::TempDir dir;
        const std::string csv = read_file(test::fixture("zoo/zoo.csv"));
        const std::string header = csv.substr(0, csv.find('\n') + 1);
        const std::string bear = "bear,1,0,0,1,0,0,1,1,1,1,1,0,4,0,0,0,mammal\n";
        cli::Options o = zoo("explain");
        o.instances_path = dir.write("dups.csv", header + bear + bear + bear);
        const json records = run(o).report()["records"];
        REQUIRE(records.size() == 1);
        CHECK(records[0]["rows"] == json::array({0, 1, 2}));
    }

    TEST_CASE("random batch records pass the invariants")
    {
        Bundle b;
        make_bundle(b, 77, 100);
        cli::Options o = b.options("explain");
        o.verify = true;
        o.workers = 3;
        const Result r = run(o);
        REQUIRE(r.code == cli::kOk);
        std::size_t covered = 0;
        const json report = r.report();
        for (const json& rec : report["records"]) {
            REQUIRE(rec["status"] == "ok");
            const Cube instance = cube_from(b.model, rec["instance"]);
            const Cube e = cube_from(b.model, rec["explanation"]["literals"]);
            const ClassId pi = predict(b.model, instance).pi;
            CHECK(rec["pi"] == b.model.ensemble.class_name(pi));
            CHECK(e.subset_of(instance));
            CHECK(reference::is_subset_minimal(b.model, e, pi));
            covered += rec["rows"].size();
        }
        CHECK(covered == 100);
    }
}

TEST_SUITE("candidate commands")
{
    TEST_CASE("zoo audit")
    {
        cli::Options o = zoo("audit");
        o.candidates_path = test::fixture("zoo/anchor.candidates");
        o.verify = true;
        const Result r = run(o);
        REQUIRE(r.code == cli::kOk);
        const json report = r.report();
        const json& rec = report["records"][0];
        CHECK(rec["status"] == "optimistic");
        CHECK(rec["pi"] == "reptile");
        CHECK(rec["candidate"] == json::array({"hair=0", "milk=0", "toothed=0", "fins=0"}));
        CHECK(rec["explanation"]["literals"] ==
              json::array({"feathers=0", "milk=0", "backbone=1", "fins=0", "legs=0", "tail=1"}));
        CHECK(rec["explanation"]["kind"] == "repaired");
        CHECK(rec["symmetric_difference"] == 6);
        CHECK(rec["counterexamples"].size() >= 1);
        for (const json& cex : rec["counterexamples"])
            CHECK(cex["predicted"] != "reptile");
        CHECK(report["summary"]["counts"]["optimistic"] == 1);
        CHECK(report["summary"]["percent"]["optimistic"] == 100.0);
    }

    TEST_CASE("validate, repair and refine")
    {
        test::TempDir dir;
        const std::string candidates = dir.write("c.txt", "0: hair,milk,toothed,fins\n1: milk,feathers\n");
        auto with = [&](const std::string& command) {
            cli::Options o = zoo(command);
            o.candidates_path = candidates;
            return run(o);
        };

        const json validate = with("validate").report();
        CHECK(validate["records"][0]["status"] == "invalid");
        CHECK(validate["records"][0].contains("counterexample"));
        CHECK(validate["records"][1]["status"] == "valid");
        CHECK(validate["summary"]["counts"]["valid"] == 1);

        const json repair = with("repair").report();
        CHECK(repair["records"][0]["status"] == "repaired");
        CHECK(repair["records"][0]["explanation"]["size"] == 6);

        const Result refine = with("refine");
        CHECK(refine.code == cli::kOk);
        CHECK(refine.report()["records"][0]["status"] == "not-entailing");
        CHECK(refine.report()["records"][1]["status"] == "refined");
        CHECK(refine.report()["records"][1]["explanation"]["literals"] == json::array({"milk=1"}));
    }

    TEST_CASE("own explanations audit as realistic")
    {
        Bundle b;
        make_bundle(b, 91, 60);
        const json explained = run(b.options("explain")).report();
        std::string candidates;
        for (const json& rec : explained["records"])
            candidates += candidate_line(b.model, rec["id"].get<std::size_t>(),
                                         cube_from(b.model, rec["explanation"]["literals"]));
        cli::Options o = b.options("audit");
        o.candidates_path = b.dir.write("own.candidates", candidates);
        const json report = run(o).report();
        CHECK(report["summary"]["counts"]["realistic"] == explained["records"].size());
        CHECK(report["summary"]["percent"]["realistic"] == 100.0);
    }

    TEST_CASE("summary counts match the exhaustive classification")
    {
        Bundle b;
        make_bundle(b, 123, 200);
        reference::Rng rng(5);
        std::string candidates;
        std::map<std::string, std::size_t> expected{{"optimistic", 0}, {"pessimistic", 0}, {"realistic", 0}};
        for (std::size_t i = 0; i < b.rows.size(); ++i) {
            const Cube c = reference::random_subcube(b.rows[i], 0.5, rng);
            candidates += candidate_line(b.model, i, c);
            switch (reference::classify(b.model, c, predict(b.model, b.rows[i]).pi)) {
            case reference::Status::kOptimistic:
                ++expected["optimistic"];
                break;
            case reference::Status::kPessimistic:
                ++expected["pessimistic"];
                break;
            case reference::Status::kRealistic:
                ++expected["realistic"];
                break;
            }
        }
        cli::Options o = b.options("audit");
        o.candidates_path = b.dir.write("random.candidates", candidates);
        o.workers = 2;
        const json report = run(o).report();
        const json& counts = report["summary"]["counts"];
        for (const auto& [status, n] : expected)
            CHECK(counts[status] == n);
        CHECK(report["summary"]["decided"] == 200);
        double total = 0;
        for (const auto& [status, p] : report["summary"]["percent"].items())
            total += p.get<double>();
        CHECK(total == doctest::Approx(100.0));
    }
}

TEST_SUITE("reports")
{
    TEST_CASE("byte-identical without timings, whatever the worker count")
    {
        Bundle b;
        make_bundle(b, 31, 80);
        std::string c;
        for (std::size_t i = 0; i < b.rows.size(); i += 2)
            c += candidate_line(b.model, i, restrict(b.rows[i], std::vector<FeatureId>{0, 2, 4}));
        const std::string candidates = b.dir.write("det.candidates", c);
        for (const char* command : {"explain", "audit"}) {
            std::vector<std::string> outputs;
            for (std::size_t workers : {1, 2, 4, 1}) {
                cli::Options o = b.options(command);
                o.workers = workers;
                o.candidates_path = candidates;
                outputs.push_back(run(o).out);
            }
            for (const auto& out : outputs)
                CHECK(out == outputs.front());
        }
    }

    TEST_CASE("summaries recompute from the records")
    {
        cli::Options o = zoo("audit");
        test::TempDir dir;
        o.candidates_path = dir.write("c.txt", "0: hair,milk,toothed,fins\n1: milk,feathers\n2: backbone\n"
                                               "4: feathers,milk\n");
        o.timings = true;
        const json report = run(o).report();
        CHECK(cli::audit_summary(report["records"]) == report["summary"]);
        CHECK(report["summary"]["mean_timings"].contains("validation"));

        cli::Options e = zoo("explain");
        e.timings = true;
        const json explained = run(e).report();
        CHECK(cli::explain_summary(explained["records"]) == explained["summary"]);
    }

    TEST_CASE("size statistics")
    {
        const auto s = cli::size_stats({1, 2, 3, 4});
        CHECK(s.count == 4);
        CHECK(s.min == 1);
        CHECK(s.max == 4);
        CHECK(s.mean == doctest::Approx(2.5));
        CHECK(s.stddev == doctest::Approx(std::sqrt(1.25)));
        CHECK(cli::size_stats({}).count == 0);
    }

    TEST_CASE("flat table")
    {
        test::TempDir dir;
        cli::Options o = zoo("audit");
        o.candidates_path = test::fixture("zoo/anchor.candidates");
        o.table_path = dir.path("table.csv");
        REQUIRE(run(o).code == cli::kOk);
        const std::string table = read_file(o.table_path);
        CHECK(table.find("optimistic") != std::string::npos);
        CHECK(std::count(table.begin(), table.end(), '\n') == 2);
    }

    TEST_CASE("report goes to --out")
    {
        test::TempDir dir;
        cli::Options o = zoo("explain");
        o.out_path = dir.path("report.json");
        const Result r = run(o);
        CHECK(r.out.empty());
        CHECK(json::parse(read_file(o.out_path))["records"].size() == 10);
    }
}

TEST_SUITE("candidates file")
{
    TEST_CASE("parsing")
    {
        const Model model = test::zoo_model();
        const auto lines = cli::parse_candidates("# header\n\n3: milk\n0: hair, milk ,fins\n7:\n", model.features);
        REQUIRE(lines.size() == 3);
        CHECK(lines[0].id == 0);
        CHECK(lines[0].features == std::vector<FeatureId>{1, 4, 12});
        CHECK(lines[1].id == 3);
        CHECK(lines[2].features.empty());
        CHECK_THROWS_AS(cli::parse_candidates("0 milk\n", model.features), ParseError);
        CHECK_THROWS_AS(cli::parse_candidates("x: milk\n", model.features), ParseError);
        CHECK_THROWS_AS(cli::parse_candidates("-1: milk\n", model.features), ParseError);
        CHECK_THROWS_AS(cli::parse_candidates("0: wings\n", model.features), ParseError);
        CHECK_THROWS_AS(cli::parse_candidates("0: milk,milk\n", model.features), ParseError);
        CHECK_THROWS_AS(cli::parse_candidates("0: milk\n0: hair\n", model.features), ParseError);
        CHECK_THROWS_AS(cli::parse_candidates("0: milk,,hair\n", model.features), ParseError);
    }

    TEST_CASE("seed orders")
    {
        CHECK(cli::parse_seed_order("asc", 3) == std::vector<FeatureId>{0, 1, 2});
        CHECK(cli::parse_seed_order("desc", 3) == std::vector<FeatureId>{2, 1, 0});
        auto shuffled = cli::parse_seed_order("42", 10);
        CHECK(shuffled == cli::parse_seed_order("42", 10));
        std::sort(shuffled.begin(), shuffled.end());
        CHECK(shuffled == cli::parse_seed_order("asc", 10));
        CHECK_THROWS_AS(cli::parse_seed_order("random", 3), std::invalid_argument);
    }
}

TEST_SUITE("exit codes")
{
    TEST_CASE("usage and parse errors")
    {
        cli::Options o = zoo("explain");
        o.model_path = "/nonexistent/model.json";
        CHECK(run(o).code == cli::kUsageError);

        o = zoo("frobnicate");
        CHECK(run(o).code == cli::kUsageError);

        test::TempDir dir;
        o = zoo("audit");
        o.candidates_path = dir.write("bad.txt", "0: wings\n");
        CHECK(run(o).code == cli::kUsageError);
        o.candidates_path = dir.write("far.txt", "99: milk\n");
        CHECK(run(o).code == cli::kUsageError);
        o = zoo("audit");
        CHECK(run(o).code == cli::kUsageError);  // no candidates file

        o = zoo("explain");
        o.mode = "fastest";
        CHECK(run(o).code == cli::kUsageError);
        o = zoo("explain");
        o.seed_order = "sideways";
        CHECK(run(o).code == cli::kUsageError);
    }

    TEST_CASE("budget exhaustion is indeterminate")
    {
        cli::Options o = zoo("explain");
        o.node_budget = 1;
        const Result r = run(o);
        CHECK(r.code == cli::kIndeterminate);
        const json report = r.report();
        CHECK(report["summary"]["counts"]["indeterminate"] == 10);
        for (const json& rec : report["records"])
            CHECK_FALSE(rec.contains("explanation"));

        cli::Options a = zoo("audit");
        a.candidates_path = test::fixture("zoo/anchor.candidates");
        a.node_budget = 1;
        const Result ra = run(a);
        CHECK(ra.code == cli::kIndeterminate);
        CHECK(ra.report()["summary"]["counts"]["indeterminate"] == 1);
        CHECK(ra.report()["summary"]["decided"] == 0);
    }
}

TEST_SUITE("other commands")
{
    TEST_CASE("export-smt")
    {
        cli::Options o = zoo("export-smt");
        o.instance_id = test::kBear;
        o.candidates_path = "";
        Result r = run(o);
        CHECK(r.code == cli::kOk);
        CHECK(r.out.find("(check-sat)") != std::string::npos);

        test::TempDir dir;
        o.candidates_path = dir.write("c.txt", "1: milk\n");
        r = run(o);
        CHECK(r.code == cli::kOk);
        CHECK(r.out.find("(assert b_4)") != std::string::npos);

        o.target_class = "bird";
        CHECK(run(o).out.find("not predicted as class 1 (bird)") != std::string::npos);

        o.instance_id = 50;
        CHECK(run(o).code == cli::kUsageError);
    }

    TEST_CASE("selftest")
    {
        cli::Options o;
        o.command = "selftest";
        o.selftest_queries = 300;
        const Result r = run(o);
        CHECK(r.code == cli::kOk);
        CHECK(r.out.find("0 mismatches") != std::string::npos);
    }
}
