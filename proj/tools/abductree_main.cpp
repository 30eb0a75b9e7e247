// abductree: exact explanations for boosted tree ensembles.

#include "abductree/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using abductree::cli::Options;
    Options o;
    CLI::App app{"Exact abductive explanations for boosted tree ensembles"};
    app.require_subcommand(1);

    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--model", o.model_path, "model JSON file")->required();
        sub->add_option("--fmap", o.fmap_path, "feature map file")->required();
        sub->add_option("--instances", o.instances_path, "instance CSV file")->required();
        sub->add_option("--node-budget", o.node_budget, "search nodes per oracle query");
        sub->add_option("--time-budget", o.time_budget, "seconds per oracle query");
        sub->add_option("--workers", o.workers, "worker threads (0: one per core)");
        sub->add_option("--out", o.out_path, "write the report here instead of stdout");
    };
    auto add_report = [&o](CLI::App* sub) {
        sub->add_option("--table", o.table_path, "also write a CSV table of the records");
        sub->add_flag("!--no-timings", o.timings, "omit timing fields");
        sub->add_flag("--verify", o.verify, "re-check every explanation with a fresh oracle");
        sub->add_option("--seed-order", o.seed_order, "deletion order: asc, desc or an integer seed");
    };

    auto* explain = app.add_subcommand("explain", "subset- or cardinality-minimal explanation per instance");
    add_common(explain);
    add_report(explain);
    explain->add_option("--mode", o.mode, "subset or cardinality")->check(CLI::IsMember({"subset", "cardinality"}));
    explain->add_flag("--shrink", o.shrink, "shrink correction sets in cardinality mode");

    for (const char* name : {"validate", "repair", "refine", "audit"}) {
        auto* sub = app.add_subcommand(name, std::string(name) + " candidate explanations");
        add_common(sub);
        add_report(sub);
        sub->add_option("--candidates", o.candidates_path, "candidates file (id: feature,feature,...)")->required();
        sub->add_option("--max-cex", o.max_cex, "counterexamples attached to optimistic verdicts");
        sub->add_option("--mode", o.mode, "refinement mode: subset or cardinality")
            ->check(CLI::IsMember({"subset", "cardinality"}));
    }

    auto* smt = app.add_subcommand("export-smt", "write the entailment query as SMT-LIB (QF_LRA)");
    add_common(smt);
    smt->add_option("--instance-id", o.instance_id, "0-based instance row")->required();
    smt->add_option("--candidates", o.candidates_path, "fix only the candidate's literals for that row");
    smt->add_option("--class", o.target_class, "target class (default: the predicted one)");

    auto* selftest = app.add_subcommand("selftest", "cross-check the oracle against brute force");
    selftest->add_option("--queries", o.selftest_queries, "random entailment queries");
    selftest->add_option("--seed", o.selftest_seed, "random seed");
    selftest->add_option("--node-budget", o.node_budget, "search nodes per oracle query");
    selftest->add_option("--time-budget", o.time_budget, "seconds per oracle query");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : abductree::cli::kUsageError;
    }
    o.command = app.get_subcommands().front()->get_name();
    return abductree::cli::run(o, std::cout, std::cerr);
}
