#include "abductree/semantics.hpp"

#include <sstream>

namespace abductree {

std::string smtlib_real(const Rational& value)
{
    auto positive = [](const Rational& v) -> std::string {
        if (v.get_den() == 1)
            return v.get_num().get_str() + ".0";
        if (is_finite_decimal(v))
            return to_decimal_string(v);
        return "(/ " + v.get_num().get_str() + ".0 " + v.get_den().get_str() + ".0)";
    };
    if (value < 0)
        return "(- " + positive(-value) + ")";
    return positive(value);
}

namespace {

std::string bool_var(const SplitPredicate& s)
{
    switch (s.kind) {
    case SplitKind::kIsTrue:
        return "b_" + std::to_string(s.feature);
    case SplitKind::kIndicator:
        return "b_" + std::to_string(s.feature) + "_v" + std::to_string(s.operand);
    case SplitKind::kLessThan:
        return "b_" + std::to_string(s.feature) + "_t" + std::to_string(s.operand);
    }
    return {};
}

std::string sum(const std::vector<std::string>& terms)
{
    if (terms.size() == 1)
        return terms.front();
    std::string out = "(+";
    for (const auto& t : terms)
        out += " " + t;
    return out + ")";
}

}  // namespace

std::string export_smtlib(const Model& model, const Query& query)
{
    const FeatureSpace& fs = model.features;
    const Ensemble& e = model.ensemble;
    const std::vector<bool> used = model.used_features();
    if (query.target >= e.num_classes)
        throw std::invalid_argument("query target out of range");
    check_cube(fs, query.fixed);

    std::ostringstream os;
    os << "; boosted-tree ensemble: " << e.num_classes << " classes x " << e.trees_per_class << " trees\n"
       << "; satisfiable iff an instance extending the fixed literals is not predicted as class " << query.target
       << " (" << e.class_name(query.target) << ")\n"
       << "(set-logic QF_LRA)\n";

    // input variables and the one-hot / threshold links
    for (FeatureId f = 0; f < fs.size(); ++f) {
        if (!used[f])
            continue;
        const FeatureDecl& d = fs[f];
        os << "; feature " << f << ": " << d.name << " (" << to_string(d.kind) << ")\n";
        switch (d.kind) {
        case FeatureKind::kBoolean:
            os << "(declare-const " << bool_var({f, SplitKind::kIsTrue, 0}) << " Bool)\n";
            break;
        case FeatureKind::kCategorical: {
            std::vector<std::string> vars;
            for (std::uint32_t v = 0; v < d.values.size(); ++v) {
                vars.push_back(bool_var({f, SplitKind::kIndicator, v}));
                os << "(declare-const " << vars.back() << " Bool) ; " << d.name << "=" << d.values[v] << "\n";
            }
            os << "(assert (or";
            for (const auto& v : vars)
                os << " " << v;
            os << "))\n";
            for (std::size_t i = 0; i < vars.size(); ++i)
                for (std::size_t j = i + 1; j < vars.size(); ++j)
                    os << "(assert (not (and " << vars[i] << " " << vars[j] << ")))\n";
            break;
        }
        case FeatureKind::kContinuous: {
            const std::string x = "x_" + std::to_string(f);
            os << "(declare-const " << x << " Real)\n";
            for (std::uint32_t t = 0; t < d.thresholds.size(); ++t) {
                const std::string b = bool_var({f, SplitKind::kLessThan, t});
                os << "(declare-const " << b << " Bool)\n"
                   << "(assert (= " << b << " (< " << x << " " << smtlib_real(d.thresholds[t]) << ")))\n";
            }
            break;
        }
        }
    }

    // per-tree path implications
    for (std::size_t t = 0; t < e.trees.size(); ++t) {
        const std::string r = "r_" + std::to_string(t);
        os << "(declare-const " << r << " Real)\n";
        const Tree& tree = e.trees[t];
        for (const PathConstraint& p : tree_paths(model, t)) {
            std::vector<std::string> lits;
            for (auto id : p.right_nodes)
                lits.push_back(bool_var(tree.nodes[static_cast<std::size_t>(id)].split));
            for (auto id : p.left_nodes)
                lits.push_back("(not " + bool_var(tree.nodes[static_cast<std::size_t>(id)].split) + ")");
            const std::string eq = "(= " + r + " " + smtlib_real(p.value) + ")";
            if (lits.empty()) {
                os << "(assert " << eq << ")\n";
                continue;
            }
            os << "(assert (=> ";
            if (lits.size() == 1) {
                os << lits.front();
            } else {
                os << "(and";
                for (const auto& l : lits)
                    os << " " << l;
                os << ")";
            }
            os << " " << eq << "))\n";
        }
    }

    // class scores
    for (ClassId c = 0; c < e.num_classes; ++c) {
        std::vector<std::string> terms;
        for (std::size_t l = 0; l < e.trees_per_class; ++l)
            terms.push_back("r_" + std::to_string(c * e.trees_per_class + l));
        os << "(declare-const v_" << c << " Real)\n(assert (= v_" << c << " " << sum(terms) << "))\n";
    }

    // fixed literals
    os << "; fixed literals\n";
    for (const auto& l : query.fixed) {
        if (!used[l.feature])
            continue;
        const FeatureDecl& d = fs[l.feature];
        switch (d.kind) {
        case FeatureKind::kBoolean: {
            const std::string b = bool_var({l.feature, SplitKind::kIsTrue, 0});
            os << "(assert " << (std::get<bool>(l.value) ? b : "(not " + b + ")") << ")\n";
            break;
        }
        case FeatureKind::kCategorical:
            os << "(assert " << bool_var({l.feature, SplitKind::kIndicator, std::get<Category>(l.value).index})
               << ")\n";
            break;
        case FeatureKind::kContinuous:
            os << "(assert (= x_" << l.feature << " " << smtlib_real(std::get<Rational>(l.value)) << "))\n";
            break;
        }
    }

    // negated prediction under the lowest-index tie rule
    os << "; some class beats class " << query.target << "\n";
    const auto adversaries = negated_prediction(e.num_classes, query.target);
    if (adversaries.empty()) {
        os << "(assert false)\n";
    } else {
        os << "(assert (or";
        for (const auto& a : adversaries)
            os << " (" << (a.strict ? ">" : ">=") << " v_" << a.adversary << " v_" << query.target << ")";
        os << "))\n";
    }
    os << "(check-sat)\n(exit)\n";
    return os.str();
}

}  // namespace abductree
