#include "abductree/model_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace abductree {

namespace {

using json = nlohmann::json;

/**
 * SAX handler that builds a DOM but keeps every floating-point literal as its
 * source text (stored as a JSON string), so decimals never pass through a
 * binary double.
 */
class DecimalPreservingBuilder {
public:
    json root;

    bool null() { return add(nullptr) != nullptr; }
    bool boolean(bool v) { return add(v) != nullptr; }
    bool number_integer(json::number_integer_t v) { return add(v) != nullptr; }
    bool number_unsigned(json::number_unsigned_t v) { return add(v) != nullptr; }
    bool number_float(json::number_float_t, const json::string_t& text) { return add(text) != nullptr; }
    bool string(json::string_t& v) { return add(v) != nullptr; }
    bool binary(json::binary_t&) { return false; }
    bool key(json::string_t& k)
    {
        key_ = k;
        return true;
    }
    bool start_object(std::size_t)
    {
        stack_.push_back(add(json::object()));
        return true;
    }
    bool end_object()
    {
        stack_.pop_back();
        return true;
    }
    bool start_array(std::size_t)
    {
        stack_.push_back(add(json::array()));
        return true;
    }
    bool end_array()
    {
        stack_.pop_back();
        return true;
    }
    bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex)
    {
        throw ParseError(std::string("model file: ") + ex.what());
    }

private:
    json* add(json value)
    {
        if (stack_.empty()) {
            root = std::move(value);
            return &root;
        }
        json& top = *stack_.back();
        if (top.is_array()) {
            top.push_back(std::move(value));
            return &top.back();
        }
        json& slot = top[key_];
        slot = std::move(value);
        return &slot;
    }

    std::vector<json*> stack_;
    std::string key_;
};

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> lines_of(std::string_view text)
{
    auto lines = split(text, '\n');
    if (!lines.empty() && trim(lines.back()).empty())
        lines.pop_back();
    return lines;
}

Rational decimal_field(const json& node, const char* field, const std::string& where)
{
    auto it = node.find(field);
    if (it == node.end())
        throw ParseError(where + ": missing '" + field + "'");
    try {
        if (it->is_string())
            return parse_decimal(it->get<std::string>());
        if (it->is_number_integer())
            return Rational(mpz_class(it->dump()));
    } catch (const std::invalid_argument& e) {
        throw ParseError(where + ": " + e.what());
    }
    throw ParseError(where + ": '" + field + "' is not a number");
}

std::int64_t int_field(const json& node, const char* field, const std::string& where)
{
    auto it = node.find(field);
    if (it == node.end() || !it->is_number_integer())
        throw ParseError(where + ": missing integer '" + field + "'");
    return it->get<std::int64_t>();
}

struct SplitRef {
    FeatureId feature;
    std::optional<std::uint32_t> category;  // for "name=value" splits
};

SplitRef resolve_split(const std::vector<FeatureDecl>& decls, const std::map<std::string, FeatureId>& names,
                       const std::string& split, const std::string& where)
{
    if (auto it = names.find(split); it != names.end())
        return {it->second, std::nullopt};
    auto eq = split.find('=');
    if (eq != std::string::npos) {
        auto it = names.find(split.substr(0, eq));
        if (it != names.end() && decls[it->second].kind == FeatureKind::kCategorical) {
            const auto& values = decls[it->second].values;
            const std::string value = split.substr(eq + 1);
            auto v = std::find(values.begin(), values.end(), value);
            if (v == values.end())
                throw ParseError(where + ": split on unknown value '" + value + "' of '" + decls[it->second].name + "'");
            return {it->second, static_cast<std::uint32_t>(v - values.begin())};
        }
    }
    throw ParseError(where + ": split on undeclared feature '" + split + "'");
}

class TreeReader {
public:
    TreeReader(const std::vector<FeatureDecl>& decls, const std::map<std::string, FeatureId>& names,
               std::size_t max_depth)
        : decls_(decls)
        , names_(names)
        , max_depth_(max_depth)
    {
    }

    /// First pass: thresholds of continuous features.
    void harvest(const json& node, const std::string& where, std::vector<std::set<Rational>>& thresholds,
                 std::size_t depth = 0)
    {
        check_depth(depth, where);
        if (node.contains("leaf"))
            return;
        const std::string w = where + " node " + std::to_string(int_field(node, "nodeid", where));
        const SplitRef ref = resolve_split(decls_, names_, split_name(node, w), w);
        if (decls_[ref.feature].kind == FeatureKind::kContinuous)
            thresholds[ref.feature].insert(decimal_field(node, "split_condition", w));
        auto [yes, no] = children(node, w);
        harvest(*yes, where, thresholds, depth + 1);
        harvest(*no, where, thresholds, depth + 1);
    }

    /// Second pass: nodes in preorder, false branch before true branch.
    std::int32_t build(const json& node, const std::string& where, const FeatureSpace& fs, Tree& tree,
                       std::size_t depth = 0)
    {
        check_depth(depth, where);
        const auto id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (node.contains("leaf")) {
            tree.nodes[static_cast<std::size_t>(id)].value =
                decimal_field(node, "leaf", where + " node " + std::to_string(int_field(node, "nodeid", where)));
            return id;
        }
        const std::string w = where + " node " + std::to_string(int_field(node, "nodeid", where));
        const SplitRef ref = resolve_split(decls_, names_, split_name(node, w), w);
        const Rational cond = decimal_field(node, "split_condition", w);
        auto [yes, no] = children(node, w);

        SplitPredicate pred;
        pred.feature = ref.feature;
        // XGBoost takes "yes" when value < split_condition.
        bool yes_is_true = false;
        switch (decls_[ref.feature].kind) {
        case FeatureKind::kBoolean:
            if (ref.category)
                throw ParseError(w + ": value split on boolean feature");
            if (cond <= 0 || cond > 1)
                throw ParseError(w + ": split_condition on a binary feature must lie in (0, 1]");
            pred.kind = SplitKind::kIsTrue;
            break;
        case FeatureKind::kCategorical:
            if (!ref.category)
                throw ParseError(w + ": categorical split must name a value (feature=value)");
            if (cond <= 0 || cond > 1)
                throw ParseError(w + ": split_condition on an indicator must lie in (0, 1]");
            pred.kind = SplitKind::kIndicator;
            pred.operand = *ref.category;
            break;
        case FeatureKind::kContinuous:
            if (ref.category)
                throw ParseError(w + ": value split on continuous feature");
            pred.kind = SplitKind::kLessThan;
            pred.operand = *fs.threshold_index(ref.feature, cond);
            yes_is_true = true;
            break;
        }
        const json* on_false = yes_is_true ? no : yes;
        const json* on_true = yes_is_true ? yes : no;
        const std::int32_t left = build(*on_false, where, fs, tree, depth + 1);
        const std::int32_t right = build(*on_true, where, fs, tree, depth + 1);
        TreeNode& n = tree.nodes[static_cast<std::size_t>(id)];
        n.split = pred;
        n.left = left;
        n.right = right;
        return id;
    }

private:
    void check_depth(std::size_t depth, const std::string& where) const
    {
        if (depth > max_depth_)
            throw ParseError(where + " exceeds the maximum depth " + std::to_string(max_depth_));
    }

    static std::string split_name(const json& node, const std::string& where)
    {
        auto it = node.find("split");
        if (it == node.end() || !it->is_string())
            throw ParseError(where + ": internal node without 'split'");
        return it->get<std::string>();
    }

    static std::pair<const json*, const json*> children(const json& node, const std::string& where)
    {
        const std::int64_t yes = int_field(node, "yes", where);
        const std::int64_t no = int_field(node, "no", where);
        const std::int64_t missing = int_field(node, "missing", where);
        if (missing != yes && missing != no)
            throw ParseError(where + ": 'missing' routes to neither child");
        auto it = node.find("children");
        if (it == node.end() || !it->is_array() || it->size() != 2)
            throw ParseError(where + ": internal node needs exactly two children");
        const json* yes_node = nullptr;
        const json* no_node = nullptr;
        for (const json& child : *it) {
            const std::int64_t cid = int_field(child, "nodeid", where);
            if (cid == yes)
                yes_node = &child;
            else if (cid == no)
                no_node = &child;
        }
        if (yes_node == nullptr || no_node == nullptr || yes == no)
            throw ParseError(where + ": 'yes'/'no' do not match the children");
        return {yes_node, no_node};
    }

    const std::vector<FeatureDecl>& decls_;
    const std::map<std::string, FeatureId>& names_;
    std::size_t max_depth_;
};

}  // namespace

std::vector<FeatureDecl> parse_feature_map(std::string_view text)
{
    std::vector<FeatureDecl> decls;
    const auto lines = lines_of(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const std::string_view line = trim(lines[ln]);
        if (line.empty() || line.front() == '#')
            continue;
        const std::string where = "feature map line " + std::to_string(ln + 1);
        auto cols = split(line, '\t');
        if (cols.size() != 3)
            throw ParseError(where + ": expected index<TAB>name<TAB>kind");
        const std::string index(trim(cols[0]));
        if (index != std::to_string(decls.size()))
            throw ParseError(where + ": expected index " + std::to_string(decls.size()));
        FeatureDecl decl;
        decl.name = std::string(trim(cols[1]));
        const std::string_view kind = trim(cols[2]);
        if (kind == "binary" || kind == "i") {
            decl.kind = FeatureKind::kBoolean;
        } else if (kind == "continuous" || kind == "q" || kind == "float" || kind == "int") {
            decl.kind = FeatureKind::kContinuous;
        } else if (kind.starts_with("categorical:")) {
            decl.kind = FeatureKind::kCategorical;
            for (auto v : split(kind.substr(12), '|'))
                decl.values.emplace_back(trim(v));
        } else {
            throw ParseError(where + ": unknown feature kind '" + std::string(kind) + "'");
        }
        decls.push_back(std::move(decl));
    }
    try {
        FeatureSpace check(decls);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("feature map: ") + e.what());
    }
    return decls;
}

Model parse_model(std::string_view model_json, std::string_view feature_map, std::size_t max_depth)
{
    std::vector<FeatureDecl> decls = parse_feature_map(feature_map);
    std::map<std::string, FeatureId> names;
    for (FeatureId f = 0; f < decls.size(); ++f)
        names.emplace(decls[f].name, f);

    DecimalPreservingBuilder builder;
    json::sax_parse(model_json, &builder);
    const json& doc = builder.root;
    if (!doc.is_object())
        throw ParseError("model file: expected an object with 'num_classes' and 'trees'");

    const std::int64_t num_classes = int_field(doc, "num_classes", "model header");
    if (num_classes <= 0)
        throw ParseError("model header: num_classes must be positive");
    auto trees_it = doc.find("trees");
    if (trees_it == doc.end() || !trees_it->is_array())
        throw ParseError("model file: missing 'trees' array");
    const json& trees = *trees_it;
    if (trees.empty() || trees.size() % static_cast<std::size_t>(num_classes) != 0)
        throw ParseError("model file: " + std::to_string(trees.size()) +
                         " trees are not divisible by num_classes = " + std::to_string(num_classes));
    const std::size_t q = trees.size() / static_cast<std::size_t>(num_classes);
    if (doc.contains("trees_per_class") &&
        static_cast<std::size_t>(int_field(doc, "trees_per_class", "model header")) != q)
        throw ParseError("model header: trees_per_class does not match the tree count");

    bool interleaved = false;
    if (auto it = doc.find("tree_layout"); it != doc.end()) {
        const std::string layout = it->is_string() ? it->get<std::string>() : "";
        if (layout == "interleaved")
            interleaved = true;
        else if (layout != "class-major")
            throw ParseError("model header: tree_layout must be 'class-major' or 'interleaved'");
    }

    TreeReader reader(decls, names, max_depth);
    std::vector<std::set<Rational>> thresholds(decls.size());
    for (std::size_t t = 0; t < trees.size(); ++t)
        reader.harvest(trees[t], "tree " + std::to_string(t), thresholds);
    for (FeatureId f = 0; f < decls.size(); ++f)
        decls[f].thresholds.assign(thresholds[f].begin(), thresholds[f].end());

    Model model;
    model.features = FeatureSpace(std::move(decls));
    TreeReader tree_builder(model.features.decls(), names, max_depth);
    Ensemble& e = model.ensemble;
    e.num_classes = static_cast<std::size_t>(num_classes);
    e.trees_per_class = q;
    e.trees.resize(trees.size());
    for (std::size_t t = 0; t < trees.size(); ++t) {
        // interleaved: tree t is round t / m of class t % m
        const std::size_t slot = interleaved ? (t % e.num_classes) * q + t / e.num_classes : t;
        tree_builder.build(trees[t], "tree " + std::to_string(t), model.features, e.trees[slot]);
    }
    if (doc.contains("base_score"))
        e.base_score = decimal_field(doc, "base_score", "model header");
    if (auto it = doc.find("class_names"); it != doc.end()) {
        if (!it->is_array())
            throw ParseError("model header: class_names must be an array");
        for (const auto& n : *it)
            e.class_names.push_back(n.get<std::string>());
    }

    try {
        model.validate(max_depth);
    } catch (const std::invalid_argument& ex) {
        throw ParseError(std::string("model file: ") + ex.what());
    }
    return model;
}

std::vector<Cube> parse_instances(std::string_view csv, const FeatureSpace& features)
{
    std::vector<Cube> out;
    const auto lines = lines_of(csv);
    if (lines.empty())
        return out;

    // column -> feature (or npos for the ignored label column)
    constexpr FeatureId kLabel = static_cast<FeatureId>(-1);
    std::vector<FeatureId> columns;
    std::vector<bool> seen(features.size(), false);
    const auto header = split(lines[0], ',');
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string_view name = trim(header[c]);
        if (name == "label" && c + 1 == header.size() && !features.find("label")) {
            columns.push_back(kLabel);
            continue;
        }
        auto f = features.find(name);
        if (!f)
            throw ParseError("instance header: unknown feature '" + std::string(name) + "'");
        if (seen[*f])
            throw ParseError("instance header: feature '" + std::string(name) + "' repeated");
        seen[*f] = true;
        columns.push_back(*f);
    }
    for (FeatureId f = 0; f < features.size(); ++f)
        if (!seen[f])
            throw ParseError("instance header: missing feature '" + features[f].name + "'");

    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty())
            continue;
        const std::string where = "instance line " + std::to_string(ln + 1);
        const auto cells = split(lines[ln], ',');
        if (cells.size() != columns.size())
            throw ParseError(where + ": expected " + std::to_string(columns.size()) + " cells, found " +
                             std::to_string(cells.size()));
        std::vector<Literal> lits;
        lits.reserve(features.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (columns[c] == kLabel)
                continue;
            const FeatureId f = columns[c];
            const FeatureDecl& decl = features[f];
            const std::string_view cell = trim(cells[c]);
            if (cell.empty())
                throw ParseError(where + ": missing value for '" + decl.name + "'");
            switch (decl.kind) {
            case FeatureKind::kBoolean:
                if (cell == "1" || cell == "true")
                    lits.push_back({f, true});
                else if (cell == "0" || cell == "false")
                    lits.push_back({f, false});
                else
                    throw ParseError(where + ": '" + std::string(cell) + "' is not a boolean for '" + decl.name + "'");
                break;
            case FeatureKind::kCategorical: {
                auto v = features.value_index(f, cell);
                if (!v)
                    throw ParseError(where + ": unknown value '" + std::string(cell) + "' for '" + decl.name + "'");
                lits.push_back({f, Category{*v}});
                break;
            }
            case FeatureKind::kContinuous:
                try {
                    lits.push_back({f, parse_decimal(cell)});
                } catch (const std::invalid_argument&) {
                    throw ParseError(where + ": '" + std::string(cell) + "' is not numeric for '" + decl.name + "'");
                }
                break;
            }
        }
        out.emplace_back(std::move(lits));
    }
    return out;
}

namespace {

void write_node(std::ostringstream& os, const Model& model, const Tree& tree, std::int32_t id, int depth)
{
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(id)];
    os << "{\"nodeid\":" << id;
    if (n.is_leaf()) {
        os << ",\"leaf\":" << to_decimal_string(n.value) << "}";
        return;
    }
    const FeatureDecl& decl = model.features[n.split.feature];
    std::string name = decl.name;
    std::string cond = "0.5";
    std::int32_t yes = n.left;
    std::int32_t no = n.right;
    if (n.split.kind == SplitKind::kIndicator) {
        name += "=" + decl.values[n.split.operand];
    } else if (n.split.kind == SplitKind::kLessThan) {
        cond = to_decimal_string(decl.thresholds[n.split.operand]);
        std::swap(yes, no);
    }
    os << ",\"depth\":" << depth << ",\"split\":" << json(name).dump() << ",\"split_condition\":" << cond
       << ",\"yes\":" << yes << ",\"no\":" << no << ",\"missing\":" << yes << ",\"children\":[";
    write_node(os, model, tree, yes, depth + 1);
    os << ",";
    write_node(os, model, tree, no, depth + 1);
    os << "]}";
}

}  // namespace

std::string write_model_json(const Model& model)
{
    const Ensemble& e = model.ensemble;
    std::ostringstream os;
    os << "{\"num_classes\":" << e.num_classes << ",\"trees_per_class\":" << e.trees_per_class;
    if (e.base_score != 0)
        os << ",\"base_score\":" << to_decimal_string(e.base_score);
    if (!e.class_names.empty())
        os << ",\"class_names\":" << json(e.class_names).dump();
    os << ",\"trees\":[\n";
    for (std::size_t t = 0; t < e.trees.size(); ++t) {
        write_node(os, model, e.trees[t], 0, 0);
        os << (t + 1 < e.trees.size() ? ",\n" : "\n");
    }
    os << "]}\n";
    return os.str();
}

std::string write_feature_map(const FeatureSpace& features)
{
    std::ostringstream os;
    for (FeatureId f = 0; f < features.size(); ++f) {
        const FeatureDecl& d = features[f];
        os << f << '\t' << d.name << '\t';
        switch (d.kind) {
        case FeatureKind::kBoolean:
            os << "binary";
            break;
        case FeatureKind::kContinuous:
            os << "continuous";
            break;
        case FeatureKind::kCategorical:
            os << "categorical:";
            for (std::size_t i = 0; i < d.values.size(); ++i)
                os << (i ? "|" : "") << d.values[i];
            break;
        }
        os << '\n';
    }
    return os.str();
}

std::string write_instances(const FeatureSpace& features, std::span<const Cube> instances)
{
    std::ostringstream os;
    for (FeatureId f = 0; f < features.size(); ++f)
        os << (f ? "," : "") << features[f].name;
    os << '\n';
    for (const Cube& c : instances) {
        for (FeatureId f = 0; f < features.size(); ++f) {
            const Value* v = c.find(f);
            if (v == nullptr)
                throw std::invalid_argument("write_instances: instance is not total");
            os << (f ? "," : "") << format_value(features, f, *v);
        }
        os << '\n';
    }
    return os.str();
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace abductree
