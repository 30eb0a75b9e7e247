#include "abductree/abstraction.hpp"

#include <algorithm>
#include <stdexcept>

namespace abductree {

Abstraction::Abstraction(const Model& model)
    : model_(&model)
{
    const FeatureSpace& fs = model.features;
    const std::size_t k = fs.size();
    atom_count_.assign(k, 1);
    relevant_ = model.used_features();
    category_atom_.resize(k);
    atom_category_.resize(k);

    std::vector<std::vector<bool>> tested(k);
    for (FeatureId f = 0; f < k; ++f)
        if (fs[f].kind == FeatureKind::kCategorical)
            tested[f].assign(fs[f].values.size(), false);
    for (const auto& tree : model.ensemble.trees)
        for (const auto& n : tree.nodes)
            if (!n.is_leaf() && n.split.kind == SplitKind::kIndicator)
                tested[n.split.feature].at(n.split.operand) = true;

    for (FeatureId f = 0; f < k; ++f) {
        const FeatureDecl& decl = fs[f];
        if (relevant_[f])
            relevant_list_.push_back(f);
        switch (decl.kind) {
        case FeatureKind::kBoolean:
            atom_count_[f] = 2;
            break;
        case FeatureKind::kContinuous:
            atom_count_[f] = static_cast<std::uint32_t>(decl.thresholds.size() + 1);
            break;
        case FeatureKind::kCategorical: {
            auto& to_atom = category_atom_[f];
            auto& to_cat = atom_category_[f];
            to_atom.assign(decl.values.size(), 0);
            std::uint32_t next = 0;
            for (std::uint32_t v = 0; v < decl.values.size(); ++v)
                if (tested[f][v]) {
                    to_atom[v] = next++;
                    to_cat.push_back(v);
                }
            std::uint32_t rest = next;
            bool has_rest = false;
            for (std::uint32_t v = 0; v < decl.values.size(); ++v)
                if (!tested[f][v]) {
                    to_atom[v] = rest;
                    if (!has_rest)
                        to_cat.push_back(v);
                    has_rest = true;
                }
            atom_count_[f] = next + (has_rest ? 1 : 0);
            if (atom_count_[f] > 64)
                throw std::invalid_argument("categorical feature '" + decl.name +
                                            "' is tested on more than 63 distinct values");
            break;
        }
        }
    }
}

std::uint32_t Abstraction::atom_of(FeatureId f, const Value& value) const
{
    const FeatureDecl& decl = model_->features[f];
    switch (decl.kind) {
    case FeatureKind::kBoolean:
        return std::get<bool>(value) ? 1 : 0;
    case FeatureKind::kCategorical:
        return category_atom_[f].at(std::get<Category>(value).index);
    case FeatureKind::kContinuous: {
        const auto& ts = decl.thresholds;
        return static_cast<std::uint32_t>(std::upper_bound(ts.begin(), ts.end(), std::get<Rational>(value)) -
                                          ts.begin());
    }
    }
    return 0;
}

Value Abstraction::representative(FeatureId f, std::uint32_t atom) const
{
    const FeatureDecl& decl = model_->features[f];
    switch (decl.kind) {
    case FeatureKind::kBoolean:
        return atom == 1;
    case FeatureKind::kCategorical:
        return Category{atom_category_[f].at(atom)};
    case FeatureKind::kContinuous: {
        const auto& ts = decl.thresholds;
        if (ts.empty())
            return Rational(0);
        if (atom == 0)
            return Rational(ts.front() - 1);
        if (atom >= ts.size())
            return Rational(ts.back() + 1);
        Rational mid = (ts[atom - 1] + ts[atom]) / 2;
        return mid;
    }
    }
    return false;
}

AbstractCell Abstraction::full_cell() const
{
    AbstractCell cell;
    cell.restrictions.resize(atom_count_.size());
    for (FeatureId f = 0; f < atom_count_.size(); ++f) {
        Restriction& r = cell.restrictions[f];
        const std::uint32_t n = atom_count_[f];
        if (model_->features[f].kind == FeatureKind::kContinuous) {
            r.lo = 0;
            r.hi = n - 1;
        } else {
            r.mask = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
        }
    }
    return cell;
}

AbstractCell Abstraction::cell_of(const Cube& cube) const
{
    AbstractCell cell = full_cell();
    for (const auto& l : cube)
        fix(cell, l.feature, atom_of(l.feature, l.value));
    return cell;
}

void Abstraction::fix(AbstractCell& cell, FeatureId f, std::uint32_t atom) const
{
    Restriction& r = cell.restrictions[f];
    if (model_->features[f].kind == FeatureKind::kContinuous) {
        r.lo = r.hi = atom;
    } else {
        r.mask = std::uint64_t{1} << atom;
    }
}

bool Abstraction::allows(const AbstractCell& cell, FeatureId f, std::uint32_t atom) const
{
    const Restriction& r = cell.restrictions[f];
    if (model_->features[f].kind == FeatureKind::kContinuous)
        return r.lo <= atom && atom <= r.hi;
    return atom < 64 && ((r.mask >> atom) & 1U) != 0;
}

bool Abstraction::is_empty(const AbstractCell& cell) const
{
    for (FeatureId f = 0; f < atom_count_.size(); ++f) {
        const Restriction& r = cell.restrictions[f];
        if (model_->features[f].kind == FeatureKind::kContinuous ? r.lo > r.hi : r.mask == 0)
            return true;
    }
    return false;
}

std::uint32_t Abstraction::allowed_count(const AbstractCell& cell, FeatureId f) const
{
    const Restriction& r = cell.restrictions[f];
    if (model_->features[f].kind == FeatureKind::kContinuous)
        return r.hi - r.lo + 1;
    return static_cast<std::uint32_t>(std::popcount(r.mask));
}

std::uint32_t Abstraction::lowest_allowed(const AbstractCell& cell, FeatureId f) const
{
    const Restriction& r = cell.restrictions[f];
    if (model_->features[f].kind == FeatureKind::kContinuous)
        return r.lo;
    return static_cast<std::uint32_t>(std::countr_zero(r.mask));
}

std::pair<AbstractCell, AbstractCell> Abstraction::branch(const AbstractCell& cell,
                                                          const SplitPredicate& split) const
{
    std::pair<AbstractCell, AbstractCell> out{cell, cell};
    Restriction& no = out.first.restrictions[split.feature];
    Restriction& yes = out.second.restrictions[split.feature];
    switch (split.kind) {
    case SplitKind::kIsTrue:
        no.mask &= 0b01;
        yes.mask &= 0b10;
        break;
    case SplitKind::kIndicator: {
        const std::uint64_t bit = std::uint64_t{1} << category_atom_[split.feature][split.operand];
        no.mask &= ~bit;
        yes.mask &= bit;
        break;
    }
    case SplitKind::kLessThan:
        // f < t_j  <=>  atom <= j
        no.lo = std::max(no.lo, split.operand + 1);
        yes.hi = std::min(yes.hi, split.operand);
        break;
    }
    return out;
}

bool Abstraction::holds(const SplitPredicate& split, std::uint32_t atom) const
{
    switch (split.kind) {
    case SplitKind::kIsTrue:
        return atom == 1;
    case SplitKind::kIndicator:
        return category_atom_[split.feature][split.operand] == atom;
    case SplitKind::kLessThan:
        return atom <= split.operand;
    }
    return false;
}

AtomPoint Abstraction::lowest_point(const AbstractCell& cell) const
{
    AtomPoint point(atom_count_.size());
    for (FeatureId f = 0; f < point.size(); ++f)
        point[f] = lowest_allowed(cell, f);
    return point;
}

Cube Abstraction::materialize(const Cube& fixed, const AtomPoint& point) const
{
    std::vector<Literal> lits;
    lits.reserve(atom_count_.size());
    for (FeatureId f = 0; f < atom_count_.size(); ++f) {
        if (const Value* v = fixed.find(f))
            lits.push_back(Literal{f, *v});
        else
            lits.push_back(Literal{f, representative(f, point[f])});
    }
    return Cube(std::move(lits));
}

}  // namespace abductree
