#include "factor.hpp"

#include <algorithm>

namespace bnkit::detail {

bool Factor::contains(std::size_t var) const {
    return std::binary_search(vars.begin(), vars.end(), var);
}

namespace {

// Stride of each of `target` variables inside factor `f` (0 if absent).
std::vector<std::size_t> strides_in(const Factor& f, const std::vector<std::size_t>& target) {
    std::vector<std::size_t> own(f.vars.size());
    std::size_t s = 1;
    for (std::size_t i = f.vars.size(); i-- > 0;) {
        own[i] = s;
        s *= f.cards[i];
    }
    std::vector<std::size_t> out(target.size(), 0);
    for (std::size_t t = 0; t < target.size(); ++t) {
        auto it = std::lower_bound(f.vars.begin(), f.vars.end(), target[t]);
        if (it != f.vars.end() && *it == target[t]) out[t] = own[it - f.vars.begin()];
    }
    return out;
}

}  // namespace

Factor factor_from_cpt(const BayesianNetwork& net, std::size_t node) {
    const Cpt& cpt = *net.cpt_for(node);
    const auto& parents = net.parent_indices(node);

    Factor f;
    f.vars = parents;
    f.vars.push_back(node);
    std::sort(f.vars.begin(), f.vars.end());
    for (auto v : f.vars) f.cards.push_back(net.variable(v).cardinality());
    std::size_t size = 1;
    for (auto c : f.cards) size *= c;
    f.values.resize(size);

    // position of each CPT-ordered parent within f.vars
    std::vector<std::size_t> parent_pos;
    for (auto p : parents) {
        parent_pos.push_back(std::lower_bound(f.vars.begin(), f.vars.end(), p) - f.vars.begin());
    }
    const std::size_t child_pos =
        std::lower_bound(f.vars.begin(), f.vars.end(), node) - f.vars.begin();

    std::vector<std::size_t> assignment(f.vars.size(), 0);
    for (std::size_t idx = 0; idx < size; ++idx) {
        std::size_t config = 0;
        for (std::size_t i = 0; i < parents.size(); ++i) {
            config = config * net.variable(parents[i]).cardinality() + assignment[parent_pos[i]];
        }
        f.values[idx] = cpt.rows[config][assignment[child_pos]];
        for (std::size_t i = f.vars.size(); i-- > 0;) {
            if (++assignment[i] < f.cards[i]) break;
            assignment[i] = 0;
        }
    }
    return f;
}

Factor multiply(const Factor& a, const Factor& b) {
    Factor out;
    std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(),
                   std::back_inserter(out.vars));
    std::size_t size = 1;
    for (auto v : out.vars) {
        auto ia = std::lower_bound(a.vars.begin(), a.vars.end(), v);
        const std::size_t card = (ia != a.vars.end() && *ia == v)
                                     ? a.cards[ia - a.vars.begin()]
                                     : b.cards[std::lower_bound(b.vars.begin(), b.vars.end(), v) -
                                               b.vars.begin()];
        out.cards.push_back(card);
        size *= card;
    }
    out.values.resize(size);
    const auto sa = strides_in(a, out.vars);
    const auto sb = strides_in(b, out.vars);

    std::vector<std::size_t> assignment(out.vars.size(), 0);
    std::size_t ia = 0, ib = 0;
    for (std::size_t idx = 0; idx < size; ++idx) {
        out.values[idx] = a.values[ia] * b.values[ib];
        for (std::size_t i = out.vars.size(); i-- > 0;) {
            if (++assignment[i] < out.cards[i]) {
                ia += sa[i];
                ib += sb[i];
                break;
            }
            ia -= sa[i] * (out.cards[i] - 1);
            ib -= sb[i] * (out.cards[i] - 1);
            assignment[i] = 0;
        }
    }
    return out;
}

Factor sum_out(const Factor& f, std::size_t var) {
    auto it = std::lower_bound(f.vars.begin(), f.vars.end(), var);
    if (it == f.vars.end() || *it != var) return f;
    const std::size_t pos = it - f.vars.begin();
    std::size_t inner = 1;
    for (std::size_t i = pos + 1; i < f.cards.size(); ++i) inner *= f.cards[i];
    const std::size_t card = f.cards[pos];
    const std::size_t outer = f.values.size() / (inner * card);

    Factor out;
    out.vars = f.vars;
    out.cards = f.cards;
    out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(pos));
    out.cards.erase(out.cards.begin() + static_cast<std::ptrdiff_t>(pos));
    out.values.assign(outer * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t s = 0; s < card; ++s) {
            const double* src = f.values.data() + (o * card + s) * inner;
            double* dst = out.values.data() + o * inner;
            for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
        }
    }
    return out;
}

Factor reduce(const Factor& f, std::size_t var, std::size_t state) {
    auto it = std::lower_bound(f.vars.begin(), f.vars.end(), var);
    if (it == f.vars.end() || *it != var) return f;
    const std::size_t pos = it - f.vars.begin();
    std::size_t inner = 1;
    for (std::size_t i = pos + 1; i < f.cards.size(); ++i) inner *= f.cards[i];
    const std::size_t card = f.cards[pos];
    const std::size_t outer = f.values.size() / (inner * card);

    Factor out;
    out.vars = f.vars;
    out.cards = f.cards;
    out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(pos));
    out.cards.erase(out.cards.begin() + static_cast<std::ptrdiff_t>(pos));
    out.values.resize(outer * inner);
    for (std::size_t o = 0; o < outer; ++o) {
        const double* src = f.values.data() + (o * card + state) * inner;
        std::copy(src, src + inner, out.values.data() + o * inner);
    }
    return out;
}

}  // namespace bnkit::detail
