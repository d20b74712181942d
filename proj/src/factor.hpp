#pragma once

#include <cstddef>
#include <vector>

#include "bnkit/network.hpp"

namespace bnkit::detail {

// Dense table over an ascending list of variable indices; values laid out
// mixed-radix with the last variable varying fastest.
struct Factor {
    std::vector<std::size_t> vars;
    std::vector<std::size_t> cards;
    std::vector<double> values;

    bool contains(std::size_t var) const;
};

Factor factor_from_cpt(const BayesianNetwork& net, std::size_t node);
Factor multiply(const Factor& a, const Factor& b);
Factor sum_out(const Factor& f, std::size_t var);
Factor reduce(const Factor& f, std::size_t var, std::size_t state);

}  // namespace bnkit::detail
