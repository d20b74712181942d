#include <cmath>

#include "bnkit/error.hpp"
#include "bnkit/estimate.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace bnkit;

namespace {

Variable var(const std::string& id, std::size_t k) {
    Variable v{id, id, {}, std::nullopt};
    for (std::size_t s = 0; s < k; ++s) v.states.push_back("s" + std::to_string(s));
    return v;
}

Dataset column(std::size_t k, const std::vector<std::uint64_t>& counts) {
    std::vector<std::int32_t> cells;
    for (std::size_t s = 0; s < counts.size(); ++s) cells.insert(cells.end(), counts[s], static_cast<std::int32_t>(s));
    return Dataset({var("X", k)}, cells);
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

}  // namespace

TEST_CASE("root estimates are plain frequencies") {
    CHECK(estimate_root_cpt(column(4, {10, 20, 30, 40}), "X").rows[0] == std::vector<double>{0.1, 0.2, 0.3, 0.4});
    CHECK(estimate_root_cpt(column(3, {7, 0, 0}), "X").rows[0] == std::vector<double>{1.0, 0.0, 0.0});
    CHECK(estimate_root_cpt(column(2, {1, 1}), "X").rows[0] == std::vector<double>{0.5, 0.5});
    CHECK_THROWS_AS(estimate_root_cpt(Dataset({var("X", 2)}, {kMissing, kMissing}), "X"), DataError);
}

TEST_CASE("smoothed child rows match hand arithmetic") {
    std::vector<std::int32_t> cells;
    for (int i = 0; i < 3; ++i) cells.insert(cells.end(), {0, 0});
    for (int i = 0; i < 4; ++i) cells.insert(cells.end(), {0, 1});
    const Dataset ds({var("P", 2), var("X", 5)}, cells);
    const std::vector<std::string> parents{"P"};
    const auto cpt = estimate_child_cpt(ds, "X", parents, {1.0, 0});
    CHECK(cpt.rows[0][0] == 1.0 / 3.0);
    CHECK(cpt.rows[0][1] == 5.0 / 12.0);
    for (double p : cpt.rows[1]) CHECK(p == 0.2);
}

TEST_CASE("alpha to zero recovers maximum likelihood") {
    std::vector<std::int32_t> cells;
    for (int i = 0; i < 4; ++i) cells.insert(cells.end(), {0, 0});
    for (int i = 0; i < 6; ++i) cells.insert(cells.end(), {0, 1});
    const Dataset ds({var("P", 1), var("X", 2)}, cells);
    const std::vector<std::string> parents{"P"};
    const auto ml = estimate_child_cpt(ds, "X", parents, {0.0, 0});
    CHECK(ml.rows[0][0] == doctest::Approx(0.4));
    CHECK(ml.rows[0][1] == doctest::Approx(0.6));
    const auto tiny = estimate_child_cpt(ds, "X", parents, {1e-9, 0});
    CHECK(tiny.rows[0][0] == doctest::Approx(0.4).epsilon(1e-8));
}

TEST_CASE("alpha zero with an unobserved configuration is an error") {
    const Dataset ds({var("P", 2), var("X", 2)}, {0, 0, 0, 1});
    const std::vector<std::string> parents{"P"};
    CHECK_THROWS_WITH_AS(estimate_child_cpt(ds, "X", parents, {0.0, 0}), doctest::Contains("unobserved"), DataError);
    CHECK_THROWS_AS(estimate_child_cpt(ds, "X", parents, {-1.0, 0}), DataError);
}

TEST_CASE("fit_network on the devex shape") {
    const auto truth = bnkit::testing::devex_generator();
    const auto ds = forward_sample(truth, 3000, 17);
    const auto fitted = fit_network(truth.dag(), ds, {1.0, 0});
    CHECK(validate_network(fitted).ok());
    CHECK(fitted.cpts().size() == 6);
    for (const auto& c : fitted.cpts()) {
        for (const auto& row : c.rows) {
            for (double p : row) CHECK(p > 0.0);
        }
    }

    const auto roots = fit_network(Dag(truth.dag().nodes()), ds, {1.0, 0});
    for (const auto& c : roots.cpts()) CHECK(c.parents.empty());

    Dag unknown(truth.dag().nodes());
    unknown.add_node("nope");
    CHECK_THROWS_WITH_AS(fit_network(unknown, ds, {1.0, 0}), doctest::Contains("nope"), DataError);
}

TEST_CASE("forward sampling contracts") {
    const auto net = bnkit::testing::chain_network();
    CHECK(forward_sample(net, 500, 9) == forward_sample(net, 500, 9));
    CHECK_FALSE(forward_sample(net, 500, 9) == forward_sample(net, 500, 10));

    const BayesianNetwork point({var("X", 3)}, Dag({"X"}), {Cpt{"X", {}, {{1.0, 0.0, 0.0}}}});
    const auto ds = forward_sample(point, 1000, 1);
    for (std::size_t r = 0; r < ds.n_total(); ++r) CHECK(ds.value(r, 0) == 0u);

    const BayesianNetwork coin({var("X", 2)}, Dag({"X"}), {Cpt{"X", {}, {{0.7, 0.3}}}});
    const auto flips = forward_sample(coin, 100000, 2);
    const double freq = static_cast<double>(state_counts(flips, "X").counts[1]) / 100000.0;
    CHECK(std::abs(freq - 0.3) <= 0.01);
}

TEST_CASE("property: smoothing moves rows toward uniform") {
    Rng rng(707);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t kp = 2 + rng.below(3);
        const std::size_t kx = 2 + rng.below(4);
        const std::vector<Variable> vars{var("P", kp), var("X", kx)};
        const auto ds = bnkit::testing::random_dataset(rng, vars, 20 + rng.below(60), 0.1);
        const std::vector<std::string> parents{"P"};
        const std::vector<double> uniform(kx, 1.0 / static_cast<double>(kx));
        const auto joint = joint_counts(ds, "X", parents);

        double prev_alpha = 0.25;
        auto prev = estimate_child_cpt(ds, "X", parents, {prev_alpha, 0});
        for (double alpha : {0.5, 1.0, 2.0, 8.0}) {
            const auto cur = estimate_child_cpt(ds, "X", parents, {alpha, 0});
            for (std::size_t r = 0; r < kp; ++r) {
                double s = 0.0;
                for (double p : cur.rows[r]) {
                    CHECK(p > 0.0);
                    s += p;
                }
                CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
                bool flat = true;
                for (std::size_t x = 1; x < kx; ++x) flat = flat && joint.counts[r * kx + x] == joint.counts[r * kx];
                if (flat) continue;
                CHECK(l1(cur.rows[r], uniform) < l1(prev.rows[r], uniform));
            }
            prev = cur;
            prev_alpha = alpha;
        }
        CHECK(prev_alpha == 8.0);
    }
}

TEST_CASE("property: refit error shrinks with sample size") {
    // mean L1 over rows with at least 20 samples, averaged over seeds
    const auto truth = bnkit::testing::devex_generator();
    std::vector<double> errors;
    for (std::size_t n : {1000u, 10000u, 100000u}) {
        double total = 0.0;
        std::size_t rows = 0;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const auto ds = forward_sample(truth, n, seed);
            const auto fitted = fit_network(truth.dag(), ds, {1.0, 0});
            for (std::size_t i = 0; i < truth.size(); ++i) {
                const auto& t = *truth.cpt_for(i);
                const auto& f = *fitted.cpt_for(*fitted.index_of(t.child));
                std::vector<std::size_t> cols;
                for (const auto& p : t.parents) cols.push_back(ds.require_index(p));
                std::vector<std::uint64_t> support(t.rows.size(), n);
                if (!cols.empty()) support = count_configurations(ds, cols).counts;
                for (std::size_t r = 0; r < t.rows.size(); ++r) {
                    if (support[r] < 20) continue;
                    total += l1(t.rows[r], f.rows[r]);
                    ++rows;
                }
            }
        }
        errors.push_back(total / static_cast<double>(rows));
    }
    CAPTURE(errors[0]);
    CAPTURE(errors[1]);
    CAPTURE(errors[2]);
    CHECK(errors[1] <= errors[0]);
    CHECK(errors[2] <= errors[1]);
    CHECK(errors[2] < 0.02);
}
