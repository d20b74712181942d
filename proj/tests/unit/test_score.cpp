#include <cmath>

#include "bnkit/error.hpp"
#include "bnkit/estimate.hpp"
#include "bnkit/learn.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace bnkit;

namespace {

Variable var(const std::string& id, std::size_t k) {
    Variable v{id, id, {}, std::nullopt};
    for (std::size_t s = 0; s < k; ++s) v.states.push_back("s" + std::to_string(s));
    return v;
}

Dag complete_dag(const std::vector<std::string>& order) {
    Dag dag(order);
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) dag.add_edge(order[i], order[j]);
    }
    return dag;
}

}  // namespace

TEST_CASE("closed forms for one balanced binary node") {
    std::vector<std::int32_t> cells(50, 0);
    cells.insert(cells.end(), 50, 1);
    const Dataset ds({var("X", 2)}, cells);
    const Dag dag({"X"});
    CHECK(log_likelihood(dag, ds) == doctest::Approx(-69.3147).epsilon(1e-6));
    const auto r = bic_score(dag, ds);
    CHECK(r.bic == doctest::Approx(143.2346).epsilon(1e-6));
    CHECK(r.parameter_count == 1);
    CHECK(r.n == 100);
    CHECK(r.bic == doctest::Approx(-2.0 * r.log_likelihood + std::log(100.0)));
}

TEST_CASE("deterministic data has zero log likelihood") {
    const Dataset ds({var("X", 3)}, std::vector<std::int32_t>(40, 0));
    CHECK(log_likelihood(Dag({"X"}), ds) == 0.0);
}

TEST_CASE("scoring needs complete records") {
    const Dataset ds({var("X", 2), var("Y", 2)}, {0, kMissing, kMissing, 1});
    CHECK_THROWS_AS(bic_score(Dag({"X", "Y"}), ds), DataError);
}

TEST_CASE("identical input gives identical reports") {
    const auto ds = forward_sample(bnkit::testing::chain_network(), 2000, 3);
    Dag dag({"A", "B", "C"});
    dag.add_edge("A", "B");
    const auto a = bic_score(dag, ds, Provenance::Hc);
    const auto b = bic_score(dag, ds, Provenance::Hc);
    CHECK(report_to_json(a) == report_to_json(b));
    const auto doc = report_to_json(a);
    CHECK(doc.at("provenance") == "hc");
    for (const char* key : {"bic", "log_likelihood", "k", "n", "config"}) CHECK(doc.contains(key));
}

TEST_CASE("ranking puts the true dag ahead of the empty one") {
    const auto truth = bnkit::testing::chain_network();
    const auto ds = forward_sample(truth, 5000, 21);
    const auto ranked =
        compare_structures({{Dag(truth.dag().nodes()), Provenance::Manual}, {truth.dag(), Provenance::Expert}}, ds);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].provenance == Provenance::Expert);
    CHECK(ranked[0].bic < ranked[1].bic);

    CHECK(compare_structures({{truth.dag(), Provenance::Pc}}, ds).size() == 1);

    const auto tied = compare_structures({{truth.dag(), Provenance::Pc}, {truth.dag(), Provenance::Hc}}, ds);
    CHECK(tied[0].bic == tied[1].bic);
    CHECK(tied[0].provenance == Provenance::Hc);
    CHECK(tied[1].provenance == Provenance::Pc);
}

TEST_CASE("sparse truth beats the complete dag") {
    const auto truth = bnkit::testing::devex_generator();
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto ds = forward_sample(truth, 10000, seed);
        CHECK(bic_score(truth.dag(), ds).bic < bic_score(complete_dag(truth.dag().nodes()), ds).bic);
    }
}

TEST_CASE("provenance text") {
    for (auto p : {Provenance::Expert, Provenance::Hc, Provenance::Pc, Provenance::Manual}) {
        CHECK(parse_provenance(to_string(p)) == p);
    }
    CHECK_FALSE(parse_provenance("gs").has_value());
}

TEST_CASE("constraint checks") {
    const std::vector<std::string> nodes{"A", "B", "C"};
    CHECK_NOTHROW(check_constraints({{{"A", "B"}}, {{"B", "C"}}}, nodes));
    CHECK_THROWS_AS(check_constraints({{{"A", "B"}}, {{"A", "B"}}}, nodes), ConstraintError);
    CHECK_THROWS_AS(check_constraints({{{"A", "Z"}}, {}}, nodes), ConstraintError);
    CHECK_THROWS_AS(check_constraints({{{"A", "B"}, {"B", "A"}}, {}}, nodes), ConstraintError);
}

TEST_CASE("chi-square: copied column is decisively dependent") {
    Rng rng(31);
    std::vector<std::int32_t> cells;
    for (int i = 0; i < 1000; ++i) {
        const auto x = static_cast<std::int32_t>(rng.below(2));
        cells.insert(cells.end(), {x, x});
    }
    const Dataset ds({var("X", 2), var("Y", 2)}, cells);
    const auto r = chi_square_ci_test(ds, "X", "Y", {});
    CHECK(r.testable);
    CHECK(r.p_value < 1e-6);
    CHECK(r.statistic == doctest::Approx(1000.0).epsilon(1e-9));
    CHECK(r.degrees_of_freedom == 1.0);
}

TEST_CASE("chi-square: too little data is untestable") {
    const Dataset ds({var("X", 3), var("Y", 3), var("Z", 3)}, {0, 1, 2, 1, 2, 0, 2, 0, 1});
    const auto r = chi_square_ci_test(ds, "X", "Y", {"Z"});
    CHECK_FALSE(r.testable);
    CHECK(r.p_value == 1.0);
}

TEST_CASE("chi-square: conditioning on the middle of a chain removes dependence") {
    const auto ds = forward_sample(bnkit::testing::chain_network(), 10000, 8);
    CHECK(chi_square_ci_test(ds, "A", "C", {}).p_value < 1e-6);
    CHECK(chi_square_ci_test(ds, "A", "C", {"B"}).p_value > 0.001);
}

TEST_CASE("chi-square: calibrated under independence") {
    const std::vector<Variable> vars{var("X", 2), var("Y", 2)};
    Rng rng(4242);
    int rejections = 0;
    int below_half = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        const auto ds = bnkit::testing::random_dataset(rng, vars, 10000, 0.0);
        const double p = chi_square_ci_test(ds, "X", "Y", {}).p_value;
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        rejections += p < 0.05;
        below_half += p < 0.5;
    }
    const double rate = rejections / static_cast<double>(trials);
    CAPTURE(rate);
    CHECK(rate > 0.029);
    CHECK(rate < 0.071);
    const double half = below_half / static_cast<double>(trials);
    CHECK(std::abs(half - 0.5) < 0.05);
}

TEST_CASE("property: adding an edge never lowers the log likelihood") {
    Rng rng(1212);
    for (int trial = 0; trial < 150; ++trial) {
        const auto net = bnkit::testing::random_network(rng);
        if (net.size() < 2) continue;
        const auto ds = forward_sample(net, 300, rng.next());
        const auto ids = net.dag().nodes();
        Dag base(ids);
        const auto order = topological_order(net.dag());
        // add edges of the complete dag one at a time
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t j = i + 1; j < order.size(); ++j) {
                const double before = log_likelihood(base, ds);
                base.add_edge(order[i], order[j]);
                CHECK(log_likelihood(base, ds) >= before - 1e-9);
            }
        }
    }
}

TEST_CASE("property: log likelihood decomposes into family terms") {
    Rng rng(1313);
    for (int trial = 0; trial < 150; ++trial) {
        const auto net = bnkit::testing::random_network(rng);
        const auto ds = forward_sample(net, 200, rng.next());
        FamilyScorer scorer(ds);
        double total = 0.0;
        for (std::size_t i = 0; i < net.size(); ++i) {
            std::vector<std::size_t> parents;
            for (const auto& p : net.dag().parents(net.variable(i).id)) parents.push_back(ds.require_index(p));
            total += scorer.family_log_likelihood(ds.require_index(net.variable(i).id), parents);
        }
        CHECK(total == doctest::Approx(log_likelihood(net.dag(), ds)).epsilon(1e-12));
    }
}
