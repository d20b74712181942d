#include <algorithm>
#include <numeric>

#include "bnkit/error.hpp"
#include "bnkit/infer.hpp"
#include "bnkit/network_io.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace bnkit;
using bnkit::testing::max_abs_diff;

namespace {

Variable binary(const std::string& id) { return {id, id, {"0", "1"}, std::nullopt}; }

BayesianNetwork hand_chain() {
    Dag dag({"A", "B"});
    dag.add_edge("A", "B");
    return BayesianNetwork({binary("A"), binary("B")}, dag,
                           {Cpt{"A", {}, {{0.5, 0.5}}}, Cpt{"B", {"A"}, {{0.8, 0.2}, {0.1, 0.9}}}});
}

}  // namespace

TEST_CASE("chain marginals and the Bayes example") {
    const auto net = hand_chain();
    const auto prior = posterior_marginals(net, {});
    CHECK(prior.marginals.at("B")[0] == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(prior.marginals.at("B")[1] == doctest::Approx(0.55).epsilon(1e-12));

    const auto post = posterior_marginals(net, EvidenceQuery{{{"B", 1}}});
    CHECK(post.marginals.at("A")[1] == doctest::Approx(0.45 / 0.55).epsilon(1e-12));
    CHECK(post.marginals.at("A")[1] == doctest::Approx(0.8182).epsilon(1e-4));
    CHECK(post.marginals.at("B") == std::vector<double>{0.0, 1.0});
    CHECK(post.evidence.assignments.at("B") == 1);
}

TEST_CASE("joint probability examples") {
    CHECK(joint_probability(hand_chain(), {{"A", 1}, {"B", 1}}) == doctest::Approx(0.45));
    CHECK(joint_probability(hand_chain(), {{"A", 0}, {"B", 0}}) == doctest::Approx(0.4));

    const std::vector<Variable> vars{binary("X"), binary("Y"), binary("Z")};
    std::vector<Cpt> cpts;
    for (const auto& v : vars) cpts.push_back({v.id, {}, {{0.5, 0.5}}});
    const BayesianNetwork indep(vars, Dag({"X", "Y", "Z"}), cpts);
    CHECK(joint_probability(indep, {{"X", 1}, {"Y", 0}, {"Z", 1}}) == doctest::Approx(0.125));

    Dag dag({"A", "B"});
    dag.add_edge("A", "B");
    const BayesianNetwork zero({binary("A"), binary("B")}, dag,
                               {Cpt{"A", {}, {{0.5, 0.5}}}, Cpt{"B", {"A"}, {{1.0, 0.0}, {0.1, 0.9}}}});
    CHECK(joint_probability(zero, {{"A", 0}, {"B", 1}}) == 0.0);
}

TEST_CASE("evidence errors name the node") {
    const auto net = hand_chain();
    try {
        (void)posterior_marginals(net, EvidenceQuery{{{"Q", 0}}});
        FAIL("expected EvidenceError");
    } catch (const EvidenceError& e) {
        CHECK(e.field() == "Q");
    }
    try {
        (void)posterior_marginals(net, EvidenceQuery{{{"B", 2}}});
        FAIL("expected EvidenceError");
    } catch (const EvidenceError& e) {
        CHECK(e.field() == "B");
    }
}

TEST_CASE("zero-probability evidence") {
    Dag dag({"A", "B"});
    dag.add_edge("A", "B");
    const BayesianNetwork net({binary("A"), binary("B")}, dag,
                              {Cpt{"A", {}, {{1.0, 0.0}}}, Cpt{"B", {"A"}, {{1.0, 0.0}, {0.5, 0.5}}}});
    CHECK_THROWS_AS(posterior_marginals(net, EvidenceQuery{{{"B", 1}}}), ImpossibleEvidence);
    CHECK_THROWS_AS(brute_force_marginals(net, EvidenceQuery{{{"B", 1}}}), ImpossibleEvidence);
}

TEST_CASE("single node returns its prior") {
    const BayesianNetwork net({binary("X")}, Dag({"X"}), {Cpt{"X", {}, {{0.3, 0.7}}}});
    const auto m = posterior_marginals(net, {});
    CHECK(m.marginals.at("X")[1] == doctest::Approx(0.7));
    CHECK(max_abs_diff(m, brute_force_marginals(net, {})) < 1e-15);
}

TEST_CASE("deterministic chain pins the ancestors") {
    Dag dag({"A", "B", "C"});
    dag.add_edge("A", "B");
    dag.add_edge("B", "C");
    const std::vector<std::vector<double>> swap{{0.0, 1.0}, {1.0, 0.0}};
    const BayesianNetwork net({binary("A"), binary("B"), binary("C")}, dag,
                              {Cpt{"A", {}, {{0.4, 0.6}}}, Cpt{"B", {"A"}, swap}, Cpt{"C", {"B"}, swap}});
    const auto m = posterior_marginals(net, EvidenceQuery{{{"C", 0}}});
    CHECK(m.marginals.at("A") == std::vector<double>{1.0, 0.0});
    CHECK(m.marginals.at("B") == std::vector<double>{0.0, 1.0});
}

TEST_CASE("brute force refuses oversized joints") {
    const auto net = bnkit::testing::devex_generator();
    CHECK_THROWS_AS(brute_force_marginals(net, {}, 100), LimitError);
}

TEST_CASE("shipped chain model posterior") {
    const auto net = load_network(bnkit::testing::repo_path("tests/data/chain.json"));
    const auto m = posterior_marginals(net, EvidenceQuery{{{"B", 1}}});
    CHECK(m.marginals.at("A")[1] == doctest::Approx(0.8181818181818).epsilon(1e-12));
}

TEST_CASE("property: variable elimination agrees with enumeration") {
    Rng rng(808);
    for (int trial = 0; trial < 300; ++trial) {
        const auto net = bnkit::testing::random_network(rng);
        const auto ev = bnkit::testing::random_evidence(rng, net);
        const auto ve = posterior_marginals(net, ev);
        const auto bf = brute_force_marginals(net, ev);
        CHECK(max_abs_diff(ve, bf) < 1e-9);
        for (const auto& [id, dist] : ve.marginals) {
            CHECK(std::accumulate(dist.begin(), dist.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
            if (auto it = ev.assignments.find(id); it != ev.assignments.end()) CHECK(dist[it->second] == 1.0);
        }
    }
}

TEST_CASE("property: elimination order does not change the answer") {
    Rng rng(909);
    for (int trial = 0; trial < 200; ++trial) {
        const auto net = bnkit::testing::random_network(rng);
        const auto ev = bnkit::testing::random_evidence(rng, net);
        std::vector<std::size_t> order(net.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        CHECK(max_abs_diff(posterior_marginals(net, ev, order), posterior_marginals(net, ev)) < 1e-9);
    }
}

TEST_CASE("property: impossible evidence is detected consistently") {
    Rng rng(1010);
    bnkit::testing::RandomNetworkSpec spec;
    spec.alpha = 0.0;  // keep exact zeros
    int impossible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto net = bnkit::testing::random_network(rng, spec);
        const auto ev = bnkit::testing::arbitrary_evidence(rng, net);
        bool bf_impossible = false;
        MarginalsResult bf;
        try {
            bf = brute_force_marginals(net, ev);
        } catch (const ImpossibleEvidence&) {
            bf_impossible = true;
        }
        if (bf_impossible) {
            ++impossible;
            CHECK_THROWS_AS(posterior_marginals(net, ev), ImpossibleEvidence);
        } else {
            CHECK(max_abs_diff(posterior_marginals(net, ev), bf) < 1e-9);
        }
    }
    CHECK(impossible > 0);
}

TEST_CASE("property: queries do not mutate the network") {
    Rng rng(1111);
    const auto net = bnkit::testing::random_network(rng);
    const auto copy = net;
    for (int i = 0; i < 20; ++i) (void)posterior_marginals(net, bnkit::testing::random_evidence(rng, net));
    CHECK(net == copy);
}
