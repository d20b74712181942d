#include <algorithm>

#include "bnkit/elicit.hpp"
#include "bnkit/error.hpp"
#include "bnkit/network_io.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace bnkit;

namespace {

const Edge kAB{"A", "B"};

std::vector<ElicitationResponse> ratings(std::initializer_list<Rating> rs, const Edge& e = kAB) {
    std::vector<ElicitationResponse> out;
    for (auto r : rs) out.push_back({e, r});
    return out;
}

Dag abc() {
    Dag dag({"A", "B", "C"});
    dag.add_edge("A", "B", EdgeTag::CauseConsequence);
    dag.add_edge("B", "C", EdgeTag::DefinitionSynthesis);
    return dag;
}

}  // namespace

TEST_CASE("score examples") {
    CHECK(score_relationship(ratings({Rating::Strong, Rating::Strong, Rating::Strong})) == 1.0);
    CHECK(score_relationship(ratings({Rating::Strong, Rating::Moderate, Rating::Weak, Rating::NotSure})) ==
          doctest::Approx(0.5));
    std::vector<ElicitationResponse> unsure(8, {kAB, Rating::NotSure});
    CHECK(score_relationship(unsure) == 0.0);
}

TEST_CASE("not-sure exclusion changes the denominator") {
    ElicitationConfig cfg;
    cfg.exclude_not_sure = true;
    CHECK(score_relationship(ratings({Rating::Strong, Rating::Weak, Rating::NotSure, Rating::NotSure}), cfg) ==
          doctest::Approx(0.6));
    std::vector<ElicitationResponse> unsure(3, {kAB, Rating::NotSure});
    CHECK(score_relationship(unsure, cfg) == 0.0);
}

TEST_CASE("score errors") {
    CHECK_THROWS_AS(score_relationship({}), Error);
    std::vector<ElicitationResponse> mixed{{kAB, Rating::Strong}, {{"B", "C"}, Rating::Strong}};
    CHECK_THROWS_AS(score_relationship(mixed), Error);
    ElicitationConfig bad;
    bad.threshold = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    ElicitationConfig neg;
    neg.weights[Rating::Weak] = -0.1;
    CHECK_THROWS_AS(neg.validate(), Error);
}

TEST_CASE("threshold is inclusive") {
    const std::map<Edge, double> scores{{{"A", "B"}, 0.70}, {{"A", "C"}, 0.69}};
    const auto r = apply_threshold(scores);
    CHECK(r.retained == std::set<Edge>{{"A", "B"}});
    CHECK(r.removed == std::set<Edge>{{"A", "C"}});

    const auto empty = apply_threshold({});
    CHECK(empty.retained.empty());
    CHECK(empty.removed.empty());

    const auto all = apply_threshold({{{"A", "B"}, 1.0}, {{"B", "C"}, 1.0}});
    CHECK(all.retained.size() == 2);
    CHECK(all.removed.empty());
}

TEST_CASE("a mean of exactly seven tenths survives rounding") {
    std::vector<ElicitationResponse> rs(7, {kAB, Rating::Strong});
    rs.insert(rs.end(), 3, {kAB, Rating::None});
    const auto scores = score_all(rs);
    CHECK(apply_threshold(scores).retained.count(kAB) == 1);
}

TEST_CASE("merge examples") {
    const auto merged = merge_structures(abc(), {}, {{"B", "C"}}, {{"A", "C"}});
    CHECK(merged.edge_list() == std::vector<Edge>{{"A", "B"}, {"A", "C"}});
    CHECK(merged.tag({"A", "B"}) == EdgeTag::CauseConsequence);
    CHECK(merged.tag({"A", "C"}) == EdgeTag::ExpertAdded);

    try {
        (void)merge_structures(abc(), {}, {}, {{"C", "A"}});
        FAIL("expected CycleError");
    } catch (const CycleError& e) {
        CHECK(e.cycle().size() == 3);
    }

    CHECK(merge_structures(abc(), {}, {}, {}) == abc());
    CHECK(merge_structures(abc(), {{"A", "B"}}, {}, {}) == abc());
    CHECK_THROWS_AS(merge_structures(abc(), {{"A", "B"}}, {{"A", "B"}}, {}), ConstraintError);
    CHECK_THROWS_AS(merge_structures(abc(), {}, {}, {{"A", "Q"}}), ModelError);
    CHECK_THROWS_AS(merge_structures(abc(), {}, {}, {{"A", "A"}}), ModelError);
}

TEST_CASE("rating parser") {
    CHECK(parse_rating("Strong") == Rating::Strong);
    CHECK(parse_rating("MODERATE") == Rating::Moderate);
    CHECK(parse_rating(" weak ") == Rating::Weak);
    CHECK(parse_rating("none") == Rating::None);
    for (const char* s : {"not sure", "Not_Sure", "notsure", "no opinion", "Not sure/No opinion"}) {
        CHECK(parse_rating(s) == Rating::NotSure);
    }
    CHECK_FALSE(parse_rating("maybe").has_value());
    for (auto r : {Rating::Strong, Rating::Moderate, Rating::Weak, Rating::None, Rating::NotSure}) {
        CHECK(parse_rating(to_string(r)) == r);
    }
}

TEST_CASE("response csv") {
    const auto rs = parse_elicitation_csv("cause,effect,rating\nA,B,strong\nB,C,not sure\n");
    REQUIRE(rs.size() == 2);
    CHECK(rs[1] == ElicitationResponse{{"B", "C"}, Rating::NotSure});
    CHECK(parse_elicitation_csv("A,B,weak\n").size() == 1);
    CHECK_THROWS_WITH_AS(parse_elicitation_csv("A,B,weak\nA,B\n"), doctest::Contains("line 2"), DataError);
    CHECK_THROWS_WITH_AS(parse_elicitation_csv("A,B,sometimes\n"), doctest::Contains("line 1"), DataError);
}

TEST_CASE("shipped elicitation file applies to the devex structure") {
    const auto rs = parse_elicitation_csv(read_text_file(bnkit::testing::repo_path("data/devex_elicitation.csv")));
    const auto base = load_structure(bnkit::testing::repo_path("data/devex_structure.json"));
    const auto t = apply_threshold(score_all(rs));
    CHECK(t.retained.size() + t.removed.size() == score_all(rs).size());
    std::set<Edge> removed_in_base;
    for (const auto& e : t.removed) {
        if (base.dag.has_edge(e)) removed_in_base.insert(e);
    }
    const auto merged = merge_structures(base.dag, t.retained, removed_in_base, {});
    CHECK_FALSE(find_cycle(merged).has_value());
    for (const auto& e : t.retained) CHECK(merged.has_edge(e));
    for (const auto& e : removed_in_base) CHECK_FALSE(merged.has_edge(e));
}

// Properties.

TEST_CASE("property: scores ignore response order and stay in [0, 1]") {
    Rng rng(1717);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<ElicitationResponse> rs;
        const std::size_t n = 1 + rng.below(15);
        for (std::size_t i = 0; i < n; ++i) rs.push_back({kAB, static_cast<Rating>(rng.below(5))});
        const double s = score_relationship(rs);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        auto shuffled = rs;
        for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
        CHECK(score_relationship(shuffled) == doctest::Approx(s).epsilon(1e-15));
    }
}

TEST_CASE("property: upgrading a rating never lowers the score") {
    Rng rng(1818);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<ElicitationResponse> rs;
        const std::size_t n = 1 + rng.below(12);
        for (std::size_t i = 0; i < n; ++i) rs.push_back({kAB, static_cast<Rating>(rng.below(4))});
        const double before = score_relationship(rs);
        auto& pick = rs[rng.below(n)];
        if (pick.rating == Rating::Strong) continue;
        pick.rating = static_cast<Rating>(static_cast<int>(pick.rating) - 1);
        CHECK(score_relationship(rs) >= before);
    }
}

TEST_CASE("property: merges stay acyclic or throw") {
    Rng rng(1919);
    for (int trial = 0; trial < 200; ++trial) {
        const auto ids = bnkit::testing::node_ids(2 + rng.below(6));
        const Dag base = bnkit::testing::random_dag(rng, ids, 0.4, 3);
        std::set<Edge> additions;
        for (int k = 0; k < 3; ++k) {
            const auto& a = ids[rng.below(ids.size())];
            const auto& b = ids[rng.below(ids.size())];
            if (a != b) additions.insert({a, b});
        }
        try {
            const auto merged = merge_structures(base, {}, {}, additions);
            CHECK_FALSE(find_cycle(merged).has_value());
            for (const auto& e : additions) CHECK(merged.has_edge(e));
            for (const auto& e : base.edge_list()) CHECK(merged.has_edge(e));
        } catch (const CycleError&) {
            Dag all = base;
            for (const auto& e : additions) {
                if (!all.has_edge(e)) all.add_edge(e.from, e.to);
            }
            CHECK(find_cycle(all).has_value());
        }
    }
}
