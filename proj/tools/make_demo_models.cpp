// Regenerates the shipped demo artifacts under a repository root:
//   models/devex.json, models/delivery.json      served demo models
//   data/*_structure.json, data/*_survey.csv     inputs for fit / learn
//   data/devex_elicitation.csv                   expert ratings for elicit
//   tests/data/chain.json                        two-node reference model
//
// Survey data is forward-sampled from ordinal generator networks with a small
// share of blanked answers; the demo models are then fitted from that data.

#include <cstdio>
#include <filesystem>

#include "bnkit/error.hpp"
#include "bnkit/estimate.hpp"
#include "bnkit/network_io.hpp"
#include "bnkit/rng.hpp"
#include "bnkit/synth.hpp"

namespace fs = std::filesystem;
using namespace bnkit;

namespace {

Variable var(std::string id, std::string label, std::vector<std::string> states, double x, double y) {
    return Variable{std::move(id), std::move(label), std::move(states), Position{x, y}};
}

Dataset with_missing(const Dataset& ds, double rate, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::int32_t> cells = ds.cells();
    for (auto& c : cells) {
        if (rng.uniform() < rate) c = kMissing;
    }
    return Dataset(ds.variables(), std::move(cells));
}

struct Demo {
    std::vector<Variable> variables;
    Dag dag;
    NetworkMetadata metadata;
};

Demo devex() {
    Demo d;
    d.variables = {
        var("code_understanding", "The code I work on is easy to understand", {"disagree", "neutral", "agree"}, 0, 0),
        var("environment_performance", "My development environment performs well", {"disagree", "neutral", "agree"}, 0, 1),
        var("focus_without_distraction", "I can focus on my work without distraction", {"rarely", "sometimes", "often"}, 0, 2),
        var("meaningful_work", "My work is meaningful", {"disagree", "neutral", "agree"}, 1, 3),
        var("time_lost_to_obstacles", "Time lost to obstacles in a typical week", {"high", "moderate", "low"}, 1, 1),
        var("developer_happiness", "I am happy in my work", {"unhappy", "neutral", "happy"}, 2, 2),
    };
    std::vector<std::string> ids;
    for (const auto& v : d.variables) ids.push_back(v.id);
    d.dag = Dag(ids);
    for (const auto* p : {"focus_without_distraction", "environment_performance", "code_understanding"}) {
        d.dag.add_edge(p, "time_lost_to_obstacles", EdgeTag::CauseConsequence);
    }
    d.dag.add_edge("time_lost_to_obstacles", "developer_happiness", EdgeTag::CauseConsequence);
    d.dag.add_edge("meaningful_work", "developer_happiness", EdgeTag::CauseConsequence);
    d.metadata = {"devex", "Developer experience",
                  "Factors shaping developer happiness. Probabilities are fitted to synthetic survey data.",
                  "synthetic"};
    return d;
}

Demo delivery() {
    Demo d;
    d.variables = {
        var("continuous_integration", "Changes are integrated and built continuously", {"rarely", "sometimes", "always"}, 0, 0),
        var("code_review_speed", "Code reviews are completed quickly", {"slow", "moderate", "fast"}, 0, 1),
        var("automated_testing", "Automated test coverage", {"low", "medium", "high"}, 0, 2),
        var("tech_debt_impact", "Technical debt did not significantly impact new work", {"disagree", "neutral", "agree"}, 0, 3),
        var("deployment_frequency", "How often the team deploys", {"monthly", "weekly", "daily"}, 1, 0),
        var("change_lead_time", "Time from commit to production", {"over_a_week", "days", "under_a_day"}, 1, 1),
        var("failed_deployment_recovery_time", "Time to recover from a failed deployment", {"over_a_day", "hours", "under_an_hour"}, 1, 2),
        var("change_failure_rate", "Share of changes that fail in production", {"high", "medium", "low"}, 1, 3),
        var("throughput", "Delivery throughput", {"low", "medium", "high"}, 2, 1),
        var("stability", "Delivery stability", {"low", "medium", "high"}, 2, 3),
    };
    std::vector<std::string> ids;
    for (const auto& v : d.variables) ids.push_back(v.id);
    d.dag = Dag(ids);
    const auto cc = EdgeTag::CauseConsequence;
    const auto ds = EdgeTag::DefinitionSynthesis;
    d.dag.add_edge("continuous_integration", "deployment_frequency", cc);
    d.dag.add_edge("continuous_integration", "change_lead_time", cc);
    d.dag.add_edge("code_review_speed", "change_lead_time", cc);
    d.dag.add_edge("automated_testing", "change_failure_rate", cc);
    d.dag.add_edge("tech_debt_impact", "change_failure_rate", cc);
    d.dag.add_edge("automated_testing", "failed_deployment_recovery_time", cc);
    d.dag.add_edge("change_lead_time", "throughput", ds);
    d.dag.add_edge("deployment_frequency", "throughput", ds);
    d.dag.add_edge("failed_deployment_recovery_time", "throughput", ds);
    d.dag.add_edge("change_failure_rate", "stability", ds);
    d.metadata = {"delivery", "Software delivery performance",
                  "Throughput and stability built on the four delivery metrics. Probabilities are fitted to "
                  "synthetic survey data.",
                  "synthetic"};
    return d;
}

void build(const fs::path& root, const Demo& demo, std::uint64_t seed) {
    const BayesianNetwork truth = ordinal_network(demo.variables, demo.dag, 1.5, demo.metadata);
    const Dataset survey = with_missing(forward_sample(truth, 2000, seed), 0.02, seed + 1);
    const std::string stem = demo.metadata.id;

    write_text_file(root / "data" / (stem + "_survey.csv"), write_survey_csv(survey));
    Structure structure{demo.variables, demo.dag, demo.metadata};
    write_text_file(root / "data" / (stem + "_structure.json"), serialize_structure(structure));

    const BayesianNetwork fitted = fit_network(demo.dag, survey, EstimationConfig{}, demo.metadata);
    save_network(fitted, root / "models" / (stem + ".json"));
    std::printf("%s: %zu nodes, %zu edges, %zu survey rows\n", stem.c_str(), fitted.size(),
                fitted.dag().edges().size(), survey.n_total());
}

void write_elicitation(const fs::path& root) {
    // Eight experts rating the five base edges plus two hypothesised ones.
    struct Row {
        const char* cause;
        const char* effect;
        const char* ratings[8];
    };
    const Row rows[] = {
        {"focus_without_distraction", "time_lost_to_obstacles",
         {"Strong", "Strong", "Moderate", "Strong", "Moderate", "Strong", "Strong", "Moderate"}},
        {"environment_performance", "time_lost_to_obstacles",
         {"Strong", "Moderate", "Strong", "Strong", "Strong", "Moderate", "Not sure", "Strong"}},
        {"code_understanding", "time_lost_to_obstacles",
         {"Moderate", "Moderate", "Strong", "Moderate", "Weak", "Strong", "Moderate", "Strong"}},
        {"time_lost_to_obstacles", "developer_happiness",
         {"Strong", "Strong", "Strong", "Moderate", "Strong", "Strong", "Moderate", "Strong"}},
        {"meaningful_work", "developer_happiness",
         {"Strong", "Moderate", "Strong", "Strong", "Moderate", "Moderate", "Strong", "Strong"}},
        {"meaningful_work", "focus_without_distraction",
         {"Weak", "Moderate", "None", "Not sure", "Strong", "Weak", "Not sure", "Moderate"}},
        {"code_understanding", "developer_happiness",
         {"Weak", "None", "Weak", "Moderate", "Not sure", "Weak", "None", "Weak"}},
    };
    std::string csv = "cause,effect,rating\n";
    for (const auto& r : rows) {
        for (const auto* rating : r.ratings) csv += std::string(r.cause) + "," + r.effect + "," + rating + "\n";
    }
    write_text_file(root / "data" / "devex_elicitation.csv", csv);
}

void write_chain(const fs::path& root) {
    std::vector<Variable> vars = {Variable{"A", "A", {"a0", "a1"}, std::nullopt},
                                  Variable{"B", "B", {"b0", "b1"}, std::nullopt}};
    Dag dag({"A", "B"});
    dag.add_edge("A", "B", EdgeTag::CauseConsequence);
    std::vector<Cpt> cpts = {Cpt{"A", {}, {{0.5, 0.5}}}, Cpt{"B", {"A"}, {{0.8, 0.2}, {0.1, 0.9}}}};
    BayesianNetwork net(std::move(vars), std::move(dag), std::move(cpts),
                        NetworkMetadata{"chain", "Two-node chain", "Reference model with hand-computable posteriors.",
                                        "hand-written"});
    require_valid(net);
    save_network(net, root / "tests" / "data" / "chain.json");
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::current_path();
    try {
        for (const auto* dir : {"models", "data", "tests/data"}) fs::create_directories(root / dir);
        build(root, devex(), 2024);
        build(root, delivery(), 4048);
        write_elicitation(root);
        write_chain(root);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
