#include <set>

#include "filterlr/error.hpp"
#include "filterlr/study.hpp"
#include "json.hpp"

namespace filterlr {

namespace {

using nlohmann::json;

const std::set<std::string> kKeys = {
    "name", "preset", "family", "n", "p", "p0", "rho", "reps", "seed", "train_fraction", "bags",
    "aggregation", "k", "splits_per_bag", "criterion", "folds", "rule", "metric", "cart", "bagged_cart",
};

template <class T>
void set_if(const json& doc, const char* key, T& target) {
    if (doc.contains(key)) target = doc.at(key).get<T>();
}

}  // namespace

StudyPlan plan_from_json(const std::string& text, unsigned threads, int default_reps, std::uint64_t default_seed) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("study config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("study config: expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (!kKeys.contains(key)) throw ValidationError("study config: unknown key '" + key + "'");
    }

    try {
        const int reps = doc.value("reps", default_reps);
        const std::uint64_t seed = doc.value("seed", default_seed);
        StudyPlan plan = preset_plan(doc.value("preset", std::string("table1")), reps, seed, threads);
        set_if(doc, "name", plan.name);

        std::vector<std::size_t> grid;
        if (doc.contains("n")) {
            const json& n = doc.at("n");
            if (n.is_array()) {
                grid = n.get<std::vector<std::size_t>>();
            } else {
                grid.push_back(n.get<std::size_t>());
            }
            if (grid.empty()) throw ValidationError("study config: \"n\" is empty");
        }

        StudyConfig base = plan.configs.front();
        SimDesign& d = base.design;
        if (doc.contains("family")) d.family = parse_family(doc.at("family").get<std::string>());
        set_if(doc, "p", d.p);
        set_if(doc, "p0", d.p0);
        set_if(doc, "rho", d.rho);
        set_if(doc, "train_fraction", d.train_fraction);

        PipelineConfig& pc = base.pipeline;
        set_if(doc, "bags", pc.bagging.n_bags);
        set_if(doc, "splits_per_bag", pc.bagging.max_depth_per_bag);
        if (doc.contains("aggregation")) {
            const auto mode = doc.at("aggregation").get<std::string>();
            if (mode == "mean") {
                pc.aggregation = Aggregation::mean();
            } else if (mode == "kmeans") {
                pc.aggregation = Aggregation::kmeans(doc.value("k", 6));
            } else {
                throw ValidationError("study config: aggregation must be \"mean\" or \"kmeans\"");
            }
        } else if (doc.contains("k")) {
            pc.aggregation = Aggregation::kmeans(doc.at("k").get<int>());
        }
        if (doc.contains("criterion")) pc.criterion = parse_criterion(doc.at("criterion").get<std::string>());
        set_if(doc, "folds", pc.cv.n_folds);
        if (doc.contains("rule")) pc.cv.rule = parse_rule(doc.at("rule").get<std::string>());
        if (doc.contains("metric")) pc.cv.metric = parse_metric(doc.at("metric").get<std::string>());
        set_if(doc, "cart", base.run_cart);
        set_if(doc, "bagged_cart", base.run_bagged_cart);

        if (grid.empty()) {
            for (const auto& c : plan.configs) grid.push_back(c.design.n);
        }
        plan.configs.clear();
        for (std::size_t n : grid) {
            StudyConfig c = base;
            c.design.n = n;
            c.design.validate();
            plan.configs.push_back(c);
        }
        return plan;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("study config: ") + e.what());
    }
}

std::string plan_to_json(const StudyPlan& plan) {
    json configs = json::array();
    for (const auto& c : plan.configs) {
        const auto& d = c.design;
        const auto& pc = c.pipeline;
        configs.push_back({
            {"family", to_string(d.family)},
            {"n", d.n},
            {"p", d.p},
            {"p0", d.p0},
            {"rho", d.rho},
            {"reps", d.n_reps},
            {"seed", d.rng_seed},
            {"train_fraction", d.train_fraction},
            {"bags", pc.bagging.n_bags},
            {"splits_per_bag", pc.bagging.max_depth_per_bag},
            {"aggregation", pc.aggregation.mode == Aggregation::Mode::Mean ? "mean" : "kmeans"},
            {"k", pc.aggregation.k},
            {"criterion", to_string(pc.criterion)},
            {"folds", pc.cv.n_folds},
            {"rule", to_string(pc.cv.rule)},
            {"metric", to_string(pc.cv.metric)},
            {"cart", c.run_cart},
            {"bagged_cart", c.run_bagged_cart},
        });
    }
    return json{{"name", plan.name}, {"configs", configs}}.dump(2);
}

}  // namespace filterlr
