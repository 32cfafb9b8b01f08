#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "filterlr/csv.hpp"
#include "filterlr/evaluation.hpp"
#include "filterlr/model_io.hpp"
#include "filterlr/pipeline.hpp"
#include "filterlr/risk_score.hpp"
#include "filterlr/rng.hpp"
#include "filterlr/study.hpp"
#include "json.hpp"

using namespace filterlr;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "filterlr_cli_test";

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FILTERLR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string out(const std::string& rel) { return (kWork / rel).string(); }

struct Workspace {
    Workspace() {
        fs::remove_all(kWork);
        fs::create_directories(kWork);
    }
    ~Workspace() { fs::remove_all(kWork); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("commands reproduce the library") {
    Workspace ws;
    REQUIRE(run_cli("simulate --design table2 --emit-dataset --n 150 --seed 5 -o " + out("sim")) == 0);
    const Dataset data = load_csv(out("sim/dataset.csv"), "y");
    {
        SimDesign d = preset_plan("table2", 50, 5, 1).configs.front().design;
        d.n = 150;
        Rng rng(derive_seed(5, 150, 0));
        CHECK(simulate_dataset(d, rng) == data);
    }

    REQUIRE(run_cli("--seed 3 thresholds --data " + out("sim/dataset.csv") + " --bags 20 --k 2 -o " + out("th")) == 0);
    PipelineConfig pc;
    pc.bagging.n_bags = 20;
    pc.bagging.rng_seed = derive_seed(3, 1);
    pc.bagging.max_depth_per_bag = kKMeansSplitsPerBag;
    pc.aggregation = Aggregation::kmeans(2);
    const auto thresholds = estimate_thresholds(data, pc);
    CHECK(read_text(out("th/thresholds.json")) == thresholds_to_json(thresholds.thresholds));

    REQUIRE(run_cli("fit --data " + out("sim/dataset.csv") + " --thresholds " + out("th/thresholds.json") +
                    " --lambda 0.01 -o " + out("fixed")) == 0);
    SolverConfig solver;
    solver.lambda = 0.01;
    const FilterModel fixed = fit_model(data, thresholds.thresholds, solver);
    CHECK(read_text(out("fixed/model.json")) == model_to_json(fixed));

    REQUIRE(run_cli("--seed 3 fit --data " + out("sim/dataset.csv") + " --thresholds " + out("th/thresholds.json") +
                    " --rule 1se --n-lambdas 20 -o " + out("cv")) == 0);
    CvConfig cv;
    cv.n_lambdas = 20;
    cv.rule = SelectionRule::OneSe;
    cv.rng_seed = derive_seed(3, 2);
    const auto r = fit_with_thresholds(data, thresholds, cv);
    CHECK(read_text(out("cv/model.json")) == model_to_json(r.model));
    CHECK(read_text(out("cv/cv_curve.csv")) == cv_curve_csv(r.cv));

    REQUIRE(run_cli("predict --model " + out("cv/model.json") + " --data " + out("sim/dataset.csv") + " -o " +
                    out("pred")) == 0);
    const auto rows = csv::parse(read_text(out("pred/predictions.csv")));
    const auto prob = predict_proba(r.model, data);
    REQUIRE(rows.size() == data.n() + 1);
    CHECK(rows[0] == csv::Row{"row", "linear_predictor", "probability", "class"});
    for (std::size_t i = 0; i < data.n(); ++i) CHECK(std::strtod(rows[i + 1][2].c_str(), nullptr) == prob[i]);

    REQUIRE(run_cli("evaluate --model " + out("cv/model.json") + " --data " + out("sim/dataset.csv") + " -o " +
                    out("ev")) == 0);
    CHECK(read_text(out("ev/eval_report.csv")) == eval_report_csv(evaluate(prob, data.labels())));

    REQUIRE(run_cli("riskscore --model " + out("cv/model.json") + " -o " + out("rs")) == 0);
    CHECK(read_text(out("rs/risk_table.csv")) == risk_table_csv(build_table(r.model)));

    const auto manifest = nlohmann::json::parse(read_text(out("cv/run-manifest.json")));
    CHECK(manifest.at("command") == "fit");
    CHECK(manifest.at("seed") == 3);
    CHECK(manifest.at("outputs").size() == 2);
    CHECK(manifest.at("inputs").size() == 2);
}

TEST_CASE("config files and flag precedence") {
    Workspace ws;
    REQUIRE(run_cli("simulate --design table1 --emit-dataset --n 120 --seed 2 -o " + out("sim")) == 0);
    write_text(out("cfg.json"), R"({"bags": 15, "k": 1, "seed": 9})");
    REQUIRE(run_cli("--config " + out("cfg.json") + " thresholds --data " + out("sim/dataset.csv") + " -o " +
                    out("a")) == 0);
    REQUIRE(run_cli("--seed 9 thresholds --bags 15 --data " + out("sim/dataset.csv") + " -o " + out("b")) == 0);
    CHECK(read_text(out("a/thresholds.json")) == read_text(out("b/thresholds.json")));
    REQUIRE(run_cli("--config " + out("cfg.json") + " thresholds --bags 40 --data " + out("sim/dataset.csv") +
                    " -o " + out("c")) == 0);
    const auto m = nlohmann::json::parse(read_text(out("c/run-manifest.json")));
    CHECK(m.at("config").at("bags") == 40);
}

TEST_CASE("exit codes") {
    Workspace ws;
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("--version") == 0);
    CHECK(run_cli("") == 1);
    CHECK(run_cli("fit --data") == 1);
    CHECK(run_cli("fit --bogus 1 --data x.csv") == 1);
    CHECK(run_cli("thresholds --data " + out("missing.csv")) == 1);
    write_text(out("bad.json"), "{\"format\": \"nope\"}");
    write_text(out("d.csv"), "x,y\n1,0\n2,1\n");
    CHECK(run_cli("predict --model " + out("bad.json") + " --data " + out("d.csv") + " -o " + out("p")) == 1);
    CHECK(run_cli("simulate --design table9") == 1);
    CHECK(run_cli("--config " + out("missing.json") + " thresholds --data " + out("d.csv")) == 1);
}

}
