#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "filterlr/csv.hpp"
#include "filterlr/dataset.hpp"
#include "filterlr/error.hpp"
#include "filterlr/evaluation.hpp"
#include "filterlr/model_io.hpp"
#include "filterlr/pipeline.hpp"
#include "filterlr/risk_score.hpp"
#include "filterlr/rng.hpp"
#include "filterlr/simulation.hpp"
#include "filterlr/study.hpp"

namespace filterlr::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Run::Run(std::string command, const GlobalOptions& global) : command_(std::move(command)), global_(global) {
    std::error_code ec;
    fs::create_directories(global_.output_dir, ec);
    if (ec) throw RuntimeError("cannot create output directory '" + global_.output_dir + "': " + ec.message());
}

std::string Run::read_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open input file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    inputs_.push_back({{"path", path.generic_string()}, {"bytes", text.size()}, {"fnv1a64", hex64(fnv1a64(text))}});
    log("read " + path.string());
    return text;
}

void Run::write_output(const std::string& name, const std::string& content) {
    write_text(fs::path(global_.output_dir) / name, content);
    outputs_.push_back({{"file", name}, {"bytes", content.size()}, {"fnv1a64", hex64(fnv1a64(content))}});
    log("wrote " + name);
}

void Run::note(const std::string& message) {
    notes_.push_back(message);
    std::cerr << "filterlr " << command_ << ": " << message << "\n";
}

void Run::log(const std::string& message) const {
    if (global_.verbose) std::cerr << "[" << command_ << "] " << message << "\n";
}

void Run::finish() {
    ojson m;
    m["tool"] = "filterlr";
    m["version"] = FILTERLR_VERSION;
    m["command"] = command_;
    m["seed"] = global_.seed;
    m["threads"] = global_.threads;
    m["label"] = global_.label;
    m["config"] = config_;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    m["notes"] = notes_;
    write_text(fs::path(global_.output_dir) / "run-manifest.json", m.dump(2) + "\n");
}

namespace {

Dataset read_dataset(Run& run, const std::string& path, LabelMode mode = LabelMode::Required) {
    if (path.empty()) throw ValidationError("--data is required");
    return parse_csv(run.read_input(path), run.global().label, path, mode);
}

FilterModel read_model(Run& run, const std::string& path) {
    if (path.empty()) throw ValidationError("--model is required");
    return model_from_json(run.read_input(path));
}

PipelineConfig pipeline_config(const BaggingOptions& b, const GlobalOptions& g) {
    if (b.k < 1) throw ValidationError("--k must be >= 1");
    PipelineConfig pc;
    pc.bagging.n_bags = b.bags;
    pc.bagging.rng_seed = derive_seed(g.seed, 1);
    pc.bagging.threads = g.threads;
    pc.bagging.max_depth_per_bag = b.splits_per_bag > 0 ? b.splits_per_bag : (b.k == 1 ? 1 : kKMeansSplitsPerBag);
    pc.aggregation = b.k == 1 ? Aggregation::mean() : Aggregation::kmeans(b.k);
    pc.criterion = parse_criterion(b.criterion);
    pc.bagging.validate();
    return pc;
}

void record_bagging(Run& run, const PipelineConfig& pc) {
    auto& c = run.config();
    c["bags"] = pc.bagging.n_bags;
    c["splits_per_bag"] = pc.bagging.max_depth_per_bag;
    c["aggregation"] = pc.aggregation.mode == Aggregation::Mode::Mean ? "mean" : "kmeans";
    c["k"] = pc.aggregation.k;
    c["criterion"] = to_string(pc.criterion);
}

AggregatedThresholds thresholds_for(Run& run, const Dataset& data, const PipelineConfig& pc) {
    AggregatedThresholds t = estimate_thresholds(data, pc);
    for (const auto& n : t.notes) {
        run.note("covariate '" + data.feature_names()[n.covariate] + "': " + std::to_string(n.used) + " of " +
                 std::to_string(n.requested) + " clusters (" + n.reason + ")");
    }
    return t;
}

std::string predictions_csv(std::span<const double> f, std::span<const double> prob, double cutoff) {
    std::string out = "row,linear_predictor,probability,class\n";
    for (std::size_t i = 0; i < prob.size(); ++i) {
        out += std::to_string(i) + "," + csv::format_double(f[i]) + "," + csv::format_double(prob[i]) + "," +
               (prob[i] > cutoff ? "1" : "-1") + "\n";
    }
    return out;
}

}  // namespace

void run_thresholds(const ThresholdsOptions& opt, const GlobalOptions& global) {
    Run run("thresholds", global);
    const Dataset data = read_dataset(run, opt.data);
    const PipelineConfig pc = pipeline_config(opt.bagging, global);
    record_bagging(run, pc);
    const AggregatedThresholds t = thresholds_for(run, data, pc);
    run.write_output("thresholds.json", thresholds_to_json(t.thresholds));
    run.finish();
}

void run_fit(const FitOptions& opt, const GlobalOptions& global) {
    Run run("fit", global);
    if (opt.lambda && opt.cv) throw ValidationError("--lambda and --cv are mutually exclusive");
    const Dataset data = read_dataset(run, opt.data);
    auto& c = run.config();

    AggregatedThresholds thresholds;
    if (opt.thresholds.empty()) {
        const PipelineConfig pc = pipeline_config(opt.bagging, global);
        record_bagging(run, pc);
        thresholds = thresholds_for(run, data, pc);
        run.write_output("thresholds.json", thresholds_to_json(thresholds.thresholds));
    } else {
        c["thresholds"] = opt.thresholds;
        thresholds.thresholds = thresholds_from_json(run.read_input(opt.thresholds));
    }

    SolverConfig solver;
    solver.tol = opt.tol;
    solver.max_iters = opt.max_iters;
    c["tol"] = opt.tol;
    c["max_iters"] = opt.max_iters;

    FilterModel model;
    if (opt.lambda) {
        solver.lambda = *opt.lambda;
        c["lambda"] = *opt.lambda;
        model = fit_model(data, thresholds.thresholds, solver);
    } else {
        CvConfig cv;
        cv.n_folds = opt.folds;
        cv.n_lambdas = opt.n_lambdas;
        cv.lambda_min_ratio = opt.lambda_min_ratio;
        cv.metric = parse_metric(opt.metric);
        cv.rule = !opt.rule.empty() ? parse_rule(opt.rule) : (opt.two_se ? SelectionRule::TwoSe : SelectionRule::Min);
        cv.rng_seed = derive_seed(global.seed, 2);
        cv.solver = solver;
        cv.threads = global.threads;
        c["cv"] = {{"folds", cv.n_folds},
                   {"n_lambdas", cv.n_lambdas},
                   {"lambda_min_ratio", cv.lambda_min_ratio},
                   {"metric", to_string(cv.metric)},
                   {"rule", to_string(cv.rule)}};
        const PipelineResult r = fit_with_thresholds(data, std::move(thresholds), cv);
        run.write_output("cv_curve.csv", cv_curve_csv(r.cv));
        model = r.model;
        run.log("selected lambda " + csv::format_double(model.lambda));
    }
    if (!model.converged) run.note("solver stopped before convergence");
    run.write_output("model.json", model_to_json(model));
    run.finish();
}

void run_predict(const PredictOptions& opt, const GlobalOptions& global) {
    Run run("predict", global);
    run.config()["cutoff"] = opt.cutoff;
    const FilterModel model = read_model(run, opt.model);
    const Dataset data = read_dataset(run, opt.data, LabelMode::Optional);
    const auto f = linear_predictor(model, data);
    std::vector<double> prob(f.size());
    std::transform(f.begin(), f.end(), prob.begin(), probability_from_score);
    run.write_output("predictions.csv", predictions_csv(f, prob, opt.cutoff));
    run.finish();
}

void run_evaluate(const EvaluateOptions& opt, const GlobalOptions& global) {
    Run run("evaluate", global);
    auto& c = run.config();
    c["alpha"] = opt.alpha;
    c["fpr_hi"] = opt.fpr_hi;

    std::vector<double> prob;
    std::vector<Label> labels;
    if (!opt.predictions.empty()) {
        if (!opt.model.empty() || !opt.data.empty()) {
            throw ValidationError("use either --predictions or --model with --data");
        }
        const Dataset table = parse_csv(run.read_input(opt.predictions), global.label, opt.predictions);
        const auto& names = table.feature_names();
        const auto it = std::find(names.begin(), names.end(), opt.probability_column);
        if (it == names.end()) {
            throw ValidationError(opt.predictions + ": column '" + opt.probability_column + "' not found");
        }
        const auto col = table.column(static_cast<std::size_t>(it - names.begin()));
        prob.assign(col.begin(), col.end());
        labels.assign(table.labels().begin(), table.labels().end());
    } else {
        const FilterModel model = read_model(run, opt.model);
        const Dataset data = read_dataset(run, opt.data);
        prob = predict_proba(model, data);
        labels.assign(data.labels().begin(), data.labels().end());
    }
    const EvalReport report = evaluate(prob, labels, opt.alpha, opt.fpr_hi);
    if (report.clamped > 0) {
        run.note(std::to_string(report.clamped) + " probabilities clamped away from 0/1 for the log score");
    }
    run.write_output("eval_report.csv", eval_report_csv(report));
    run.write_output("murphy.csv", murphy_csv(report.murphy));
    run.finish();
}

void run_riskscore(const RiskscoreOptions& opt, const GlobalOptions& global) {
    Run run("riskscore", global);
    run.config()["merge_tol"] = opt.merge_tol;
    const FilterModel model = read_model(run, opt.model);
    const RiskScoreTable table = build_table(model, opt.merge_tol);
    for (const auto& w : table.warnings) run.note(w);
    run.write_output("risk_table.csv", risk_table_csv(table));
    if (!opt.score.empty()) {
        const Dataset people = read_dataset(run, opt.score, LabelMode::Optional);
        const auto scores = score_dataset(table, people);
        std::string out = "row,score\n";
        for (std::size_t i = 0; i < scores.size(); ++i) {
            out += std::to_string(i) + "," + csv::format_double(scores[i]) + "\n";
        }
        run.write_output("scores.csv", out);
    }
    run.finish();
}

void run_simulate(const SimulateOptions& opt, const GlobalOptions& global) {
    Run run("simulate", global);
    StudyPlan plan = opt.study.empty() ? preset_plan(opt.design, opt.reps, global.seed, global.threads)
                                       : plan_from_json(run.read_input(opt.study), global.threads, opt.reps, global.seed);
    run.config()["plan"] = ojson::parse(plan_to_json(plan));

    if (opt.emit_dataset) {
        SimDesign d = plan.configs.front().design;
        if (opt.n > 0) d.n = opt.n;
        d.validate();
        run.config()["emit_dataset"] = {{"n", d.n}};
        Rng rng(derive_seed(d.rng_seed, d.n, 0));
        run.write_output("dataset.csv", to_csv(simulate_dataset(d, rng)));
        run.finish();
        return;
    }

    StudyResult result;
    for (const auto& cfg : plan.configs) {
        run.log("n = " + std::to_string(cfg.design.n) + ", " + std::to_string(cfg.design.n_reps) + " replications");
        result.append(run_study(cfg));
    }
    std::string failures = "n,rep,message\n";
    for (const auto& f : result.failures) {
        failures += std::to_string(f.n) + "," + std::to_string(f.rep) + "," + csv::escape(f.message) + "\n";
    }
    if (!result.failures.empty()) run.note(std::to_string(result.failures.size()) + " replications failed");

    const auto rows = summarize(result);
    run.write_output("study_long.csv", study_long_csv(result));
    run.write_output("study_summary.csv", study_summary_csv(rows));
    run.write_output("failures.csv", failures);

    std::set<std::size_t> grid;
    for (const auto& c : plan.configs) grid.insert(c.design.n);
    const bool has_mab = std::any_of(rows.begin(), rows.end(), [](const SummaryRow& r) { return r.metric == "mab_t"; });
    if (grid.size() >= 4 && has_mab) {
        const RateFit fit = rate_study(rows);
        run.write_output("rate_points.csv", rate_points_csv(fit));
        run.write_output("rate_fit.csv", rate_fit_csv(fit));
    }
    run.finish();
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    static const std::set<std::string> subcommands = {"thresholds", "fit",       "predict",
                                                      "evaluate",   "riskscore", "simulate"};
    static const std::set<std::string> global_keys = {"seed", "threads", "output-dir", "verbose", "label"};

    std::vector<std::string> rest;
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ValidationError("--config needs a file argument");
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (config_path.empty()) return rest;

    if (!fs::is_regular_file(config_path)) throw ValidationError("cannot open config file '" + config_path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text(config_path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(config_path + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ValidationError(config_path + ": expected a JSON object of option values");

    std::vector<std::string> global_args;
    std::vector<std::string> command_args;
    for (const auto& [key, value] : doc.items()) {
        auto& target = global_keys.contains(key) ? global_args : command_args;
        const std::string flag = "--" + key;
        auto scalar = [&](const nlohmann::json& v) {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number_integer() || v.is_number_unsigned() || v.is_number_float()) return v.dump();
            throw ValidationError(config_path + ": unsupported value for '" + key + "'");
        };
        if (value.is_boolean()) {
            if (value.get<bool>()) target.push_back(flag);
        } else if (value.is_array()) {
            for (const auto& v : value) {
                target.push_back(flag);
                target.push_back(scalar(v));
            }
        } else {
            target.push_back(flag);
            target.push_back(scalar(value));
        }
    }

    // Config values come first in each scope so explicit flags override them.
    std::vector<std::string> out;
    out.insert(out.end(), global_args.begin(), global_args.end());
    bool placed = false;
    for (const auto& a : rest) {
        out.push_back(a);
        if (!placed && subcommands.contains(a)) {
            out.insert(out.end(), command_args.begin(), command_args.end());
            placed = true;
        }
    }
    if (!placed) out.insert(out.end(), command_args.begin(), command_args.end());
    return out;
}

}  // namespace filterlr::cli
