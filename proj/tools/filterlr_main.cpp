// filterlr: threshold estimation, fused logistic fitting, prediction,
// evaluation, risk scores and simulation studies from the command line.
//
// Exit status: 0 on success, 1 on invalid input or usage, 2 on runtime failure.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "filterlr/error.hpp"

namespace {

using namespace filterlr::cli;

void add_bagging(CLI::App* cmd, BaggingOptions& b) {
    cmd->add_option("--bags", b.bags, "Bootstrap resamples")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--k", b.k, "Cuts per covariate: 1 averages the bagged cuts, K > 1 clusters them by k-means")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--splits-per-bag", b.splits_per_bag, "Splits per covariate per bag (0: 1 for K = 1, else 3)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--criterion", b.criterion, "Split criterion")
        ->capture_default_str()
        ->check(CLI::IsMember({"gini", "entropy"}));
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(args);

    CLI::App app{"Fusion-penalized logistic threshold regression"};
    app.name("filterlr");
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", FILTERLR_VERSION);

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Base random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (results do not depend on it)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--output-dir,-o", g.output_dir, "Directory for all outputs")->capture_default_str();
    app.add_flag("--verbose,-v", g.verbose, "Progress messages on stderr");
    app.add_option("--label", g.label, "Name of the label column in data files")->capture_default_str();
    // Handled before parsing; registered for --help.
    std::string config_file;
    app.add_option("--config", config_file, "JSON object of option values; explicit flags take precedence");

    ThresholdsOptions th;
    auto* cmd_th = app.add_subcommand("thresholds", "Estimate cut points by bagged CART-type splits");
    cmd_th->add_option("--data", th.data, "Training CSV")->required();
    add_bagging(cmd_th, th.bagging);

    FitOptions fit;
    auto* cmd_fit = app.add_subcommand("fit", "Fit the fused logistic model (lambda fixed or by cross-validation)");
    cmd_fit->add_option("--data", fit.data, "Training CSV")->required();
    cmd_fit->add_option("--thresholds", fit.thresholds, "Thresholds JSON (estimated from --data when omitted)");
    add_bagging(cmd_fit, fit.bagging);
    auto* lambda_opt = cmd_fit->add_option("--lambda", fit.lambda, "Fixed penalty level");
    auto* cv_opt = cmd_fit->add_flag("--cv", fit.cv, "Choose lambda by cross-validation (the default)");
    lambda_opt->excludes(cv_opt);
    cmd_fit->add_option("--folds", fit.folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1000));
    cmd_fit->add_option("--metric", fit.metric, "Validation metric")
        ->capture_default_str()
        ->check(CLI::IsMember({"deviance", "auc"}));
    cmd_fit->add_flag("--two-se", fit.two_se, "Largest lambda within two standard errors of the best");
    cmd_fit->add_option("--rule", fit.rule, "Selection rule: min, 1se or 2se (overrides --two-se)")
        ->check(CLI::IsMember({"min", "1se", "2se"}));
    cmd_fit->add_option("--n-lambdas", fit.n_lambdas, "Grid size")->capture_default_str()->check(CLI::PositiveNumber);
    cmd_fit->add_option("--lambda-min-ratio", fit.lambda_min_ratio, "Smallest grid value relative to lambda_max")
        ->capture_default_str();
    cmd_fit->add_option("--tol", fit.tol, "Solver tolerance")->capture_default_str();
    cmd_fit->add_option("--max-iters", fit.max_iters, "Solver iteration cap")->capture_default_str();

    PredictOptions pr;
    auto* cmd_pr = app.add_subcommand("predict", "Predicted probabilities for new samples");
    cmd_pr->add_option("--model", pr.model, "Model JSON")->required();
    cmd_pr->add_option("--data", pr.data, "CSV with the model's covariates (label column optional)")->required();
    cmd_pr->add_option("--cutoff", pr.cutoff, "Probability cutoff for the class column")->capture_default_str();

    EvaluateOptions ev;
    auto* cmd_ev = app.add_subcommand("evaluate", "AUC, partial AUC, proper scores and Murphy diagram");
    cmd_ev->add_option("--model", ev.model, "Model JSON");
    cmd_ev->add_option("--data", ev.data, "Labelled test CSV");
    cmd_ev->add_option("--predictions", ev.predictions, "CSV with a probability column and the label column");
    cmd_ev->add_option("--probability-column", ev.probability_column, "Probability column of --predictions")
        ->capture_default_str();
    cmd_ev->add_option("--alpha", ev.alpha, "Murphy diagram cost parameter")->capture_default_str();
    cmd_ev->add_option("--fpr-hi", ev.fpr_hi, "Upper false-positive rate of the partial AUC")->capture_default_str();

    RiskscoreOptions rs;
    auto* cmd_rs = app.add_subcommand("riskscore", "0-100 risk score table from a fitted model");
    cmd_rs->add_option("--model", rs.model, "Model JSON")->required();
    cmd_rs->add_option("--score", rs.score, "CSV of individuals to score");
    cmd_rs->add_option("--merge-tol", rs.merge_tol, "Adjacent levels closer than this are merged")
        ->capture_default_str();

    SimulateOptions sim;
    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo study or a single simulated dataset");
    cmd_sim->add_option("--design", sim.design, "Preset study")
        ->capture_default_str()
        ->check(CLI::IsMember({"table1", "table2", "table3"}));
    cmd_sim->add_option("--study", sim.study, "JSON study config (overrides --design)");
    cmd_sim->add_option("--reps", sim.reps, "Replications per sample size")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd_sim->add_flag("--emit-dataset", sim.emit_dataset, "Write one simulated dataset instead of running the study");
    cmd_sim->add_option("--n", sim.n, "Sample size for --emit-dataset");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*cmd_th) run_thresholds(th, g);
    if (*cmd_fit) run_fit(fit, g);
    if (*cmd_pr) run_predict(pr, g);
    if (*cmd_ev) run_evaluate(ev, g);
    if (*cmd_rs) run_riskscore(rs, g);
    if (*cmd_sim) run_simulate(sim, g);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const filterlr::ValidationError& e) {
        std::cerr << "filterlr: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "filterlr: " << e.what() << "\n";
        return 2;
    }
}
