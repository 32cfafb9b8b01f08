#pragma once

// Monte Carlo studies: replicate simulate -> split -> fit -> evaluate and
// collect long-format records, summaries and the threshold-error rate fit.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "filterlr/cart.hpp"
#include "filterlr/pipeline.hpp"
#include "filterlr/simulation.hpp"

namespace filterlr {

/// Splits harvested per covariate per bag when thresholds are aggregated by k-means.
inline constexpr int kKMeansSplitsPerBag = 3;

struct StudyConfig {
    SimDesign design;
    PipelineConfig pipeline;
    bool run_cart = false;
    bool run_bagged_cart = false;
    CartConfig cart;
    int cart_bags = 100;
    /// Replications run in parallel; each replication is single-threaded.
    unsigned threads = 1;
};

struct StudyRecord {
    std::size_t n = 0;
    int rep = 0;
    std::string method;
    std::string metric;
    double value = 0.0;
};

struct StudyFailure {
    std::size_t n = 0;
    int rep = 0;
    std::string message;
};

struct StudyResult {
    std::vector<StudyRecord> records;
    std::vector<StudyFailure> failures;

    void append(const StudyResult& other);
};

/// Records of one replication. Throws on failure.
std::vector<StudyRecord> run_replication(const StudyConfig& cfg, int rep);

/// All replications; failed ones are listed in `failures` and skipped.
StudyResult run_study(const StudyConfig& cfg);

/// n,rep,method,metric,value
std::string study_long_csv(const StudyResult& result);

struct SummaryRow {
    std::size_t n = 0;
    std::string method;
    std::string metric;
    double mean = 0.0;
    double sd = 0.0;
    std::size_t reps = 0;
};

/// Mean and sample sd per (n, method, metric), in order of first appearance.
std::vector<SummaryRow> summarize(const StudyResult& result);

/// n,method,metric,mean,sd,reps,formatted with formatted = "mean(sd)" at two decimals.
std::string study_summary_csv(std::span<const SummaryRow> rows);

/// Mean of one metric at one n (NaN when absent).
double summary_mean(std::span<const SummaryRow> rows, std::size_t n, const std::string& method,
                    const std::string& metric);

struct RatePoint {
    double n = 0.0;
    double value = 0.0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<RatePoint> points;
};

/// Least-squares line of log(value) on log(n).
RateFit fit_rate(std::span<const RatePoint> points);

/// fit_rate over the mean FILTER MAB_t at every n of a study; needs >= 4 n values.
RateFit rate_study(std::span<const SummaryRow> rows);

/// n,mab_t,fitted with fitted = exp(intercept) n^slope.
std::string rate_points_csv(const RateFit& fit);
/// slope,intercept
std::string rate_fit_csv(const RateFit& fit);

struct StudyPlan {
    std::string name;
    std::vector<StudyConfig> configs;
};

/// Preset studies: "table1" (single threshold over n = 100..400),
/// "table2" (threshold family, rho = 0, n = 400) and "table3" (piecewise
/// family, rho = 0.5, n = 400).
StudyPlan preset_plan(const std::string& name, int reps, std::uint64_t seed, unsigned threads);

/// Study from a JSON object. "preset" (default "table1"), "reps" and "seed"
/// (defaulting to the arguments) pick the starting plan; the remaining keys override it: family, n (one
/// value or a list), p, p0, rho, train_fraction, bags, splits_per_bag,
/// aggregation ("mean" | "kmeans"), k, criterion, folds, rule, metric, cart,
/// bagged_cart, name. Unknown keys are rejected.
StudyPlan plan_from_json(const std::string& text, unsigned threads = 1, int default_reps = 50,
                         std::uint64_t default_seed = 0);

/// Resolved settings of every configuration of a plan.
std::string plan_to_json(const StudyPlan& plan);

StudyResult run_plan(const StudyPlan& plan);

}  // namespace filterlr
