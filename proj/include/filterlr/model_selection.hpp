#pragma once

// Cross-validation over the lambda path and over the number of threshold
// clusters K. Folds are stratified by class so rare positives are spread
// over every fold.

#include <cstdint>
#include <string>
#include <vector>

#include "filterlr/dataset.hpp"
#include "filterlr/fused_logistic.hpp"
#include "filterlr/thresholds.hpp"

namespace filterlr {

enum class CvMetric { Deviance, AUC };

CvMetric parse_metric(const std::string& name);
std::string to_string(CvMetric m);

/// How the CV curve picks a candidate: the best mean, or the simplest
/// candidate within one or two standard errors of it.
enum class SelectionRule { Min, OneSe, TwoSe };

SelectionRule parse_rule(const std::string& s);
std::string to_string(SelectionRule r);
/// Number of standard errors tolerated by a rule (0 for Min).
double se_multiplier(SelectionRule r);

struct CvConfig {
    int n_folds = 5;
    /// Strictly decreasing; empty means n_lambdas log-spaced values from
    /// lambda_max down to lambda_min_ratio * lambda_max.
    std::vector<double> lambda_grid;
    int n_lambdas = 50;
    double lambda_min_ratio = 1e-3;
    CvMetric metric = CvMetric::Deviance;
    std::uint64_t rng_seed = 0;
    SelectionRule rule = SelectionRule::Min;
    /// Solver settings for every path fit (lambda is overwritten).
    SolverConfig solver;
    PathConfig path;
    unsigned threads = 1;

    void validate() const;
};

/// Fold index in [0, n_folds) for every sample: each class is shuffled with
/// `seed` and dealt round-robin, continuing the deal across classes.
std::vector<int> stratified_folds(std::span<const Label> labels, int n_folds, std::uint64_t seed);

/// n log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> log_grid(double lambda_max, int n, double ratio);

struct CvPoint {
    double lambda = 0.0;
    double mean = 0.0;  ///< mean validation metric over folds
    double sd = 0.0;    ///< sample standard deviation over folds
};

struct CvResult {
    double best_lambda = 0.0;
    std::size_t best_index = 0;
    std::vector<CvPoint> curve;
    std::vector<int> folds;
};

/// Selects lambda by K-fold CV for fixed thresholds. The curve stops at the
/// shortest early-stopped fold path.
CvResult cv_lambda(const Dataset& data, const ThresholdSet& thresholds, const CvConfig& cfg);

/// lambda,mean_metric,sd_metric
std::string cv_curve_csv(const CvResult& result);

/// Index chosen from per-candidate means and standard deviations.
/// Candidates are ordered from simplest to most complex. Under Min the best
/// mean wins (first on ties); otherwise the simplest candidate whose mean is
/// within m * sd / sqrt(folds) of the best, m = se_multiplier(rule).
std::size_t select_index(const std::vector<double>& mean, const std::vector<double>& sd, int n_folds,
                         bool higher_is_better, SelectionRule rule);

struct CvKPoint {
    int k = 0;
    double mean_auc = 0.0;
    double sd_auc = 0.0;
    std::size_t lambda_index = 0;  ///< grid position (relative to each fold's lambda_max)
};

struct CvKResult {
    int best_k = 0;
    std::vector<CvKPoint> curve;
    std::vector<int> folds;
    /// fold_thresholds[f][c]: thresholds of candidate c estimated on the
    /// training part of fold f.
    std::vector<std::vector<ThresholdSet>> fold_thresholds;
};

/// Selects the k-means cluster count by CV with AUC. Thresholds are
/// re-estimated on every training fold; each fold uses its own lambda grid
/// relative to its lambda_max and a candidate's score is its best mean AUC
/// over the grid. The simplest candidate within two standard errors wins.
CvKResult cv_k(const Dataset& data, const std::vector<int>& k_candidates, const CvConfig& cfg,
               const BaggingConfig& bag_cfg, SplitCriterion criterion = SplitCriterion::Gini);

}  // namespace filterlr
