#pragma once

// Forecast-quality metrics for binary outcomes and the estimation/selection
// metrics used to score simulation fits against the generating truth.
//
// Scores (Logs, Brier, CRPS) are negatively oriented by definition and are
// reported negated, so larger is better throughout an EvalReport. CRPS of a
// Bernoulli predictive law on {0, 1} equals the Brier score.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "filterlr/dataset.hpp"
#include "filterlr/fused_logistic.hpp"

namespace filterlr {

/// Mann-Whitney AUC; tied positive/negative pairs count 1/2.
double auc(std::span<const double> scores, std::span<const Label> labels);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

/// ROC vertices from (0, 0) to (1, 1); tied scores form one diagonal step.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const Label> labels);

struct PartialAuc {
    double raw = 0.0;
    double standardized = 0.0;
};

/// Area under the ROC curve for FPR in [0, fpr_hi], with linear
/// interpolation at fpr_hi, and its McClish standardization
/// 1/2 (1 + (raw - min) / (max - min)), min = fpr_hi^2 / 2, max = fpr_hi.
PartialAuc partial_auc(std::span<const double> scores, std::span<const Label> labels, double fpr_hi);

struct ProperScores {
    double logs = 0.0;   ///< mean log-likelihood of the outcome (negated log score)
    double crps = 0.0;   ///< negated CRPS
    double brier = 0.0;  ///< negated Brier score
    /// Probabilities moved into [1e-12, 1 - 1e-12] before taking logs.
    std::size_t clamped = 0;
};

ProperScores proper_scores(std::span<const double> probs, std::span<const Label> labels);

/// Elementary score of the level-alpha extremal scoring function at
/// threshold p: 1{(q - p)(y - p) < 0} |y - p| (alpha if y > p, else 1 - alpha),
/// with forecast q and outcome y in {0, 1}.
double murphy_elementary(double q, int y01, double p, double alpha);

struct MurphyPoint {
    double p = 0.0;
    double score = 0.0;  ///< sample mean of the elementary score (lower is better)
};

/// 0.01, 0.02, ..., 0.99.
std::vector<double> default_murphy_grid();

std::vector<MurphyPoint> murphy_scores(std::span<const double> probs, std::span<const Label> labels,
                                       double alpha, std::span<const double> grid);

struct EvalReport {
    double auc = 0.0;
    double pauc_raw = 0.0;
    double pauc_standardized = 0.0;
    double logs = 0.0;
    double crps = 0.0;
    double brier = 0.0;
    std::size_t clamped = 0;
    std::vector<MurphyPoint> murphy;
};

EvalReport evaluate(std::span<const double> probs, std::span<const Label> labels, double alpha = 0.9,
                    double fpr_hi = 0.1);

/// metric,value rows for the six summary metrics.
std::string eval_report_csv(const EvalReport& report);
/// p,score rows.
std::string murphy_csv(std::span<const MurphyPoint> murphy);

/// Generating step functions of a simulation: per covariate, the true cuts,
/// the value of every true level (level_values[j].size() == cuts[j].size() + 1)
/// and the points at which estimated and true step functions are compared.
struct Truth {
    std::vector<std::vector<double>> cuts;
    std::vector<std::vector<double>> level_values;
    std::vector<std::vector<double>> eval_points;

    /// Covariates whose true step function is not constant.
    std::vector<bool> support() const;
    void validate() const;
};

struct SelectionReport {
    double mab_t = 0.0;
    double rse_est = 0.0;
    double rmse_est = 0.0;
    double sen_vs = 0.0;
    double spe_vs = 0.0;
};

/// Sensitivity and specificity of the selected set against `support`.
std::pair<double, double> variable_selection(const FilterModel& model, const std::vector<bool>& support);

/// MAB_t averages, over every true cut of an associated covariate, the
/// distance to the nearest estimated cut of that covariate. RSE compares the
/// estimated and true step functions at truth.eval_points; RMSE = RSE / sqrt(p).
SelectionReport selection_metrics(const FilterModel& model, const Truth& truth);

}  // namespace filterlr
