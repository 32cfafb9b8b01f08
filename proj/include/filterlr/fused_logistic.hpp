#pragma once

// Fusion-penalized logistic regression on a thresholded design.
//
// The loss is the psi-form negative log-likelihood
//     L(f) = (1/n) sum_i [ -y_i f_i + log(e^{f_i} + e^{-f_i}) ]
//          = (1/n) sum_i log(1 + exp(-2 y_i f_i)),
// with f_i = intercept + <B, z_i>. Under this loss P(y = +1 | f) is
// 1 / (1 + exp(-2 f)); predict_proba uses the same convention so fitted
// probabilities and the training loss agree. The fusion penalty
// lambda * sum |beta_k - beta_{k-1}| becomes lambda * ||theta||_1 after the
// difference transform, and the l1 problem is solved by proximal gradient.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "filterlr/dataset.hpp"
#include "filterlr/encoding.hpp"
#include "filterlr/thresholds.hpp"

namespace filterlr {

enum class StepRule {
    FixedLipschitz,  ///< constant step 1/L from a power-iteration estimate of L
    Backtracking,    ///< Armijo-type backtracking with step growth
};

struct SolverConfig {
    double lambda = 0.0;
    int max_iters = 5000;
    /// Stop when the relative objective decrease falls below tol and the KKT
    /// residual is at most 10 * tol.
    double tol = 1e-8;
    bool intercept = true;
    StepRule step_rule = StepRule::Backtracking;
    /// FISTA momentum with restart on objective increase.
    bool accelerate = false;
    /// Keep the objective value after every iteration in SolverResult::trace.
    bool record_trace = false;
    /// Curvature bound of the loss; estimated by power iteration when zero.
    double lipschitz = 0.0;

    void validate() const;
};

struct LossGrad {
    double loss = 0.0;
    /// grad[0] is d/d intercept, grad[1 + k] is d/d theta_k.
    std::vector<double> grad;
};

/// Loss and gradient at (theta, intercept).
LossGrad loss_grad(std::span<const double> theta, double intercept, const TransformedDesign& design,
                   std::span<const Label> y);

/// Mean of log(1 + exp(-2 y f)) over samples.
double logistic_loss(std::span<const double> f, std::span<const Label> y);

/// Penalized objective in the transformed parameterization:
/// L(theta) + lambda ||theta||_1.
double l1_objective(std::span<const double> theta, double intercept, const TransformedDesign& design,
                    std::span<const Label> y, double lambda);

/// Penalized objective in the fused parameterization, evaluated directly on
/// the (centered) indicator design: L(B) + lambda sum_j sum_k |beta_k - beta_{k-1}|.
double fused_objective(std::span<const double> beta, double intercept, const ThresholdedDesign& design,
                       std::span<const Label> y, double lambda);

/// Largest KKT violation at (theta, intercept) given the gradient there.
double kkt_residual(std::span<const double> theta, std::span<const double> grad, double lambda,
                    bool intercept);

/// Smallest lambda for which theta = 0 is optimal, ||(1/n) Z~^T (y - tanh b0)||_inf
/// with b0 the intercept-only fit.
double lambda_max(const TransformedDesign& design, std::span<const Label> y);

/// Intercept-only maximum likelihood: atanh(mean y).
double null_intercept(std::span<const Label> y);

struct SolverResult {
    double intercept = 0.0;
    std::vector<double> theta;
    double objective = 0.0;
    double loss = 0.0;
    int iterations = 0;
    bool converged = false;
    double kkt_residual = 0.0;
    std::vector<double> trace;
};

struct WarmStart {
    double intercept = 0.0;
    std::span<const double> theta;
};

/// Proximal-gradient solve of the l1-penalized problem on Z~.
SolverResult solve_l1_logistic(const TransformedDesign& design, std::span<const Label> y,
                               const SolverConfig& cfg, const WarmStart* warm = nullptr);

/// Estimates the Lipschitz constant of the loss gradient,
/// sigma_max([1, Z~])^2 / n, by power iteration.
double estimate_lipschitz(const TransformedDesign& design, bool intercept, int iterations = 40);

/// Fitted model: intercept, differences theta, fused coefficients B = D theta
/// and everything needed to encode and center new samples.
struct FilterModel {
    std::vector<std::string> feature_names;
    ThresholdSet thresholds;
    double intercept = 0.0;
    std::vector<double> theta;
    std::vector<double> beta;
    /// Training means of the uncentered indicator columns.
    std::vector<double> column_means;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
    double kkt_residual = 0.0;

    std::vector<std::size_t> block_sizes() const;
    /// Covariates with at least one non-zero adjacent difference.
    std::vector<std::size_t> selected() const;
    /// Throws ValidationError if the fields are mutually inconsistent.
    void validate() const;
};

/// Fits on a centered design. The returned model carries no thresholds or
/// names; see fit_model for the data-level entry point.
FilterModel fit(const ThresholdedDesign& design, std::span<const Label> y, const DifferenceTransform& t,
                const SolverConfig& cfg, const WarmStart* warm = nullptr);

/// Encodes, centers and transforms `data` under `thresholds`, then fits.
FilterModel fit_model(const Dataset& data, const ThresholdSet& thresholds, const SolverConfig& cfg);

/// f = intercept + <B, z - column_means> for every sample.
std::vector<double> linear_predictor(const FilterModel& model, const Dataset& data);

/// 1 / (1 + exp(-2 f)), kept inside (0, 1).
double probability_from_score(double f);

std::vector<double> predict_proba(const FilterModel& model, const Dataset& data);

/// +1 where the predicted probability exceeds `cutoff`, -1 elsewhere.
std::vector<Label> classify(const FilterModel& model, const Dataset& data, double cutoff = 0.5);

/// Regularization path options.
struct PathConfig {
    /// Stop once the training deviance explained exceeds max_dev_ratio or
    /// improves by less than min_dev_change between consecutive lambdas.
    bool early_stop = true;
    double max_dev_ratio = 0.999;
    double min_dev_change = 1e-5;
};

/// Warm-started fits along a decreasing lambda grid. May return fewer fits
/// than lambdas when early stopping triggers.
std::vector<SolverResult> fit_path(const TransformedDesign& design, std::span<const Label> y,
                                   std::span<const double> lambdas, const SolverConfig& base,
                                   const PathConfig& path = {});

}  // namespace filterlr
