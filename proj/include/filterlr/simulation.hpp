#pragma once

// Data generators for the simulation designs.
//
// Covariates are N(0, Sigma) with Sigma_ij = rho^|i-j|, drawn by the AR(1)
// recursion X_1 = e_1, X_j = rho X_{j-1} + sqrt(1 - rho^2) e_j. The first p0
// covariates carry signal:
//   SingleThreshold  logit = b0 + sum_j beta 1{X_j >= t}
//   ThresholdI       logit = b0 + sum_j v_{level(X_j)} with three cuts
//   PiecewiseII      logit = b0 + sum_j h(X_j), h piecewise in sin, square, linear
// b0 is minus the sample mean of the signal part, which balances the classes.

#include <cstdint>
#include <string>
#include <vector>

#include "filterlr/dataset.hpp"
#include "filterlr/evaluation.hpp"
#include "filterlr/rng.hpp"

namespace filterlr {

enum class Family { SingleThreshold, ThresholdI, PiecewiseII };

Family parse_family(const std::string& name);
std::string to_string(Family f);

struct SimDesign {
    Family family = Family::SingleThreshold;
    std::size_t n = 400;
    std::size_t p = 500;
    std::size_t p0 = 5;
    double rho = 0.0;
    int n_reps = 50;
    std::uint64_t rng_seed = 0;
    /// Share of each replication used for training; the rest is the test set.
    double train_fraction = 0.8;
    /// SingleThreshold: common cut and coefficient.
    double single_cut = 0.0;
    double single_beta = 3.0;
    /// ThresholdI level values / PiecewiseII piece coefficients (beta_0..beta_3).
    std::vector<double> level_coefs{0.0, 5.0, 10.0, 5.0};

    void validate() const;
};

/// True cuts of an associated covariate.
std::vector<double> family_cuts(const SimDesign& design);

/// Signal contributed by one associated covariate at value x.
double signal(const SimDesign& design, double x);

/// n x p covariates, column-major.
std::vector<double> sample_covariates(std::size_t n, std::size_t p, double rho, Rng& rng);

struct Response {
    std::vector<Label> labels;
    double intercept = 0.0;
};

/// Draws labels for column-major covariates; the intercept balances classes.
Response gen_response(std::span<const double> x_col_major, std::size_t n, const SimDesign& design, Rng& rng);

/// Covariates named x1..xp plus labels named y.
Dataset simulate_dataset(const SimDesign& design, Rng& rng);

/// Step-function truth for SingleThreshold and ThresholdI. Each covariate is
/// compared at the conditional median of every true level under N(0, 1).
Truth make_truth(const SimDesign& design);

/// Standard normal quantile.
double normal_quantile(double prob);

}  // namespace filterlr
