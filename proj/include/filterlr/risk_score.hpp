#pragma once

// Additive 0-100 risk score built from a fitted model.
//
// For each selected covariate the level coefficients (0 for the base level,
// then B) are merged where adjacent values are fused, shifted so the lowest
// level scores 0, and scaled by 100 / sum_j max_j. An individual at the top
// level of every covariate scores exactly 100.

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "filterlr/dataset.hpp"
#include "filterlr/fused_logistic.hpp"

namespace filterlr {

struct RiskLevel {
    double lo = -std::numeric_limits<double>::infinity();  ///< range is [lo, hi)
    double hi = std::numeric_limits<double>::infinity();
    double shifted = 0.0;       ///< coefficient minus the covariate minimum
    double contribution = 0.0;  ///< 100 * shifted / global_scale
};

struct RiskCovariate {
    std::string name;
    std::size_t index = 0;  ///< position among the model's covariates
    std::vector<RiskLevel> levels;
};

struct RiskScoreTable {
    std::vector<std::string> feature_names;  ///< all model covariates, in order
    std::vector<RiskCovariate> covariates;   ///< covariates with a non-constant block
    double global_scale = 0.0;               ///< sum over covariates of the largest shifted value
    std::vector<std::string> warnings;
};

RiskScoreTable build_table(const FilterModel& model, double merge_tol = 1e-8);

/// Score of one individual; `x` holds one value per model covariate.
double score_individual(const RiskScoreTable& table, std::span<const double> x);

std::vector<double> score_dataset(const RiskScoreTable& table, const Dataset& data);

/// variable,range,score with contributions at two decimals.
std::string risk_table_csv(const RiskScoreTable& table);

}  // namespace filterlr
