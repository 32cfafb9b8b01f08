#pragma once

// End-to-end fit: bagged threshold estimation, aggregation, lambda by
// cross-validation and a final fit on the whole training set.

#include "filterlr/dataset.hpp"
#include "filterlr/fused_logistic.hpp"
#include "filterlr/model_selection.hpp"
#include "filterlr/thresholds.hpp"

namespace filterlr {

struct PipelineConfig {
    BaggingConfig bagging;
    Aggregation aggregation;
    SplitCriterion criterion = SplitCriterion::Gini;
    CvConfig cv;
};

struct PipelineResult {
    AggregatedThresholds thresholds;
    CvResult cv;
    FilterModel model;
};

/// Thresholds for `data` under the bagging and aggregation settings.
AggregatedThresholds estimate_thresholds(const Dataset& data, const PipelineConfig& cfg);

/// Lambda by cross-validation for fixed thresholds, then a refit on all of `data`.
PipelineResult fit_with_thresholds(const Dataset& data, AggregatedThresholds thresholds, const CvConfig& cv);

PipelineResult fit_pipeline(const Dataset& data, const PipelineConfig& cfg);

}  // namespace filterlr
