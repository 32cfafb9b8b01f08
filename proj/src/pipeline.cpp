#include "filterlr/pipeline.hpp"

#include <utility>

namespace filterlr {

AggregatedThresholds estimate_thresholds(const Dataset& data, const PipelineConfig& cfg) {
    return aggregate_thresholds(bagged_thresholds(data, cfg.bagging, cfg.criterion), cfg.aggregation);
}

PipelineResult fit_with_thresholds(const Dataset& data, AggregatedThresholds thresholds, const CvConfig& cv) {
    data.require_fittable();
    PipelineResult r;
    r.thresholds = std::move(thresholds);
    r.cv = cv_lambda(data, r.thresholds.thresholds, cv);
    SolverConfig solver = cv.solver;
    solver.lambda = r.cv.best_lambda;
    r.model = fit_model(data, r.thresholds.thresholds, solver);
    return r;
}

PipelineResult fit_pipeline(const Dataset& data, const PipelineConfig& cfg) {
    data.require_fittable();
    return fit_with_thresholds(data, estimate_thresholds(data, cfg), cfg.cv);
}

}  // namespace filterlr
