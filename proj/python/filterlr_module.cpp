#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "filterlr/dataset.hpp"
#include "filterlr/error.hpp"
#include "filterlr/evaluation.hpp"
#include "filterlr/model_io.hpp"
#include "filterlr/pipeline.hpp"
#include "filterlr/risk_score.hpp"
#include "filterlr/rng.hpp"
#include "filterlr/simulation.hpp"
#include "filterlr/study.hpp"

namespace py = pybind11;
using namespace filterlr;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const DoubleArray& a) {
    if (a.ndim() != 1) throw ValidationError("expected a one-dimensional array");
    return {a.data(), a.data() + a.size()};
}

std::vector<Label> to_labels(const DoubleArray& a) {
    const auto raw = to_vector(a);
    bool zero = false;
    for (double v : raw) zero |= v == 0.0;
    const LabelCoding coding = zero ? LabelCoding::ZeroOne : LabelCoding::PlusMinusOne;
    std::vector<Label> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = canonical_label(raw[i], coding);
    return out;
}

Dataset make_dataset(const DoubleArray& x, const DoubleArray& y, std::optional<std::vector<std::string>> names,
                     const std::string& label) {
    if (x.ndim() != 2) throw ValidationError("X must be two-dimensional");
    const auto n = static_cast<std::size_t>(x.shape(0));
    const auto p = static_cast<std::size_t>(x.shape(1));
    std::vector<double> cols(n * p);
    const double* src = x.data();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) cols[j * n + i] = src[i * p + j];
    }
    if (!names) {
        names.emplace();
        for (std::size_t j = 0; j < p; ++j) names->push_back("x" + std::to_string(j + 1));
    }
    return Dataset(n, std::move(cols), to_labels(y), std::move(*names), label);
}

py::array_t<double> as_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

PipelineConfig pipeline_config(int bags, int k, int splits_per_bag, const std::string& criterion,
                               std::uint64_t seed) {
    if (k < 1) throw ValidationError("k must be >= 1");
    PipelineConfig pc;
    pc.bagging.n_bags = bags;
    pc.bagging.rng_seed = derive_seed(seed, 1);
    pc.bagging.max_depth_per_bag = splits_per_bag > 0 ? splits_per_bag : (k == 1 ? 1 : kKMeansSplitsPerBag);
    pc.aggregation = k == 1 ? Aggregation::mean() : Aggregation::kmeans(k);
    pc.criterion = parse_criterion(criterion);
    return pc;
}

}  // namespace

PYBIND11_MODULE(_filterlr, m) {
    m.doc() = "Fusion-penalized logistic regression on thresholded covariates";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<RuntimeError>(m, "FilterRuntimeError", PyExc_RuntimeError);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init(&make_dataset), py::arg("X"), py::arg("y"), py::arg("feature_names") = py::none(),
             py::arg("label") = "y")
        .def_property_readonly("n", &Dataset::n)
        .def_property_readonly("p", &Dataset::p)
        .def_property_readonly("feature_names", &Dataset::feature_names)
        .def_property_readonly("labels",
                               [](const Dataset& d) {
                                   std::vector<double> y(d.labels().begin(), d.labels().end());
                                   return as_array(y);
                               })
        .def_property_readonly("X",
                               [](const Dataset& d) {
                                   py::array_t<double> out({d.n(), d.p()});
                                   auto r = out.mutable_unchecked<2>();
                                   for (std::size_t i = 0; i < d.n(); ++i) {
                                       for (std::size_t j = 0; j < d.p(); ++j) r(i, j) = d.at(i, j);
                                   }
                                   return out;
                               })
        .def("to_csv", [](const Dataset& d) { return to_csv(d); });

    m.def("load_csv", [](const std::string& path, const std::string& label, bool label_optional) {
        return load_csv(path, label, label_optional ? LabelMode::Optional : LabelMode::Required);
    }, py::arg("path"), py::arg("label") = "y", py::arg("label_optional") = false);

    py::class_<ThresholdSet>(m, "ThresholdSet")
        .def_readonly("names", &ThresholdSet::names)
        .def_readonly("cuts", &ThresholdSet::cuts)
        .def("to_json", [](const ThresholdSet& t) { return thresholds_to_json(t); })
        .def_static("from_json", &thresholds_from_json)
        .def("__eq__", [](const ThresholdSet& a, const ThresholdSet& b) { return a == b; });

    m.def("estimate_thresholds",
          [](const Dataset& data, int bags, int k, int splits_per_bag, const std::string& criterion,
             std::uint64_t seed) {
              return estimate_thresholds(data, pipeline_config(bags, k, splits_per_bag, criterion, seed)).thresholds;
          },
          py::arg("data"), py::arg("bags") = 100, py::arg("k") = 1, py::arg("splits_per_bag") = 0,
          py::arg("criterion") = "gini", py::arg("seed") = 0,
          "Bagged single-covariate splits; k = 1 averages them, k > 1 clusters them. Matches `filterlr thresholds`.");

    py::class_<FilterModel>(m, "Model")
        .def_readonly("feature_names", &FilterModel::feature_names)
        .def_readonly("thresholds", &FilterModel::thresholds)
        .def_readonly("intercept", &FilterModel::intercept)
        .def_readonly("lambda_", &FilterModel::lambda)
        .def_readonly("converged", &FilterModel::converged)
        .def_readonly("iterations", &FilterModel::iterations)
        .def_readonly("kkt_residual", &FilterModel::kkt_residual)
        .def_property_readonly("theta", [](const FilterModel& mdl) { return as_array(mdl.theta); })
        .def_property_readonly("beta", [](const FilterModel& mdl) { return as_array(mdl.beta); })
        .def("selected", &FilterModel::selected)
        .def("linear_predictor",
             [](const FilterModel& mdl, const Dataset& d) { return as_array(linear_predictor(mdl, d)); })
        .def("predict_proba", [](const FilterModel& mdl, const Dataset& d) { return as_array(predict_proba(mdl, d)); })
        .def("to_json", [](const FilterModel& mdl) { return model_to_json(mdl); })
        .def_static("from_json", &model_from_json);

    m.def("fit",
          [](const Dataset& data, std::optional<ThresholdSet> thresholds, std::optional<double> lambda, int folds,
             const std::string& metric, const std::string& rule, int bags, int k, int splits_per_bag,
             const std::string& criterion, std::uint64_t seed, double tol) {
              SolverConfig solver;
              solver.tol = tol;
              AggregatedThresholds t;
              if (thresholds) {
                  t.thresholds = *thresholds;
              } else {
                  t = estimate_thresholds(data, pipeline_config(bags, k, splits_per_bag, criterion, seed));
              }
              py::dict out;
              if (lambda) {
                  solver.lambda = *lambda;
                  out["model"] = fit_model(data, t.thresholds, solver);
                  out["cv_curve"] = py::none();
              } else {
                  CvConfig cv;
                  cv.n_folds = folds;
                  cv.metric = parse_metric(metric);
                  cv.rule = parse_rule(rule);
                  cv.rng_seed = derive_seed(seed, 2);
                  cv.solver = solver;
                  const PipelineResult r = fit_with_thresholds(data, t, cv);
                  py::list curve;
                  for (const auto& pnt : r.cv.curve) curve.append(py::make_tuple(pnt.lambda, pnt.mean, pnt.sd));
                  out["model"] = r.model;
                  out["cv_curve"] = curve;
              }
              return out;
          },
          py::arg("data"), py::arg("thresholds") = py::none(), py::arg("lambda_") = py::none(), py::arg("folds") = 5,
          py::arg("metric") = "deviance", py::arg("rule") = "min", py::arg("bags") = 100, py::arg("k") = 1,
          py::arg("splits_per_bag") = 0, py::arg("criterion") = "gini", py::arg("seed") = 0, py::arg("tol") = 1e-8,
          "Fits at a fixed lambda_ or chooses it by cross-validation. Same seeds as `filterlr fit`.");

    m.def("auc", [](const DoubleArray& s, const DoubleArray& y) { return auc(to_vector(s), to_labels(y)); },
          py::arg("scores"), py::arg("labels"));

    m.def("evaluate",
          [](const DoubleArray& prob, const DoubleArray& y, double alpha, double fpr_hi) {
              const EvalReport r = evaluate(to_vector(prob), to_labels(y), alpha, fpr_hi);
              py::dict d;
              d["auc"] = r.auc;
              d["pauc_raw"] = r.pauc_raw;
              d["pauc_standardized"] = r.pauc_standardized;
              d["logs"] = r.logs;
              d["crps"] = r.crps;
              d["brier"] = r.brier;
              d["clamped"] = r.clamped;
              return d;
          },
          py::arg("probabilities"), py::arg("labels"), py::arg("alpha") = 0.9, py::arg("fpr_hi") = 0.1);

    m.def("risk_table", [](const FilterModel& mdl, double merge_tol) {
        return risk_table_csv(build_table(mdl, merge_tol));
    }, py::arg("model"), py::arg("merge_tol") = 1e-8, "Risk score table as CSV text (variable,range,score).");

    m.def("risk_scores", [](const FilterModel& mdl, const Dataset& d, double merge_tol) {
        return as_array(score_dataset(build_table(mdl, merge_tol), d));
    }, py::arg("model"), py::arg("data"), py::arg("merge_tol") = 1e-8);

    m.def("simulate",
          [](const std::string& family, std::size_t n, std::size_t p, std::size_t p0, double rho, std::uint64_t seed) {
              SimDesign d;
              d.family = parse_family(family);
              d.n = n;
              d.p = p;
              d.p0 = p0;
              d.rho = rho;
              d.rng_seed = seed;
              d.validate();
              Rng rng(derive_seed(seed, n, 0));
              return simulate_dataset(d, rng);
          },
          py::arg("family") = "single", py::arg("n") = 400, py::arg("p") = 500, py::arg("p0") = 5,
          py::arg("rho") = 0.0, py::arg("seed") = 0,
          "One simulated dataset; the same draw as `filterlr simulate --emit-dataset`.");
}
