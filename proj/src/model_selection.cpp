#include "filterlr/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "filterlr/csv.hpp"
#include "filterlr/encoding.hpp"
#include "filterlr/error.hpp"
#include "filterlr/evaluation.hpp"
#include "filterlr/parallel.hpp"
#include "filterlr/rng.hpp"

namespace filterlr {

namespace {

struct FoldData {
    TransformedDesign train;
    std::vector<Label> y_train;
    TransformedDesign valid;
    std::vector<Label> y_valid;
};

std::vector<std::size_t> rows_where(const std::vector<int>& folds, int f, bool in_fold) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < folds.size(); ++i) {
        if ((folds[i] == f) == in_fold) rows.push_back(i);
    }
    return rows;
}

FoldData make_fold(const Dataset& train, const Dataset& valid, const ThresholdSet& thresholds) {
    const ThresholdedDesign dtr = center(encode(train, thresholds));
    const ThresholdedDesign dva = encode(valid, thresholds).centered_with(dtr.column_means());
    const auto t = DifferenceTransform::for_design(dtr);
    return {transform_design(dtr, t), {train.labels().begin(), train.labels().end()}, transform_design(dva, t),
            {valid.labels().begin(), valid.labels().end()}};
}

double validation_metric(CvMetric metric, const FoldData& fold, const SolverResult& fit) {
    std::vector<double> f(fold.valid.n());
    fold.valid.multiply(fit.theta, fit.intercept, f);
    if (metric == CvMetric::AUC) return auc(f, fold.y_valid);
    return 2.0 * logistic_loss(f, fold.y_valid);
}

bool folds_usable(std::span<const Label> labels, const std::vector<int>& folds, int n_folds) {
    std::vector<int> pos(n_folds, 0);
    std::vector<int> neg(n_folds, 0);
    int total_pos = 0;
    int total_neg = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] > 0 ? pos : neg)[folds[i]]++;
        (labels[i] > 0 ? total_pos : total_neg)++;
    }
    for (int f = 0; f < n_folds; ++f) {
        if (pos[f] == 0 || neg[f] == 0) return false;
        if (total_pos - pos[f] == 0 || total_neg - neg[f] == 0) return false;
    }
    return true;
}

std::vector<int> usable_folds(std::span<const Label> labels, const CvConfig& cfg) {
    if (labels.size() < static_cast<std::size_t>(cfg.n_folds)) {
        throw ValidationError("cross-validation: fewer samples than folds");
    }
    auto folds = stratified_folds(labels, cfg.n_folds, cfg.rng_seed);
    if (folds_usable(labels, folds, cfg.n_folds)) return folds;
    folds = stratified_folds(labels, cfg.n_folds, derive_seed(cfg.rng_seed, 1));
    if (folds_usable(labels, folds, cfg.n_folds)) return folds;
    throw ValidationError("cross-validation: cannot form " + std::to_string(cfg.n_folds) +
                          " folds that each contain both classes");
}

void mean_sd(const std::vector<std::vector<double>>& per_fold, std::size_t i, double& mean, double& sd) {
    const double k = static_cast<double>(per_fold.size());
    mean = 0.0;
    for (const auto& v : per_fold) mean += v[i];
    mean /= k;
    double ss = 0.0;
    for (const auto& v : per_fold) ss += (v[i] - mean) * (v[i] - mean);
    sd = per_fold.size() > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
}

}  // namespace

CvMetric parse_metric(const std::string& name) {
    if (name == "deviance") return CvMetric::Deviance;
    if (name == "auc") return CvMetric::AUC;
    throw ValidationError("unknown CV metric '" + name + "' (expected deviance or auc)");
}

std::string to_string(CvMetric m) { return m == CvMetric::AUC ? "auc" : "deviance"; }

void CvConfig::validate() const {
    if (n_folds < 2) throw ValidationError("cross-validation: n_folds must be >= 2");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] >= 0.0) || !std::isfinite(lambda_grid[i])) {
            throw ValidationError("cross-validation: lambda values must be finite and >= 0");
        }
        if (i > 0 && !(lambda_grid[i] < lambda_grid[i - 1])) {
            throw ValidationError("cross-validation: lambda grid must be strictly decreasing");
        }
    }
    if (lambda_grid.empty() && (n_lambdas < 1 || !(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0))) {
        throw ValidationError("cross-validation: need n_lambdas >= 1 and lambda_min_ratio in (0, 1)");
    }
    solver.validate();
}

std::vector<int> stratified_folds(std::span<const Label> labels, int n_folds, std::uint64_t seed) {
    if (n_folds < 1) throw ValidationError("stratified_folds: n_folds must be >= 1");
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] > 0 ? pos : neg).push_back(i);
    Rng rng(seed);
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::vector<int> folds(labels.size(), 0);
    std::size_t deal = 0;
    for (const auto* group : {&pos, &neg}) {
        for (std::size_t i : *group) folds[i] = static_cast<int>(deal++ % static_cast<std::size_t>(n_folds));
    }
    return folds;
}

std::vector<double> log_grid(double lambda_max, int n, double ratio) {
    if (!(lambda_max > 0.0)) throw ValidationError("log_grid: lambda_max must be > 0");
    if (n < 1 || !(ratio > 0.0 && ratio < 1.0)) throw ValidationError("log_grid: need n >= 1 and ratio in (0, 1)");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        const double frac = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        g[i] = lambda_max * std::pow(ratio, frac);
    }
    g[0] = lambda_max;
    return g;
}

SelectionRule parse_rule(const std::string& s) {
    if (s == "min") return SelectionRule::Min;
    if (s == "1se") return SelectionRule::OneSe;
    if (s == "2se") return SelectionRule::TwoSe;
    throw ValidationError("unknown selection rule '" + s + "' (expected min, 1se or 2se)");
}

std::string to_string(SelectionRule r) {
    switch (r) {
        case SelectionRule::Min: return "min";
        case SelectionRule::OneSe: return "1se";
        case SelectionRule::TwoSe: return "2se";
    }
    return "min";
}

double se_multiplier(SelectionRule r) {
    switch (r) {
        case SelectionRule::Min: return 0.0;
        case SelectionRule::OneSe: return 1.0;
        case SelectionRule::TwoSe: return 2.0;
    }
    return 0.0;
}

std::size_t select_index(const std::vector<double>& mean, const std::vector<double>& sd, int n_folds,
                         bool higher_is_better, SelectionRule rule) {
    if (mean.empty()) throw ValidationError("select_index: no candidates");
    std::size_t best = 0;
    for (std::size_t i = 1; i < mean.size(); ++i) {
        if (higher_is_better ? mean[i] > mean[best] : mean[i] < mean[best]) best = i;
    }
    if (rule == SelectionRule::Min) return best;
    const double margin = se_multiplier(rule) * sd[best] / std::sqrt(static_cast<double>(n_folds));
    for (std::size_t i = 0; i < best; ++i) {
        if (higher_is_better ? mean[i] >= mean[best] - margin : mean[i] <= mean[best] + margin) return i;
    }
    return best;
}

CvResult cv_lambda(const Dataset& data, const ThresholdSet& thresholds, const CvConfig& cfg) {
    cfg.validate();
    data.require_fittable();
    CvResult res;
    res.folds = usable_folds(data.labels(), cfg);

    std::vector<double> grid = cfg.lambda_grid;
    if (grid.empty()) {
        const ThresholdedDesign full = center(encode(data, thresholds));
        const double lmax = lambda_max(transform_design(full, DifferenceTransform::for_design(full)), data.labels());
        grid = lmax > 0.0 ? log_grid(lmax, cfg.n_lambdas, cfg.lambda_min_ratio) : std::vector<double>{0.0};
    }

    std::vector<std::vector<double>> metric(cfg.n_folds);
    parallel_for(static_cast<std::size_t>(cfg.n_folds), cfg.threads, [&](std::size_t f) {
        const int fi = static_cast<int>(f);
        const FoldData fold = make_fold(data.subset(rows_where(res.folds, fi, false)),
                                        data.subset(rows_where(res.folds, fi, true)), thresholds);
        const auto path = fit_path(fold.train, fold.y_train, grid, cfg.solver, cfg.path);
        for (const auto& fit : path) metric[f].push_back(validation_metric(cfg.metric, fold, fit));
    });

    std::size_t len = grid.size();
    for (const auto& m : metric) len = std::min(len, m.size());
    std::vector<double> means(len);
    std::vector<double> sds(len);
    for (std::size_t i = 0; i < len; ++i) {
        mean_sd(metric, i, means[i], sds[i]);
        res.curve.push_back({grid[i], means[i], sds[i]});
    }
    res.best_index = select_index(means, sds, cfg.n_folds, cfg.metric == CvMetric::AUC, cfg.rule);
    res.best_lambda = grid[res.best_index];
    return res;
}

std::string cv_curve_csv(const CvResult& result) {
    std::string out = "lambda,mean_metric,sd_metric\n";
    for (const auto& p : result.curve) {
        out += csv::format_double(p.lambda) + "," + csv::format_double(p.mean) + "," + csv::format_double(p.sd) + "\n";
    }
    return out;
}

CvKResult cv_k(const Dataset& data, const std::vector<int>& k_candidates, const CvConfig& cfg,
               const BaggingConfig& bag_cfg, SplitCriterion criterion) {
    cfg.validate();
    bag_cfg.validate();
    data.require_fittable();
    if (k_candidates.empty()) throw ValidationError("cv_k: no candidate K");
    std::vector<int> ks = k_candidates;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (ks.front() < 1) throw ValidationError("cv_k: candidates must be >= 1");

    CvKResult res;
    if (ks.size() == 1) {
        res.best_k = ks.front();
        res.curve.push_back({ks.front(), 0.0, 0.0, 0});
        return res;
    }
    res.folds = usable_folds(data.labels(), cfg);
    res.fold_thresholds.assign(cfg.n_folds, std::vector<ThresholdSet>(ks.size()));

    // auc[c][f][i]: candidate c, fold f, grid position i.
    std::vector<std::vector<std::vector<double>>> aucs(ks.size(), std::vector<std::vector<double>>(cfg.n_folds));
    BaggingConfig inner = bag_cfg;
    inner.threads = 1;
    parallel_for(static_cast<std::size_t>(cfg.n_folds), cfg.threads, [&](std::size_t f) {
        const int fi = static_cast<int>(f);
        const Dataset train = data.subset(rows_where(res.folds, fi, false));
        const Dataset valid = data.subset(rows_where(res.folds, fi, true));
        const IntermediateCuts cuts = bagged_thresholds(train, inner, criterion);
        for (std::size_t c = 0; c < ks.size(); ++c) {
            const ThresholdSet th = aggregate_thresholds(cuts, Aggregation::kmeans(ks[c])).thresholds;
            res.fold_thresholds[f][c] = th;
            const FoldData fold = make_fold(train, valid, th);
            std::vector<double> grid = cfg.lambda_grid;
            if (grid.empty()) {
                const double lmax = lambda_max(fold.train, fold.y_train);
                grid = lmax > 0.0 ? log_grid(lmax, cfg.n_lambdas, cfg.lambda_min_ratio) : std::vector<double>{0.0};
            }
            const auto path = fit_path(fold.train, fold.y_train, grid, cfg.solver, cfg.path);
            for (const auto& fit : path) aucs[c][f].push_back(validation_metric(CvMetric::AUC, fold, fit));
        }
    });

    std::vector<double> means;
    std::vector<double> sds;
    for (std::size_t c = 0; c < ks.size(); ++c) {
        std::size_t len = std::numeric_limits<std::size_t>::max();
        for (const auto& v : aucs[c]) len = std::min(len, v.size());
        CvKPoint best{ks[c], -1.0, 0.0, 0};
        for (std::size_t i = 0; i < len; ++i) {
            double m = 0.0;
            double s = 0.0;
            mean_sd(aucs[c], i, m, s);
            if (m > best.mean_auc) best = {ks[c], m, s, i};
        }
        res.curve.push_back(best);
        means.push_back(best.mean_auc);
        sds.push_back(best.sd_auc);
    }
    res.best_k = ks[select_index(means, sds, cfg.n_folds, true, SelectionRule::TwoSe)];
    return res;
}

}  // namespace filterlr
