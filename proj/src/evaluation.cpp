#include "filterlr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "filterlr/csv.hpp"
#include "filterlr/encoding.hpp"
#include "filterlr/error.hpp"

namespace filterlr {

namespace {

void check_inputs(std::size_t n_scores, std::span<const Label> labels, const char* what) {
    if (n_scores != labels.size()) {
        throw ValidationError(std::string(what) + ": scores and labels differ in length");
    }
    bool pos = false;
    bool neg = false;
    for (Label y : labels) (y > 0 ? pos : neg) = true;
    if (!pos || !neg) throw ValidationError(std::string(what) + ": both classes must be present");
}

std::vector<std::size_t> order_descending(std::span<const double> scores) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return idx;
}

}  // namespace

double auc(std::span<const double> scores, std::span<const Label> labels) {
    check_inputs(scores.size(), labels, "auc");
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    double n_pos = 0.0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[idx[k]] > 0) {
                rank_sum += mid_rank;
                n_pos += 1.0;
            }
        }
        i = j;
    }
    const double n_neg = static_cast<double>(scores.size()) - n_pos;
    return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const Label> labels) {
    check_inputs(scores.size(), labels, "roc_curve");
    const auto idx = order_descending(scores);
    double n_pos = 0.0;
    for (Label y : labels) n_pos += y > 0;
    const double n_neg = static_cast<double>(labels.size()) - n_pos;
    std::vector<RocPoint> out{{0.0, 0.0}};
    double tp = 0.0;
    double fp = 0.0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
            (labels[idx[j]] > 0 ? tp : fp) += 1.0;
            ++j;
        }
        out.push_back({fp / n_neg, tp / n_pos});
        i = j;
    }
    return out;
}

PartialAuc partial_auc(std::span<const double> scores, std::span<const Label> labels, double fpr_hi) {
    if (!(fpr_hi > 0.0 && fpr_hi <= 1.0)) throw ValidationError("partial_auc: fpr_hi must lie in (0, 1]");
    const auto roc = roc_curve(scores, labels);
    double area = 0.0;
    for (std::size_t i = 1; i < roc.size(); ++i) {
        const RocPoint a = roc[i - 1];
        RocPoint b = roc[i];
        if (a.fpr >= fpr_hi) break;
        if (b.fpr > fpr_hi) {
            const double w = (fpr_hi - a.fpr) / (b.fpr - a.fpr);
            b = {fpr_hi, a.tpr + w * (b.tpr - a.tpr)};
        }
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    const double lo = fpr_hi * fpr_hi / 2.0;
    const double hi = fpr_hi;
    return {area, 0.5 * (1.0 + (area - lo) / (hi - lo))};
}

ProperScores proper_scores(std::span<const double> probs, std::span<const Label> labels) {
    if (probs.size() != labels.size() || probs.empty()) {
        throw ValidationError("proper_scores: probabilities and labels must be non-empty and equally long");
    }
    constexpr double eps = 1e-12;
    ProperScores s;
    double log_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double q = probs[i];
        if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("proper_scores: probability outside [0, 1]");
        const int y = to_zero_one(labels[i]);
        const double qc = std::clamp(q, eps, 1.0 - eps);
        if (qc != q) ++s.clamped;
        log_sum += std::log(y == 1 ? qc : 1.0 - qc);
        sq_sum += (q - y) * (q - y);
    }
    const double n = static_cast<double>(probs.size());
    s.logs = log_sum / n;
    s.brier = -(sq_sum / n);
    s.crps = s.brier;
    return s;
}

double murphy_elementary(double q, int y01, double p, double alpha) {
    const double y = y01;
    if (!((q - p) * (y - p) < 0.0)) return 0.0;
    return std::abs(y - p) * (y > p ? alpha : 1.0 - alpha);
}

std::vector<double> default_murphy_grid() {
    std::vector<double> g(99);
    for (int i = 0; i < 99; ++i) g[i] = (i + 1) / 100.0;
    return g;
}

std::vector<MurphyPoint> murphy_scores(std::span<const double> probs, std::span<const Label> labels, double alpha,
                                       std::span<const double> grid) {
    if (probs.size() != labels.size() || probs.empty()) {
        throw ValidationError("murphy_scores: probabilities and labels must be non-empty and equally long");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("murphy_scores: alpha must lie in (0, 1)");
    std::vector<MurphyPoint> out;
    out.reserve(grid.size());
    for (double p : grid) {
        if (!(p > 0.0 && p < 1.0)) throw ValidationError("murphy_scores: grid points must lie in (0, 1)");
        double s = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) s += murphy_elementary(probs[i], to_zero_one(labels[i]), p, alpha);
        out.push_back({p, s / static_cast<double>(probs.size())});
    }
    return out;
}

EvalReport evaluate(std::span<const double> probs, std::span<const Label> labels, double alpha, double fpr_hi) {
    EvalReport r;
    r.auc = auc(probs, labels);
    const PartialAuc pa = partial_auc(probs, labels, fpr_hi);
    r.pauc_raw = pa.raw;
    r.pauc_standardized = pa.standardized;
    const ProperScores ps = proper_scores(probs, labels);
    r.logs = ps.logs;
    r.crps = ps.crps;
    r.brier = ps.brier;
    r.clamped = ps.clamped;
    const auto grid = default_murphy_grid();
    r.murphy = murphy_scores(probs, labels, alpha, grid);
    return r;
}

std::string eval_report_csv(const EvalReport& report) {
    std::string out = "metric,value\n";
    const std::pair<const char*, double> rows[] = {
        {"auc", report.auc},   {"pauc_raw", report.pauc_raw}, {"pauc_standardized", report.pauc_standardized},
        {"logs", report.logs}, {"crps", report.crps},         {"brier", report.brier},
    };
    for (const auto& [name, v] : rows) out += std::string(name) + "," + csv::format_double(v) + "\n";
    return out;
}

std::string murphy_csv(std::span<const MurphyPoint> murphy) {
    std::string out = "p,score\n";
    for (const auto& m : murphy) out += csv::format_double(m.p) + "," + csv::format_double(m.score) + "\n";
    return out;
}

std::vector<bool> Truth::support() const {
    std::vector<bool> s(cuts.size(), false);
    for (std::size_t j = 0; j < cuts.size(); ++j) {
        const auto& v = level_values[j];
        s[j] = std::any_of(v.begin(), v.end(), [&](double b) { return b != v.front(); });
    }
    return s;
}

void Truth::validate() const {
    if (level_values.size() != cuts.size() || eval_points.size() != cuts.size()) {
        throw ValidationError("truth: cuts, level values and evaluation points must cover the same covariates");
    }
    for (std::size_t j = 0; j < cuts.size(); ++j) {
        if (level_values[j].size() != cuts[j].size() + 1) {
            throw ValidationError("truth: covariate " + std::to_string(j) + " needs one value per level");
        }
        if (eval_points[j].empty()) {
            throw ValidationError("truth: covariate " + std::to_string(j) + " has no evaluation points");
        }
    }
}

std::pair<double, double> variable_selection(const FilterModel& model, const std::vector<bool>& support) {
    if (support.size() != model.thresholds.p()) {
        throw ValidationError("variable_selection: support size does not match the model");
    }
    std::vector<bool> selected(support.size(), false);
    for (std::size_t j : model.selected()) selected[j] = true;
    double tp = 0, fn = 0, tn = 0, fp = 0;
    for (std::size_t j = 0; j < support.size(); ++j) {
        if (support[j]) {
            (selected[j] ? tp : fn) += 1;
        } else {
            (selected[j] ? fp : tn) += 1;
        }
    }
    const double sen = tp + fn > 0 ? tp / (tp + fn) : 1.0;
    const double spe = tn + fp > 0 ? tn / (tn + fp) : 1.0;
    return {sen, spe};
}

SelectionReport selection_metrics(const FilterModel& model, const Truth& truth) {
    truth.validate();
    const std::size_t p = truth.cuts.size();
    if (model.thresholds.p() != p) throw ValidationError("selection_metrics: model and truth differ in p");
    const auto support = truth.support();
    SelectionReport r;

    double dist_sum = 0.0;
    std::size_t dist_count = 0;
    double sq = 0.0;
    std::size_t offset = 0;
    for (std::size_t j = 0; j < p; ++j) {
        const auto& est = model.thresholds.cuts[j];
        if (support[j]) {
            for (double t : truth.cuts[j]) {
                double best = std::numeric_limits<double>::infinity();
                for (double e : est) best = std::min(best, std::abs(e - t));
                dist_sum += best;
                ++dist_count;
            }
        }
        for (double x : truth.eval_points[j]) {
            const std::size_t lv = level_of(est, x);
            const double b_hat = lv == 0 ? 0.0 : model.beta[offset + lv - 1];
            const double b_true = truth.level_values[j][level_of(truth.cuts[j], x)];
            sq += (b_hat - b_true) * (b_hat - b_true);
        }
        offset += est.size();
    }
    r.mab_t = dist_count > 0 ? dist_sum / static_cast<double>(dist_count) : 0.0;
    r.rse_est = std::sqrt(sq);
    r.rmse_est = r.rse_est / std::sqrt(static_cast<double>(p));
    std::tie(r.sen_vs, r.spe_vs) = variable_selection(model, support);
    return r;
}

}  // namespace filterlr
