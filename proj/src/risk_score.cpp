#include "filterlr/risk_score.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "filterlr/csv.hpp"
#include "filterlr/error.hpp"

namespace filterlr {

namespace {

std::string bound(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string range_label(const RiskLevel& l) {
    if (std::isinf(l.lo) && std::isinf(l.hi)) return "all";
    if (std::isinf(l.lo)) return "< " + bound(l.hi);
    if (std::isinf(l.hi)) return ">= " + bound(l.lo);
    return "[" + bound(l.lo) + ", " + bound(l.hi) + ")";
}

const RiskLevel& level_for(const RiskCovariate& c, double x) {
    auto it = std::upper_bound(c.levels.begin() + 1, c.levels.end(), x,
                               [](double v, const RiskLevel& l) { return v < l.lo; });
    return *(it - 1);
}

}  // namespace

RiskScoreTable build_table(const FilterModel& model, double merge_tol) {
    if (!(merge_tol >= 0.0)) throw ValidationError("risk score: merge_tol must be >= 0");
    model.validate();
    RiskScoreTable table;
    table.feature_names = model.feature_names;
    if (!model.converged) table.warnings.push_back("model did not converge; scores use its last iterate");

    std::size_t offset = 0;
    for (std::size_t j = 0; j < model.thresholds.p(); ++j) {
        const auto& cuts = model.thresholds.cuts[j];
        RiskCovariate cov{model.feature_names[j], j, {}};
        RiskLevel cur;
        cur.shifted = 0.0;
        for (std::size_t k = 0; k < cuts.size(); ++k) {
            const double v = model.beta[offset + k];
            if (std::abs(v - cur.shifted) <= merge_tol) continue;
            cur.hi = cuts[k];
            cov.levels.push_back(cur);
            cur = RiskLevel{};
            cur.lo = cuts[k];
            cur.shifted = v;
        }
        cov.levels.push_back(cur);
        offset += cuts.size();
        if (cov.levels.size() < 2) continue;
        double lo = cov.levels.front().shifted;
        for (const auto& l : cov.levels) lo = std::min(lo, l.shifted);
        for (auto& l : cov.levels) l.shifted -= lo;
        table.covariates.push_back(std::move(cov));
    }

    for (const auto& c : table.covariates) {
        double hi = 0.0;
        for (const auto& l : c.levels) hi = std::max(hi, l.shifted);
        table.global_scale += hi;
    }
    if (table.covariates.empty()) {
        table.warnings.push_back("all coefficient blocks are constant; the risk table is empty");
        return table;
    }
    for (auto& c : table.covariates) {
        for (auto& l : c.levels) l.contribution = l.shifted / table.global_scale * 100.0;
    }
    return table;
}

double score_individual(const RiskScoreTable& table, std::span<const double> x) {
    if (x.size() != table.feature_names.size()) {
        throw ValidationError("risk score: expected " + std::to_string(table.feature_names.size()) +
                              " covariate values, got " + std::to_string(x.size()));
    }
    if (table.covariates.empty()) return 0.0;
    double raw = 0.0;
    for (const auto& c : table.covariates) {
        const double v = x[c.index];
        if (!std::isfinite(v)) throw ValidationError("risk score: covariate '" + c.name + "' is not finite");
        raw += level_for(c, v).shifted;
    }
    return raw / table.global_scale * 100.0;
}

std::vector<double> score_dataset(const RiskScoreTable& table, const Dataset& data) {
    if (data.feature_names() != table.feature_names) {
        throw ValidationError("risk score: data covariates do not match the model's covariates");
    }
    std::vector<double> out(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) out[i] = score_individual(table, data.row(i));
    return out;
}

std::string risk_table_csv(const RiskScoreTable& table) {
    std::string out = "variable,range,score\n";
    for (const auto& c : table.covariates) {
        for (const auto& l : c.levels) {
            out += csv::join({c.name, range_label(l), csv::format_fixed(l.contribution, 2)}) + "\n";
        }
    }
    return out;
}

}  // namespace filterlr
