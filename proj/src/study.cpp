#include "filterlr/study.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "filterlr/csv.hpp"
#include "filterlr/error.hpp"
#include "filterlr/evaluation.hpp"
#include "filterlr/parallel.hpp"
#include "filterlr/rng.hpp"

namespace filterlr {

namespace {

void add_forecast_metrics(std::vector<StudyRecord>& out, std::size_t n, int rep, const std::string& method,
                          std::span<const double> probs, std::span<const Label> labels) {
    const EvalReport r = evaluate(probs, labels);
    out.push_back({n, rep, method, "auc", r.auc});
    out.push_back({n, rep, method, "pauc", r.pauc_standardized});
    out.push_back({n, rep, method, "logs", r.logs});
    out.push_back({n, rep, method, "crps", r.crps});
    out.push_back({n, rep, method, "brier", r.brier});
}

bool both_classes(std::span<const Label> y) {
    bool pos = false;
    bool neg = false;
    for (Label v : y) (v > 0 ? pos : neg) = true;
    return pos && neg;
}

}  // namespace

void StudyResult::append(const StudyResult& other) {
    records.insert(records.end(), other.records.begin(), other.records.end());
    failures.insert(failures.end(), other.failures.begin(), other.failures.end());
}

std::vector<StudyRecord> run_replication(const StudyConfig& cfg, int rep) {
    const SimDesign& d = cfg.design;
    const std::uint64_t seed = derive_seed(d.rng_seed, d.n, static_cast<std::uint64_t>(rep));
    Rng rng(seed);
    const Dataset full = simulate_dataset(d, rng);
    std::vector<StudyRecord> out;
    out.push_back({d.n, rep, "data", "prevalence",
                   static_cast<double>(full.count_positive()) / static_cast<double>(full.n())});

    Dataset train = full;
    Dataset test;
    const auto n_train = static_cast<std::size_t>(std::llround(d.train_fraction * static_cast<double>(d.n)));
    const bool has_test = n_train < d.n;
    if (has_test) {
        std::vector<std::size_t> perm(d.n);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        const std::vector<std::size_t> tr(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
        const std::vector<std::size_t> te(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
        train = full.subset(tr);
        test = full.subset(te);
        if (!both_classes(test.labels())) throw RuntimeError("test split contains a single class");
    }

    PipelineConfig pc = cfg.pipeline;
    pc.bagging.rng_seed = derive_seed(seed, 1);
    pc.bagging.threads = 1;
    pc.cv.rng_seed = derive_seed(seed, 2);
    pc.cv.threads = 1;
    const PipelineResult fit = fit_pipeline(train, pc);
    const FilterModel& m = fit.model;

    out.push_back({d.n, rep, "FILTER", "lambda", m.lambda});
    out.push_back({d.n, rep, "FILTER", "selected", static_cast<double>(m.selected().size())});
    out.push_back({d.n, rep, "FILTER", "converged", m.converged ? 1.0 : 0.0});
    if (d.family != Family::PiecewiseII) {
        const SelectionReport s = selection_metrics(m, make_truth(d));
        out.push_back({d.n, rep, "FILTER", "mab_t", s.mab_t});
        out.push_back({d.n, rep, "FILTER", "rse_est", s.rse_est});
        out.push_back({d.n, rep, "FILTER", "rmse_est", s.rmse_est});
        out.push_back({d.n, rep, "FILTER", "sen_vs", s.sen_vs});
        out.push_back({d.n, rep, "FILTER", "spe_vs", s.spe_vs});
    } else {
        std::vector<bool> support(d.p, false);
        for (std::size_t j = 0; j < d.p0; ++j) support[j] = true;
        const auto [sen, spe] = variable_selection(m, support);
        out.push_back({d.n, rep, "FILTER", "sen_vs", sen});
        out.push_back({d.n, rep, "FILTER", "spe_vs", spe});
    }
    if (!has_test) return out;

    add_forecast_metrics(out, d.n, rep, "FILTER", predict_proba(m, test), test.labels());
    if (cfg.run_cart) {
        const auto prob = CartTree::fit(train, cfg.cart).predict_proba(test);
        add_forecast_metrics(out, d.n, rep, "CART", prob, test.labels());
    }
    if (cfg.run_bagged_cart) {
        const BaggedCartConfig bc{cfg.cart, cfg.cart_bags, pc.bagging.rng_seed};
        add_forecast_metrics(out, d.n, rep, "baggedCART", bagged_cart_proba(train, test, bc), test.labels());
    }
    return out;
}

StudyResult run_study(const StudyConfig& cfg) {
    cfg.design.validate();
    const auto reps = static_cast<std::size_t>(cfg.design.n_reps);
    std::vector<std::vector<StudyRecord>> per_rep(reps);
    std::vector<std::string> errors(reps);
    parallel_for(reps, cfg.threads, [&](std::size_t r) {
        try {
            per_rep[r] = run_replication(cfg, static_cast<int>(r));
        } catch (const std::exception& e) {
            errors[r] = e.what();
            if (errors[r].empty()) errors[r] = "unknown error";
        }
    });
    StudyResult res;
    for (std::size_t r = 0; r < reps; ++r) {
        if (!errors[r].empty()) {
            res.failures.push_back({cfg.design.n, static_cast<int>(r), errors[r]});
            continue;
        }
        res.records.insert(res.records.end(), per_rep[r].begin(), per_rep[r].end());
    }
    return res;
}

std::string study_long_csv(const StudyResult& result) {
    std::string out = "n,rep,method,metric,value\n";
    for (const auto& r : result.records) {
        out += std::to_string(r.n) + "," + std::to_string(r.rep) + "," + csv::escape(r.method) + "," +
               csv::escape(r.metric) + "," + csv::format_double(r.value) + "\n";
    }
    return out;
}

std::vector<SummaryRow> summarize(const StudyResult& result) {
    using Key = std::tuple<std::size_t, std::string, std::string>;
    std::map<Key, std::size_t> index;
    std::vector<SummaryRow> rows;
    std::vector<std::vector<double>> values;
    for (const auto& r : result.records) {
        const Key key{r.n, r.method, r.metric};
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, rows.size()).first;
            rows.push_back({r.n, r.method, r.metric, 0.0, 0.0, 0});
            values.emplace_back();
        }
        values[it->second].push_back(r.value);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& v = values[i];
        const double k = static_cast<double>(v.size());
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= k;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        rows[i].mean = mean;
        rows[i].sd = v.size() > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
        rows[i].reps = v.size();
    }
    return rows;
}

std::string study_summary_csv(std::span<const SummaryRow> rows) {
    std::string out = "n,method,metric,mean,sd,reps,formatted\n";
    for (const auto& r : rows) {
        const std::string formatted = csv::format_fixed(r.mean, 2) + "(" + csv::format_fixed(r.sd, 2) + ")";
        out += std::to_string(r.n) + "," + csv::escape(r.method) + "," + csv::escape(r.metric) + "," +
               csv::format_double(r.mean) + "," + csv::format_double(r.sd) + "," + std::to_string(r.reps) + "," +
               formatted + "\n";
    }
    return out;
}

double summary_mean(std::span<const SummaryRow> rows, std::size_t n, const std::string& method,
                    const std::string& metric) {
    for (const auto& r : rows) {
        if (r.n == n && r.method == method && r.metric == metric) return r.mean;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

RateFit fit_rate(std::span<const RatePoint> points) {
    if (points.size() < 2) throw ValidationError("fit_rate: at least two points are required");
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& p : points) {
        if (!(p.n > 0.0 && p.value > 0.0)) throw ValidationError("fit_rate: n and values must be positive");
        sx += std::log(p.n);
        sy += std::log(p.value);
    }
    const double k = static_cast<double>(points.size());
    const double mx = sx / k;
    const double my = sy / k;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& p : points) {
        const double dx = std::log(p.n) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(p.value) - my);
    }
    if (sxx == 0.0) throw ValidationError("fit_rate: n values must not all be equal");
    RateFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.points.assign(points.begin(), points.end());
    return f;
}

RateFit rate_study(std::span<const SummaryRow> rows) {
    std::vector<RatePoint> pts;
    for (const auto& r : rows) {
        if (r.method == "FILTER" && r.metric == "mab_t") pts.push_back({static_cast<double>(r.n), r.mean});
    }
    if (pts.size() < 4) throw ValidationError("rate_study: needs MAB_t at four or more sample sizes");
    return fit_rate(pts);
}

std::string rate_points_csv(const RateFit& fit) {
    std::string out = "n,mab_t,fitted\n";
    for (const auto& p : fit.points) {
        const double fitted = std::exp(fit.intercept + fit.slope * std::log(p.n));
        out += csv::format_double(p.n) + "," + csv::format_double(p.value) + "," + csv::format_double(fitted) + "\n";
    }
    return out;
}

std::string rate_fit_csv(const RateFit& fit) {
    return "slope,intercept\n" + csv::format_double(fit.slope) + "," + csv::format_double(fit.intercept) + "\n";
}

StudyPlan preset_plan(const std::string& name, int reps, std::uint64_t seed, unsigned threads) {
    StudyConfig base;
    base.design.n_reps = reps;
    base.design.rng_seed = seed;
    base.design.p = 500;
    base.design.p0 = 5;
    base.threads = threads;
    base.pipeline.bagging.n_bags = 100;
    base.pipeline.cv.n_folds = 5;
    base.pipeline.cv.rule = SelectionRule::OneSe;

    StudyPlan plan{name, {}};
    if (name == "table1") {
        base.design.family = Family::SingleThreshold;
        base.design.rho = 0.0;
        base.design.train_fraction = 1.0;
        base.pipeline.bagging.max_depth_per_bag = 1;
        base.pipeline.aggregation = Aggregation::mean();
        for (std::size_t n = 100; n <= 400; n += 50) {
            StudyConfig c = base;
            c.design.n = n;
            plan.configs.push_back(c);
        }
    } else if (name == "table2" || name == "table3") {
        base.design.family = name == "table2" ? Family::ThresholdI : Family::PiecewiseII;
        base.design.rho = name == "table2" ? 0.0 : 0.5;
        base.design.n = 400;
        base.design.train_fraction = 0.8;
        base.pipeline.bagging.max_depth_per_bag = kKMeansSplitsPerBag;
        base.pipeline.aggregation = Aggregation::kmeans(6);
        base.run_cart = true;
        base.run_bagged_cart = true;
        plan.configs.push_back(base);
    } else {
        throw ValidationError("unknown study '" + name + "' (expected table1, table2 or table3)");
    }
    return plan;
}

StudyResult run_plan(const StudyPlan& plan) {
    StudyResult all;
    for (const auto& c : plan.configs) all.append(run_study(c));
    return all;
}

}  // namespace filterlr
