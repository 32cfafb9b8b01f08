#include "filterlr/fused_logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "filterlr/error.hpp"

namespace filterlr {

namespace {

/// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double soft_threshold(double v, double a) {
    if (v > a) return v - a;
    if (v < -a) return v + a;
    return 0.0;
}

double l1_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

void check_labels(const TransformedDesign& design, std::span<const Label> y) {
    if (y.size() != design.n()) {
        throw ValidationError("solver: " + std::to_string(y.size()) + " labels for a design with " +
                              std::to_string(design.n()) + " rows");
    }
}

/// Gradient from linear predictors: residual tanh(f) - y, scaled by 1/n.
void gradient_at(const TransformedDesign& design, std::span<const Label> y, std::span<const double> f,
                 std::vector<double>& residual, double& grad_b, std::span<double> grad_theta) {
    const std::size_t n = y.size();
    residual.resize(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        residual[i] = std::tanh(f[i]) - y[i];
        sum += residual[i];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    grad_b = sum * inv_n;
    design.transpose_multiply(residual, grad_theta);
    for (double& g : grad_theta) g *= inv_n;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("solver: lambda must be >= 0");
    if (!(tol > 0.0)) throw ValidationError("solver: tol must be > 0");
    if (max_iters < 1) throw ValidationError("solver: max_iters must be >= 1");
    if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz)) throw ValidationError("solver: lipschitz must be >= 0");
}

double logistic_loss(std::span<const double> f, std::span<const Label> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += softplus(-2.0 * y[i] * f[i]);
    return s / static_cast<double>(f.size());
}

LossGrad loss_grad(std::span<const double> theta, double intercept, const TransformedDesign& design,
                   std::span<const Label> y) {
    check_labels(design, y);
    std::vector<double> f(design.n());
    design.multiply(theta, intercept, f);
    LossGrad out;
    out.loss = logistic_loss(f, y);
    out.grad.assign(design.cols() + 1, 0.0);
    std::vector<double> residual;
    gradient_at(design, y, f, residual, out.grad[0], std::span<double>(out.grad).subspan(1));
    return out;
}

double l1_objective(std::span<const double> theta, double intercept, const TransformedDesign& design,
                    std::span<const Label> y, double lambda) {
    check_labels(design, y);
    std::vector<double> f(design.n());
    design.multiply(theta, intercept, f);
    return logistic_loss(f, y) + lambda * l1_norm(theta);
}

double fused_objective(std::span<const double> beta, double intercept, const ThresholdedDesign& design,
                       std::span<const Label> y, double lambda) {
    if (beta.size() != design.cols() || y.size() != design.n()) {
        throw ValidationError("fused_objective: shape mismatch");
    }
    std::vector<double> f(design.n(), intercept);
    for (std::size_t i = 0; i < design.n(); ++i) {
        for (std::size_t c = 0; c < design.cols(); ++c) f[i] += design.value(i, c) * beta[c];
    }
    double penalty = 0.0;
    for (std::size_t j = 0; j < design.p(); ++j) {
        double prev = 0.0;
        for (std::size_t k = 0; k < design.block_sizes()[j]; ++k) {
            const double b = beta[design.offsets()[j] + k];
            penalty += std::abs(b - prev);
            prev = b;
        }
    }
    return logistic_loss(f, y) + lambda * penalty;
}

double kkt_residual(std::span<const double> theta, std::span<const double> grad, double lambda, bool intercept) {
    double r = intercept ? std::abs(grad[0]) : 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double g = grad[k + 1];
        const double v = theta[k] == 0.0 ? std::max(std::abs(g) - lambda, 0.0)
                                         : std::abs(g + lambda * (theta[k] > 0.0 ? 1.0 : -1.0));
        r = std::max(r, v);
    }
    return r;
}

double null_intercept(std::span<const Label> y) {
    double mean = 0.0;
    for (Label v : y) mean += v;
    mean /= static_cast<double>(y.size());
    return std::atanh(mean);
}

double lambda_max(const TransformedDesign& design, std::span<const Label> y) {
    check_labels(design, y);
    const double b0 = null_intercept(y);
    std::vector<double> r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] - std::tanh(b0);
    std::vector<double> g(design.cols());
    design.transpose_multiply(r, g);
    double m = 0.0;
    for (double v : g) m = std::max(m, std::abs(v));
    return m / static_cast<double>(y.size());
}

double estimate_lipschitz(const TransformedDesign& design, bool intercept, int iterations) {
    const std::size_t k = design.cols();
    const double inv_n = 1.0 / static_cast<double>(design.n());
    std::vector<double> v(k, 1.0);
    double v0 = intercept ? 1.0 : 0.0;
    std::vector<double> u(design.n());
    std::vector<double> w(k);
    double estimate = intercept ? 1.0 : 0.0;
    for (int it = 0; it < iterations; ++it) {
        double norm = v0 * v0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) break;
        for (double& x : v) x /= norm;
        v0 /= norm;
        design.multiply(v, v0, u);
        design.transpose_multiply(u, w);
        double w0 = 0.0;
        if (intercept) {
            for (double x : u) w0 += x;
        }
        double rayleigh = v0 * w0;
        for (std::size_t c = 0; c < k; ++c) rayleigh += v[c] * w[c];
        estimate = std::max(estimate, rayleigh * inv_n);
        v.swap(w);
        v0 = w0;
    }
    return std::max(estimate, 1e-12);
}

SolverResult solve_l1_logistic(const TransformedDesign& design, std::span<const Label> y, const SolverConfig& cfg,
                               const WarmStart* warm) {
    cfg.validate();
    check_labels(design, y);
    const std::size_t n = design.n();
    const std::size_t k = design.cols();
    const double lambda = cfg.lambda;
    const auto& offsets = design.offsets();

    SolverResult res;
    std::vector<double> theta(k, 0.0);
    double b = cfg.intercept ? null_intercept(y) : 0.0;
    if (warm) {
        if (!warm->theta.empty()) {
            if (warm->theta.size() != k) throw ValidationError("solver: warm start has the wrong length");
            std::copy(warm->theta.begin(), warm->theta.end(), theta.begin());
        }
        if (cfg.intercept) b = warm->intercept;
    }

    std::vector<double> f(n);
    design.multiply(theta, b, f);
    double loss = logistic_loss(f, y);
    double objective = loss + lambda * l1_norm(theta);
    std::vector<double> residual;
    std::vector<double> grad(k);
    double grad_b = 0.0;
    gradient_at(design, y, f, residual, grad_b, grad);
    if (!cfg.intercept) grad_b = 0.0;

    // Proximal steps only touch a working set of blocks: blocks with a
    // non-zero coefficient or a KKT violation at zero. Coordinates outside it
    // stay at zero; the full gradient is checked before declaring convergence.
    std::vector<char> in_set(design.p(), 0);
    std::vector<std::size_t> blocks;
    std::vector<std::size_t> coords;
    auto grow_working_set = [&] {
        bool added = false;
        for (std::size_t j = 0; j < design.p(); ++j) {
            if (in_set[j]) continue;
            bool want = false;
            for (std::size_t c = offsets[j]; c < offsets[j + 1]; ++c) {
                want |= theta[c] != 0.0 || std::abs(grad[c]) > lambda;
            }
            if (!want) continue;
            in_set[j] = 1;
            added = true;
        }
        if (added) {
            blocks.clear();
            coords.clear();
            for (std::size_t j = 0; j < design.p(); ++j) {
                if (!in_set[j]) continue;
                blocks.push_back(j);
                for (std::size_t c = offsets[j]; c < offsets[j + 1]; ++c) coords.push_back(c);
            }
        }
        return added;
    };
    auto kkt_over = [&](std::span<const std::size_t> cs, bool all) {
        double r = cfg.intercept ? std::abs(grad_b) : 0.0;
        const std::size_t count = all ? k : cs.size();
        for (std::size_t q = 0; q < count; ++q) {
            const std::size_t c = all ? q : cs[q];
            const double v = theta[c] == 0.0 ? std::max(std::abs(grad[c]) - lambda, 0.0)
                                             : std::abs(grad[c] + lambda * (theta[c] > 0.0 ? 1.0 : -1.0));
            r = std::max(r, v);
        }
        return r;
    };
    grow_working_set();

    const double lipschitz = cfg.lipschitz > 0.0 ? cfg.lipschitz : estimate_lipschitz(design, cfg.intercept);
    double step = cfg.step_rule == StepRule::FixedLipschitz ? 1.0 / (1.02 * lipschitz) : 1.0 / lipschitz;

    // Base point of the proximal step (the current iterate unless accelerating).
    std::vector<double> base_theta = theta;
    double base_b = b;
    double base_loss = loss;
    std::vector<double> base_grad = grad;
    double base_grad_b = grad_b;
    auto reset_base = [&] {
        base_theta = theta;
        base_b = b;
        base_loss = loss;
        base_grad = grad;
        base_grad_b = grad_b;
    };

    std::vector<double> new_theta(k, 0.0);
    std::vector<double> new_f(n);
    std::vector<double> new_grad(k);
    std::vector<double> prev_theta = theta;
    double prev_b = b;
    double momentum_t = 1.0;
    double new_b = b;
    double new_loss = loss;
    std::vector<double> base_f;

    res.converged = false;
    int it = 0;
    for (it = 1; it <= cfg.max_iters; ++it) {
        bool restarted = false;
        for (;;) {
            int halvings = 0;
            for (;;) {
                // Quadratic upper model around the base point; halve the step until it holds.
                double dd = 0.0;
                double lin = 0.0;
                for (std::size_t c : coords) {
                    new_theta[c] = soft_threshold(base_theta[c] - step * base_grad[c], step * lambda);
                    const double d = new_theta[c] - base_theta[c];
                    dd += d * d;
                    lin += base_grad[c] * d;
                }
                new_b = cfg.intercept ? base_b - step * base_grad_b : 0.0;
                const double db = new_b - base_b;
                dd += db * db;
                lin += base_grad_b * db;
                design.multiply(new_theta, new_b, new_f);
                new_loss = logistic_loss(new_f, y);
                const double model = base_loss + lin + dd / (2.0 * step);
                if (new_loss <= model + 1e-13 * std::max(1.0, std::abs(base_loss))) break;
                step *= 0.5;
                if (++halvings > 60) break;
            }
            const double trial = new_loss + lambda * l1_norm(new_theta);
            if (cfg.accelerate && !restarted && trial > objective) {
                // Momentum overshot: restart from the current iterate.
                reset_base();
                momentum_t = 1.0;
                restarted = true;
                continue;
            }
            break;
        }

        const double new_obj = new_loss + lambda * l1_norm(new_theta);
        const double rel = (objective - new_obj) / std::max(std::abs(objective), 1e-300);
        prev_theta.swap(theta);
        prev_b = b;
        theta = new_theta;
        b = new_b;
        f.swap(new_f);
        loss = new_loss;
        objective = new_obj;
        if (cfg.record_trace) res.trace.push_back(objective);

        residual.resize(n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            residual[i] = std::tanh(f[i]) - y[i];
            sum += residual[i];
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        grad_b = cfg.intercept ? sum * inv_n : 0.0;
        design.transpose_multiply_blocks(residual, blocks, grad);
        for (std::size_t c : coords) grad[c] *= inv_n;

        if (rel < cfg.tol && kkt_over(coords, false) <= 10.0 * cfg.tol) {
            design.transpose_multiply(residual, grad);
            for (double& g : grad) g *= inv_n;
            const double kkt = kkt_over({}, true);
            if (kkt <= 10.0 * cfg.tol) {
                res.converged = true;
                res.kkt_residual = kkt;
                break;
            }
            if (grow_working_set()) {
                reset_base();
                momentum_t = 1.0;
                prev_theta = theta;
                prev_b = b;
                continue;
            }
        }

        if (cfg.step_rule == StepRule::Backtracking) step *= 1.25;

        if (cfg.accelerate) {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum_t * momentum_t));
            const double w = (momentum_t - 1.0) / t_next;
            momentum_t = t_next;
            if (w == 0.0) {
                reset_base();
                continue;
            }
            for (std::size_t c : coords) base_theta[c] = theta[c] + w * (theta[c] - prev_theta[c]);
            base_b = cfg.intercept ? b + w * (b - prev_b) : 0.0;
            base_f.resize(n);
            design.multiply(base_theta, base_b, base_f);
            base_loss = logistic_loss(base_f, y);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                residual[i] = std::tanh(base_f[i]) - y[i];
                s += residual[i];
            }
            base_grad_b = cfg.intercept ? s * inv_n : 0.0;
            design.transpose_multiply_blocks(residual, blocks, base_grad);
            for (std::size_t c : coords) base_grad[c] *= inv_n;
        } else {
            reset_base();
        }
    }

    if (!res.converged) {
        std::vector<double> r;
        gradient_at(design, y, f, r, grad_b, grad);
        if (!cfg.intercept) grad_b = 0.0;
        res.kkt_residual = kkt_over({}, true);
    }
    res.theta = std::move(theta);
    res.intercept = b;
    res.loss = loss;
    res.objective = loss + lambda * l1_norm(res.theta);
    res.iterations = std::min(it, cfg.max_iters);
    return res;
}

std::vector<std::size_t> FilterModel::block_sizes() const {
    std::vector<std::size_t> out;
    out.reserve(thresholds.cuts.size());
    for (const auto& c : thresholds.cuts) out.push_back(c.size());
    return out;
}

std::vector<std::size_t> FilterModel::selected() const {
    std::vector<std::size_t> out;
    std::size_t o = 0;
    const auto blocks = block_sizes();
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        bool any = false;
        for (std::size_t k = 0; k < blocks[j]; ++k) any |= theta[o + k] != 0.0;
        if (any) out.push_back(j);
        o += blocks[j];
    }
    return out;
}

void FilterModel::validate() const {
    thresholds.validate();
    if (feature_names.size() != thresholds.p()) {
        throw ValidationError("model: feature names and thresholds disagree in length");
    }
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
        if (feature_names[j] != thresholds.names[j]) {
            throw ValidationError("model: threshold covariate '" + thresholds.names[j] +
                                  "' does not match feature '" + feature_names[j] + "'");
        }
    }
    const std::size_t k = thresholds.total_levels();
    if (theta.size() != k || beta.size() != k || column_means.size() != k) {
        throw ValidationError("model: coefficient vectors must have " + std::to_string(k) + " entries");
    }
    if (DifferenceTransform(block_sizes()).from_theta(theta) != beta) {
        throw ValidationError("model: B is not the cumulative sum of theta");
    }
    if (!std::isfinite(intercept)) throw ValidationError("model: intercept is not finite");
}

FilterModel fit(const ThresholdedDesign& design, std::span<const Label> y, const DifferenceTransform& t,
                const SolverConfig& cfg, const WarmStart* warm) {
    if (!design.centered()) throw ValidationError("fit: the design must be centered");
    if (y.size() != design.n()) throw ValidationError("fit: label count does not match the design");
    bool pos = false;
    bool neg = false;
    for (Label v : y) (v > 0 ? pos : neg) = true;
    if (!pos || !neg) throw ValidationError("fit: both classes must be present");

    const TransformedDesign z = transform_design(design, t);
    const SolverResult r = solve_l1_logistic(z, y, cfg, warm);
    FilterModel m;
    m.intercept = r.intercept;
    m.theta = r.theta;
    m.beta = t.from_theta(r.theta);
    m.column_means = design.column_means();
    m.lambda = cfg.lambda;
    m.iterations = r.iterations;
    m.converged = r.converged;
    m.kkt_residual = r.kkt_residual;
    return m;
}

FilterModel fit_model(const Dataset& data, const ThresholdSet& thresholds, const SolverConfig& cfg) {
    data.require_fittable();
    const ThresholdedDesign design = center(encode(data, thresholds));
    FilterModel m = fit(design, data.labels(), DifferenceTransform::for_design(design), cfg);
    m.feature_names = data.feature_names();
    m.thresholds = thresholds;
    return m;
}

std::vector<double> linear_predictor(const FilterModel& model, const Dataset& data) {
    if (data.feature_names() != model.feature_names) {
        throw ValidationError("predict: data covariates do not match the model's covariates");
    }
    const LevelMatrix lv = encode_levels(data, model.thresholds);
    double shift = model.intercept;
    for (std::size_t c = 0; c < model.beta.size(); ++c) shift -= model.column_means[c] * model.beta[c];
    std::vector<double> f(data.n(), shift);
    std::size_t o = 0;
    std::vector<double> level_value;
    for (std::size_t j = 0; j < lv.p(); ++j) {
        const std::size_t kj = lv.block_sizes[j];
        level_value.assign(kj + 1, 0.0);
        bool any = false;
        for (std::size_t k = 1; k <= kj; ++k) {
            level_value[k] = model.beta[o + k - 1];
            any |= level_value[k] != 0.0;
        }
        if (any) {
            for (std::size_t i = 0; i < data.n(); ++i) f[i] += level_value[lv.level(i, j)];
        }
        o += kj;
    }
    return f;
}

double probability_from_score(double f) {
    double p = 0.0;
    if (f >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-2.0 * f));
    } else {
        const double e = std::exp(2.0 * f);
        p = e / (1.0 + e);
    }
    return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

std::vector<double> predict_proba(const FilterModel& model, const Dataset& data) {
    std::vector<double> f = linear_predictor(model, data);
    for (double& v : f) v = probability_from_score(v);
    return f;
}

std::vector<Label> classify(const FilterModel& model, const Dataset& data, double cutoff) {
    if (!(cutoff > 0.0 && cutoff < 1.0)) throw ValidationError("classify: cutoff must lie in (0, 1)");
    const auto prob = predict_proba(model, data);
    std::vector<Label> out(prob.size());
    for (std::size_t i = 0; i < prob.size(); ++i) out[i] = prob[i] > cutoff ? 1 : -1;
    return out;
}

std::vector<SolverResult> fit_path(const TransformedDesign& design, std::span<const Label> y,
                                   std::span<const double> lambdas, const SolverConfig& base,
                                   const PathConfig& path) {
    check_labels(design, y);
    std::vector<SolverResult> out;
    const double null_loss = [&] {
        std::vector<double> f(y.size(), null_intercept(y));
        return logistic_loss(f, y);
    }();
    const double lipschitz = base.lipschitz > 0.0 ? base.lipschitz : estimate_lipschitz(design, base.intercept);
    double prev_ratio = 0.0;
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        if (l > 0 && !(lambdas[l] < lambdas[l - 1])) {
            throw ValidationError("fit_path: lambda grid must be strictly decreasing");
        }
        SolverConfig cfg = base;
        cfg.lambda = lambdas[l];
        cfg.lipschitz = lipschitz;
        SolverResult r;
        if (out.empty()) {
            r = solve_l1_logistic(design, y, cfg);
        } else {
            const WarmStart warm{out.back().intercept, out.back().theta};
            r = solve_l1_logistic(design, y, cfg, &warm);
        }
        const double ratio = null_loss > 0.0 ? 1.0 - r.loss / null_loss : 1.0;
        out.push_back(std::move(r));
        if (path.early_stop) {
            if (ratio > path.max_dev_ratio) break;
            if (out.size() >= 5 && ratio - prev_ratio < path.min_dev_change * ratio) break;
        }
        prev_ratio = ratio;
    }
    return out;
}

}  // namespace filterlr
