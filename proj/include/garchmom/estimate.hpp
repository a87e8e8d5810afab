#ifndef GARCHMOM_ESTIMATE_HPP
#define GARCHMOM_ESTIMATE_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "garchmom/common.hpp"
#include "garchmom/model.hpp"

namespace garchmom {

enum class ModelKind { Garch11, Gjr };
enum class InnovationKind { Normal, StudentT };

struct FitOptions {
    bool fix_mu = false;       // hold mu at the sample mean instead of estimating it
    double tol = 1e-10;        // simplex spread tolerance on the objective
    std::size_t max_iter = 4000;
    std::optional<GjrParams> warm_start;
    double warm_start_nu = 8.0;
};

struct FitResult {
    GjrParams params;
    std::optional<double> nu;  // Student t only
    double loglik = 0.0;
    std::vector<double> std_errors;  // order: mu, omega, alpha, (lambda,) (nu)... see labels
    std::vector<std::string> labels;
    bool converged = false;
    std::size_t iterations = 0;
};

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Nelder-Mead simplex minimization; deterministic (no RNG, fixed initial
/// simplex spread). Returns the best point and writes iterations/converged.
inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x0, double tol,
                                       std::size_t max_iter, std::size_t& iters_out,
                                       bool& converged_out) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += simplex[i + 1][i] != 0.0 ? 0.10 * std::fabs(simplex[i + 1][i]) + 0.05
                                                      : 0.25;
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

    std::size_t it = 0;
    converged_out = false;
    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            s2[i] = simplex[idx[i]];
            f2[i] = fv[idx[i]];
        }
        simplex.swap(s2);
        fv.swap(f2);
    };
    for (; it < max_iter; ++it) {
        order();
        if (std::fabs(fv[n] - fv[0]) <= tol * (std::fabs(fv[0]) + tol)) {
            converged_out = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
        auto point = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
            return p;
        };
        std::vector<double> xr = point(-1.0);
        const double fr = f(xr);
        if (fr < fv[0]) {
            std::vector<double> xe = point(-2.0);
            const double fe = f(xe);
            if (fe < fr) {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            std::vector<double> xc = point(fr < fv[n] ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fv[n])) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }
    order();
    iters_out = it;
    return simplex[0];
}

/// Unconstrained coordinates <-> model parameters. The map enforces
/// omega > 0, alpha >= 0, phi in (0,1), alpha + lambda/2 >= 0 and
/// alpha + lambda >= 0, so the likelihood never sees an infeasible point.
struct Reparam {
    ModelKind model;
    InnovationKind innovation;
    bool fix_mu;
    double fixed_mu = 0.0;

    std::size_t dim() const {
        std::size_t d = 3;                           // hbar, phi, beta share
        if (!fix_mu) ++d;                            // mu
        if (model == ModelKind::Gjr) ++d;            // asymmetry split
        if (innovation == InnovationKind::StudentT) ++d;  // nu
        return d;
    }

    // theta layout: [mu?] log_hbar logit_phi logit_beta_share [split?] [log(nu-2)?]
    // Coordinates are clamped so the sigmoids never saturate to exactly 0 or
    // 1 and omega stays strictly positive under any simplex excursion.
    void unpack(const std::vector<double>& theta, GjrParams& p, double& nu) const {
        std::size_t k = 0;
        p.mu = fix_mu ? fixed_mu : theta[k++];
        const double hbar = std::exp(std::clamp(theta[k++], -600.0, 600.0));
        const double phi = sigmoid(std::clamp(theta[k++], -30.0, 30.0));
        const double beta_share = sigmoid(std::clamp(theta[k++], -30.0, 30.0));
        p.beta = phi * beta_share;
        const double arch = phi * (1.0 - beta_share);  // alpha + lambda * F0
        if (model == ModelKind::Gjr) {
            // alpha = arch * 2 s, lambda = 2 arch (1 - 2s) with s in (0,1):
            // s = 1/2 is the symmetric point, s -> 1 gives lambda -> -2 arch
            // with alpha + lambda = 2 arch (1 - s) >= 0 throughout.
            const double s = sigmoid(std::clamp(theta[k++], -30.0, 30.0));
            p.alpha = arch * 2.0 * s;
            p.lambda = 2.0 * arch * (1.0 - 2.0 * s);
        } else {
            p.alpha = arch;
            p.lambda = 0.0;
        }
        p.omega = hbar * (1.0 - phi);
        nu = innovation == InnovationKind::StudentT
                 ? 2.0 + std::exp(std::clamp(theta[k++], -30.0, 30.0))
                 : 0.0;
    }

    std::vector<double> pack(const GjrParams& p, double nu) const {
        std::vector<double> theta;
        if (!fix_mu) theta.push_back(p.mu);
        const double arch = p.alpha + 0.5 * p.lambda;
        const double phi = std::clamp(arch + p.beta, 1e-8, 1.0 - 1e-8);
        theta.push_back(std::log(std::max(1e-300, p.omega / (1.0 - phi))));
        theta.push_back(logit(phi));
        theta.push_back(logit(std::clamp(p.beta / phi, 1e-8, 1.0 - 1e-8)));
        if (model == ModelKind::Gjr) {
            const double s = arch > 0.0 ? std::clamp(0.5 * p.alpha / arch, 1e-6, 1.0 - 1e-6)
                                        : 0.5;
            theta.push_back(logit(s));
        }
        if (innovation == InnovationKind::StudentT)
            theta.push_back(std::log(std::max(1e-8, nu - 2.0)));
        return theta;
    }
};

/// Conditional log likelihood with h1 initialized at the sample variance.
inline double log_likelihood(std::span<const double> returns, const GjrParams& p,
                             InnovationKind innovation, double nu, double h0) {
    assert(p.omega > 0.0 && p.alpha >= 0.0 && p.beta >= 0.0);
    const double log_2pi = 1.8378770664093454836;
    double h = h0;
    KahanSum ll;
    if (innovation == InnovationKind::Normal) {
        for (double r : returns) {
            const double eps = r - p.mu;
            if (!(h > 0.0)) return -1e300;
            ll.add(-0.5 * (log_2pi + std::log(h) + eps * eps / h));
            h = p.omega + (p.alpha + (eps < 0.0 ? p.lambda : 0.0)) * eps * eps + p.beta * h;
        }
        return ll.value();
    }
    if (!(nu > 2.0)) return -1e300;
    const double log_c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                         0.5 * std::log(3.14159265358979323846 * (nu - 2.0));
    for (double r : returns) {
        const double eps = r - p.mu;
        if (!(h > 0.0)) return -1e300;
        const double x2 = eps * eps / h;
        ll.add(log_c - 0.5 * std::log(h) -
               0.5 * (nu + 1.0) * std::log1p(x2 / (nu - 2.0)));
        h = p.omega + (p.alpha + (eps < 0.0 ? p.lambda : 0.0)) * eps * eps + p.beta * h;
    }
    return ll.value();
}

/// Gauss-Jordan inverse with partial pivoting for the small OPG matrices.
inline bool invert_in_place(std::vector<std::vector<double>>& a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) return false;
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        const double d = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double m = a[r][col];
            if (m == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= m * a[col][j];
                inv[r][j] -= m * inv[col][j];
            }
        }
    }
    a = std::move(inv);
    return true;
}

}  // namespace detail

/// Quasi-maximum-likelihood fit of a GARCH(1,1) or GJR model with normal or
/// Student t innovations.
///
/// The optimizer is a deterministic Nelder-Mead simplex over a smooth
/// reparameterization (positivity and phi < 1 hold by construction), started
/// from a small ladder of conventional initial points and restarted from the
/// best point once. Standard errors come from the outer product of the
/// per-observation score, with central-difference gradients in the original
/// parameter space.
inline FitResult fit(std::span<const double> returns, ModelKind model,
                     InnovationKind innovation, const FitOptions& options = {}) {
    if (returns.size() < 250)
        throw TooFewObservationsError("fit needs at least 250 observations");
    for (double r : returns)
        if (!std::isfinite(r)) throw InvalidParamsError("returns must be finite");

    KahanSum mean_acc;
    for (double r : returns) mean_acc.add(r);
    const double sample_mean = mean_acc.value() / static_cast<double>(returns.size());
    KahanSum var_acc;
    for (double r : returns) var_acc.add((r - sample_mean) * (r - sample_mean));
    const double sample_var = var_acc.value() / static_cast<double>(returns.size() - 1);
    if (!(sample_var > 0.0)) throw DegenerateSampleError("return series has zero variance");

    detail::Reparam rep{model, innovation, options.fix_mu, sample_mean};
    const double h0 = sample_var;

    auto objective = [&](const std::vector<double>& theta) {
        GjrParams p;
        double nu = 0.0;
        rep.unpack(theta, p, nu);
        return -detail::log_likelihood(returns, p, innovation, nu, h0);
    };

    // starting points: an optional warm start, then the conventional ladder
    // with variance-targeted omega
    std::vector<std::pair<GjrParams, double>> starts;
    if (options.warm_start) starts.push_back({*options.warm_start, options.warm_start_nu});
    const double start_alpha[3] = {0.03, 0.08, 0.05};
    const double start_beta[3] = {0.90, 0.85, 0.88};
    for (int i = 0; i < 3; ++i) {
        GjrParams p0;
        p0.mu = sample_mean;
        p0.alpha = start_alpha[i];
        p0.lambda = 0.0;
        p0.beta = start_beta[i];
        p0.omega = sample_var * (1.0 - start_alpha[i] - start_beta[i]);
        starts.push_back({p0, 8.0});
    }
    std::vector<double> best;
    double best_f = std::numeric_limits<double>::infinity();
    std::size_t total_iters = 0;
    bool any_converged = false;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        std::size_t iters = 0;
        bool conv = false;
        std::vector<double> x =
            detail::nelder_mead(objective, rep.pack(starts[i].first, starts[i].second),
                                options.tol, options.max_iter, iters, conv);
        total_iters += iters;
        const double fx = objective(x);
        if (fx < best_f) {
            best_f = fx;
            best = x;
            any_converged = conv;
        }
        if (conv && i == 0) break;  // first start converged; the rest are fallbacks
    }
    // polish from the best point
    {
        std::size_t iters = 0;
        bool conv = false;
        std::vector<double> x =
            detail::nelder_mead(objective, best, options.tol, options.max_iter, iters, conv);
        total_iters += iters;
        if (objective(x) <= best_f) {
            best = x;
            best_f = objective(x);
            any_converged = any_converged || conv;
        }
    }

    FitResult out;
    double nu = 0.0;
    rep.unpack(best, out.params, nu);
    if (innovation == InnovationKind::StudentT) out.nu = nu;
    out.loglik = -best_f;
    out.converged = any_converged && std::isfinite(out.loglik);
    out.iterations = total_iters;

    // OPG standard errors in the original parameter space
    std::vector<double> p_vec{out.params.mu, out.params.omega, out.params.alpha};
    out.labels = {"mu", "omega", "alpha"};
    if (model == ModelKind::Gjr) {
        p_vec.push_back(out.params.lambda);
        out.labels.push_back("lambda");
    }
    p_vec.push_back(out.params.beta);
    out.labels.push_back("beta");
    if (innovation == InnovationKind::StudentT) {
        p_vec.push_back(nu);
        out.labels.push_back("nu");
    }
    const std::size_t k = p_vec.size();
    auto loglik_terms = [&](const std::vector<double>& v, std::vector<double>& terms) {
        GjrParams p;
        std::size_t j = 0;
        p.mu = v[j++];
        p.omega = v[j++];
        p.alpha = v[j++];
        p.lambda = model == ModelKind::Gjr ? v[j++] : 0.0;
        p.beta = v[j++];
        const double nu_v = innovation == InnovationKind::StudentT ? v[j++] : 0.0;
        terms.resize(returns.size());
        double h = h0;
        const double log_2pi = 1.8378770664093454836;
        const double log_c =
            innovation == InnovationKind::StudentT
                ? std::lgamma(0.5 * (nu_v + 1.0)) - std::lgamma(0.5 * nu_v) -
                      0.5 * std::log(3.14159265358979323846 * (nu_v - 2.0))
                : 0.0;
        for (std::size_t i = 0; i < returns.size(); ++i) {
            const double eps = returns[i] - p.mu;
            if (innovation == InnovationKind::Normal) {
                terms[i] = -0.5 * (log_2pi + std::log(h) + eps * eps / h);
            } else {
                terms[i] = log_c - 0.5 * std::log(h) -
                           0.5 * (nu_v + 1.0) * std::log1p(eps * eps / h / (nu_v - 2.0));
            }
            h = p.omega + (p.alpha + (eps < 0.0 ? p.lambda : 0.0)) * eps * eps + p.beta * h;
        }
    };
    std::vector<std::vector<double>> opg(k, std::vector<double>(k, 0.0));
    std::vector<double> up, dn;
    std::vector<std::vector<double>> grads(k);
    for (std::size_t j = 0; j < k; ++j) {
        // relative step with a per-parameter floor (omega lives at variance scale)
        const double floor = out.labels[j] == "omega" ? 1e-12 : 1e-8;
        const double step = std::max(1e-5 * std::fabs(p_vec[j]), floor);
        std::vector<double> vp = p_vec, vm = p_vec;
        vp[j] += step;
        vm[j] -= step;
        loglik_terms(vp, up);
        loglik_terms(vm, dn);
        grads[j].resize(returns.size());
        for (std::size_t i = 0; i < returns.size(); ++i)
            grads[j][i] = (up[i] - dn[i]) / (2.0 * step);
    }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) {
            KahanSum s;
            for (std::size_t i = 0; i < returns.size(); ++i) s.add(grads[a][i] * grads[b][i]);
            opg[a][b] = opg[b][a] = s.value();
        }
    out.std_errors.assign(k, std::numeric_limits<double>::quiet_NaN());
    if (detail::invert_in_place(opg))
        for (std::size_t j = 0; j < k; ++j)
            out.std_errors[j] = opg[j][j] > 0.0 ? std::sqrt(opg[j][j])
                                                : std::numeric_limits<double>::quiet_NaN();
    return out;
}

/// Rolling-window re-estimation: one fit per window position, warm-started
/// from the previous window's solution. Window failures are recorded in the
/// result (converged = false), not fatal.
inline std::vector<FitResult> rolling_fit(std::span<const double> returns, std::size_t window,
                                          std::size_t step, ModelKind model,
                                          InnovationKind innovation,
                                          const FitOptions& options = {}) {
    if (window > returns.size()) throw InvalidParamsError("window exceeds series length");
    if (step < 1) throw InvalidParamsError("step must be >= 1");
    std::vector<FitResult> results;
    for (std::size_t start = 0; start + window <= returns.size(); start += step) {
        FitOptions opt = options;
        if (!results.empty() && results.back().converged) {
            opt.warm_start = results.back().params;
            if (results.back().nu) opt.warm_start_nu = *results.back().nu;
        }
        FitResult r;
        try {
            r = fit(returns.subspan(start, window), model, innovation, opt);
        } catch (const Error&) {
            r.converged = false;
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace garchmom

#endif  // GARCHMOM_ESTIMATE_HPP
