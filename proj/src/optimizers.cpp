#include "rockrelax/optimizers.hpp"

#include <cmath>
#include <cstddef>
#include <deque>
#include <memory>
#include <stdexcept>

namespace rockrelax {

double InnerProduct::norm(const std::vector<double>& v) const {
    return std::sqrt(dot(v, v));
}

InnerProduct InnerProduct::euclidean() {
    InnerProduct ip;
    ip.dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            s += a[i] * b[i];
        return s;
    };
    ip.apply = [](const std::vector<double>& v) { return v; };
    return ip;
}

InnerProduct InnerProduct::diagonal(std::vector<double> weights) {
    auto w = std::make_shared<std::vector<double>>(std::move(weights));
    InnerProduct ip;
    ip.dot = [w](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            s += (*w)[i] * a[i] * b[i];
        return s;
    };
    ip.apply = [w](const std::vector<double>& v) {
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            out[i] = (*w)[i] * v[i];
        return out;
    };
    return ip;
}

namespace {

void validate(const LineSearchConfig& ls, const std::vector<double>& x0, double tol,
              int max_iter) {
    if (!(ls.armijo_c1 > 0.0 && ls.armijo_c1 < ls.wolfe_c2 && ls.wolfe_c2 < 1.0))
        throw std::invalid_argument("line search constants must satisfy 0 < c1 < c2 < 1");
    if (!(ls.backtrack_factor > 0.0 && ls.backtrack_factor < 1.0))
        throw std::invalid_argument("backtrack factor must lie in (0,1)");
    if (ls.max_backtracks < 0)
        throw std::invalid_argument("max_backtracks must be nonnegative");
    if (x0.empty())
        throw std::invalid_argument("optimizer start point is empty");
    if (!(tol >= 0.0))
        throw std::invalid_argument("tolerance must be nonnegative");
    if (max_iter < 0)
        throw std::invalid_argument("max_iter must be nonnegative");
}

} // namespace

OptimResult projected_gd(const Objective& f, const Gradient& grad, const Projection& project,
                         std::vector<double> x0, double tol, const LineSearchConfig& ls,
                         int max_iter, const InnerProduct& ip, ProjectedStop rule) {
    validate(ls, x0, tol, max_iter);
    const std::size_t n = x0.size();

    OptimResult res;
    std::vector<double> x = project(std::move(x0));
    double fx = f(x);
    std::vector<double> g = grad(x);
    OptimizerReport& rep = res.report;
    rep.objective_evals = 1;
    rep.gradient_evals = 1;
    rep.termination_reason = StopReason::max_iter;

    std::vector<double> trial(n), diff(n);
    for (int iter = 0; iter < max_iter; ++iter) {
        if (rule == ProjectedStop::step_norm) {
            for (std::size_t i = 0; i < n; ++i)
                diff[i] = x[i] - g[i];
            std::vector<double> px = project(diff);
            for (std::size_t i = 0; i < n; ++i)
                px[i] -= x[i];
            double dn = ip.norm(px);
            if (dn < tol || dn == 0.0) {
                rep.termination_reason = StopReason::tolerance;
                break;
            }
        } else {
            if (ip.norm(g) == 0.0) {
                rep.termination_reason = StopReason::tolerance;
                break;
            }
            // pair the iterate with the gradient over the components the
            // projection leaves free; ones pinned at an active bound carry a
            // permanent gradient and would keep the product from settling
            for (std::size_t i = 0; i < n; ++i)
                diff[i] = x[i] - g[i];
            const std::vector<double> px = project(diff);
            std::vector<double> xm = x, gm = g;
            for (std::size_t i = 0; i < n; ++i)
                if (px[i] != diff[i]) xm[i] = gm[i] = 0.0;
            if (rep.iterations > 0 && std::abs(ip.dot(xm, gm)) < tol) {
                rep.termination_reason = StopReason::tolerance;
                break;
            }
        }

        double alpha = 1.0;
        double ft = fx;
        bool accepted = false;
        for (int bt = 0; bt <= ls.max_backtracks; ++bt) {
            for (std::size_t i = 0; i < n; ++i)
                diff[i] = x[i] - alpha * g[i];
            trial = project(diff);
            ft = f(trial);
            ++rep.objective_evals;
            for (std::size_t i = 0; i < n; ++i)
                diff[i] = trial[i] - x[i];
            double dec = ip.dot(g, diff);
            if (dec < 0.0 && ft <= fx + ls.armijo_c1 * dec) {
                accepted = true;
                break;
            }
            alpha *= ls.backtrack_factor;
        }
        if (!accepted) {
            rep.termination_reason = StopReason::line_search_failure;
            break;
        }

        x.swap(trial);
        fx = ft;
        g = grad(x);
        ++rep.gradient_evals;
        ++rep.iterations;
    }

    rep.final_value = fx;
    res.x = std::move(x);
    return res;
}

OptimResult armijo_gd(const Objective& f, const Gradient& grad, std::vector<double> x0,
                      double tol, const LineSearchConfig& ls, int max_iter,
                      const InnerProduct& ip) {
    auto identity = [](const std::vector<double>& v) { return v; };
    return projected_gd(f, grad, identity, std::move(x0), tol, ls, max_iter, ip,
                        ProjectedStop::control_gradient_product);
}

OptimResult bfgs(const Objective& f, const Gradient& grad, std::vector<double> x0, double gtol,
                 int max_iter, const LineSearchConfig& ls, const InnerProduct& ip) {
    validate(ls, x0, gtol, max_iter);
    const std::size_t n = x0.size();

    OptimResult res;
    std::vector<double> x = std::move(x0);
    double fx = f(x);
    std::vector<double> g = grad(x);
    OptimizerReport& rep = res.report;
    rep.objective_evals = 1;
    rep.gradient_evals = 1;
    rep.termination_reason = StopReason::max_iter;

    // Row-major inverse-Hessian proxy, self-adjoint in the ip metric.
    std::vector<double> H(n * n, 0.0);
    auto reset_identity = [&] {
        std::fill(H.begin(), H.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            H[i * n + i] = 1.0;
    };
    reset_identity();
    bool scaled = false;

    std::vector<double> d(n), trial(n), s(n), y(n), hy(n);
    for (int iter = 0; iter < max_iter; ++iter) {
        if (ip.norm(g) < gtol) {
            rep.termination_reason = StopReason::tolerance;
            break;
        }

        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            const double* row = H.data() + i * n;
            for (std::size_t j = 0; j < n; ++j)
                acc += row[j] * g[j];
            d[i] = -acc;
        }
        double slope = ip.dot(g, d);
        if (!(slope < 0.0)) {
            reset_identity();
            scaled = false;
            for (std::size_t i = 0; i < n; ++i)
                d[i] = -g[i];
            slope = -ip.dot(g, g);
            if (!(slope < 0.0)) {
                rep.termination_reason = StopReason::tolerance;
                break;
            }
        }

        double alpha = 1.0;
        double ft = fx;
        bool accepted = false;
        for (int bt = 0; bt <= ls.max_backtracks; ++bt) {
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = x[i] + alpha * d[i];
            ft = f(trial);
            ++rep.objective_evals;
            if (ft <= fx + ls.armijo_c1 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= ls.backtrack_factor;
        }
        if (!accepted) {
            rep.termination_reason = StopReason::line_search_failure;
            break;
        }

        std::vector<double> gn = grad(trial);
        ++rep.gradient_evals;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = trial[i] - x[i];
            y[i] = gn[i] - g[i];
        }
        double ys = ip.dot(y, s);
        if (ys > 1e-12 * ip.norm(s) * ip.norm(y)) {
            if (!scaled) {
                double yy = ip.dot(y, y);
                std::fill(H.begin(), H.end(), 0.0);
                for (std::size_t i = 0; i < n; ++i)
                    H[i * n + i] = ys / yy;
                scaled = true;
            }
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                const double* row = H.data() + i * n;
                for (std::size_t j = 0; j < n; ++j)
                    acc += row[j] * y[j];
                hy[i] = acc;
            }
            std::vector<double> ws = ip.apply(s);
            std::vector<double> why = ip.apply(hy);
            double yhy = ip.dot(y, hy);
            double rho = 1.0 / ys;
            double coef = rho * (1.0 + rho * yhy);
            for (std::size_t i = 0; i < n; ++i) {
                double* row = H.data() + i * n;
                for (std::size_t j = 0; j < n; ++j)
                    row[j] += -rho * hy[i] * ws[j] - rho * s[i] * why[j] + coef * s[i] * ws[j];
            }
        }

        x.swap(trial);
        fx = ft;
        g.swap(gn);
        ++rep.iterations;
    }

    rep.final_value = fx;
    res.x = std::move(x);
    return res;
}

OptimResult lbfgs(const Objective& f, const Gradient& grad, std::vector<double> x0, double gtol,
                  int m, const LineSearchConfig& ls, int max_iter, const InnerProduct& ip) {
    validate(ls, x0, gtol, max_iter);
    if (m < 1)
        throw std::invalid_argument("lbfgs history size must be >= 1");
    const std::size_t n = x0.size();

    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> hist;
    double gamma = 1.0;

    OptimResult res;
    std::vector<double> x = std::move(x0);
    double fx = f(x);
    std::vector<double> g = grad(x);
    OptimizerReport& rep = res.report;
    rep.objective_evals = 1;
    rep.gradient_evals = 1;
    rep.termination_reason = StopReason::max_iter;

    std::vector<double> d(n), trial(n), alphas;
    for (int iter = 0; iter < max_iter; ++iter) {
        if (ip.norm(g) < gtol) {
            rep.termination_reason = StopReason::tolerance;
            break;
        }

        std::vector<double> q = g;
        alphas.assign(hist.size(), 0.0);
        for (std::size_t k = hist.size(); k-- > 0;) {
            const Pair& p = hist[k];
            double a = p.rho * ip.dot(p.s, q);
            alphas[k] = a;
            for (std::size_t i = 0; i < n; ++i)
                q[i] -= a * p.y[i];
        }
        for (std::size_t i = 0; i < n; ++i)
            q[i] *= gamma;
        for (std::size_t k = 0; k < hist.size(); ++k) {
            const Pair& p = hist[k];
            double b = p.rho * ip.dot(p.y, q);
            for (std::size_t i = 0; i < n; ++i)
                q[i] += (alphas[k] - b) * p.s[i];
        }
        for (std::size_t i = 0; i < n; ++i)
            d[i] = -q[i];

        double slope = ip.dot(g, d);
        if (!(slope < 0.0)) {
            hist.clear();
            gamma = 1.0;
            for (std::size_t i = 0; i < n; ++i)
                d[i] = -g[i];
            slope = -ip.dot(g, g);
            if (!(slope < 0.0)) {
                rep.termination_reason = StopReason::tolerance;
                break;
            }
        }

        double alpha = 1.0;
        double ft = fx;
        bool accepted = false;
        for (int bt = 0; bt <= ls.max_backtracks; ++bt) {
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = x[i] + alpha * d[i];
            ft = f(trial);
            ++rep.objective_evals;
            if (ft <= fx + ls.armijo_c1 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= ls.backtrack_factor;
        }
        if (!accepted) {
            rep.termination_reason = StopReason::line_search_failure;
            break;
        }

        std::vector<double> gn = grad(trial);
        ++rep.gradient_evals;
        Pair p;
        p.s.resize(n);
        p.y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            p.s[i] = trial[i] - x[i];
            p.y[i] = gn[i] - g[i];
        }
        double ys = ip.dot(p.y, p.s);
        bool curvature_ok = ip.dot(gn, d) >= ls.wolfe_c2 * slope &&
                            ys > 1e-12 * ip.norm(p.s) * ip.norm(p.y);
        if (curvature_ok) {
            gamma = ys / ip.dot(p.y, p.y);
            p.rho = 1.0 / ys;
            hist.push_back(std::move(p));
            if (static_cast<int>(hist.size()) > m)
                hist.pop_front();
        }

        x.swap(trial);
        fx = ft;
        g.swap(gn);
        ++rep.iterations;
    }

    rep.final_value = fx;
    res.x = std::move(x);
    return res;
}

} // namespace rockrelax
