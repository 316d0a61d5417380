#include "stakit/sinkhorn.hpp"

#include <cmath>
#include <stdexcept>

#include "stakit/errors.hpp"

namespace stakit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd safe_log(const Eigen::Ref<const Eigen::VectorXd>& x) {
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        out[i] = x[i] > 0.0 ? std::log(x[i]) : -kInf;
    return out;
}

// sup-norm difference; matching infinities count as zero distance
double sup_diff(const Eigen::Ref<const Eigen::VectorXd>& a,
                const Eigen::Ref<const Eigen::VectorXd>& b) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) continue;
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

// sum of exp over entries, -inf contributing zero, max-shifted
double sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
    const double m = v.maxCoeff();
    if (m == -kInf) return 0.0;
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::exp(v[i] - m);
    return std::exp(m) * s;
}

// sum_i x_i * a_i^(-eps/gamma) written as sum exp(log x - r*log a); terms with
// zero mass contribute zero even though their log scaling is -inf
double marginal_dual_sum(const Eigen::Ref<const Eigen::VectorXd>& lx,
                         const Eigen::Ref<const Eigen::VectorXd>& la, double rate) {
    Eigen::VectorXd e(lx.size());
    for (Eigen::Index i = 0; i < lx.size(); ++i)
        e[i] = lx[i] == -kInf ? -kInf : lx[i] - rate * la[i];
    return sum_exp(e);
}

void check_nonnegative(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite() || (m.array() < 0.0).any())
        throw std::domain_error(std::string(what) + " must be finite and nonnegative");
}

// limiting scalings for a pair where at least one side carries no mass
void zero_mass_column(const Eigen::Ref<const Eigen::VectorXd>& x,
                      const Eigen::Ref<const Eigen::VectorXd>& y, double sx,
                      Eigen::Ref<Eigen::VectorXd> la, Eigen::Ref<Eigen::VectorXd> lb) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (sx == 0.0) {
            la[i] = -kInf;
            lb[i] = y[i] > 0.0 ? kInf : -kInf;
        } else {
            la[i] = x[i] > 0.0 ? kInf : -kInf;
            lb[i] = -kInf;
        }
    }
}

} // namespace

void UotParams::validate() const {
    if (epsilon <= 0.0) throw std::domain_error("epsilon must be > 0");
    if (gamma <= 0.0) throw std::domain_error("gamma must be > 0");
    if (max_iter < 1) throw std::domain_error("max_iter must be >= 1");
    if (tol <= 0.0) throw std::domain_error("tol must be > 0");
}

bool SinkhornBatch::all_converged() const {
    for (std::uint8_t c : converged)
        if (!c) return false;
    return true;
}

SinkhornBatch sinkhorn_unbalanced_batch(const Eigen::MatrixXd& x_cols,
                                        const Eigen::MatrixXd& y_cols,
                                        const GibbsKernel& kernel, const UotParams& params,
                                        const Eigen::MatrixXd* warm_log_a,
                                        const Eigen::MatrixXd* warm_log_b) {
    params.validate();
    const Eigen::Index p = kernel.k.rows();
    const Eigen::Index n = x_cols.cols();
    if (x_cols.rows() != p || y_cols.rows() != p || y_cols.cols() != n)
        throw std::domain_error("batch shapes must be p x n on both sides");
    check_nonnegative(x_cols, "transport inputs");
    check_nonnegative(y_cols, "transport inputs");
    for (const Eigen::MatrixXd* warm : {warm_log_a, warm_log_b})
        if (warm && (warm->rows() != p || warm->cols() != n))
            throw std::domain_error("warm start shape does not match the batch");

    const double omega = params.omega();
    const double rate = params.epsilon / params.gamma;

    SinkhornBatch out;
    out.log_a = warm_log_a ? *warm_log_a : Eigen::MatrixXd::Zero(p, n);
    out.log_b = warm_log_b ? *warm_log_b : Eigen::MatrixXd::Zero(p, n);
    out.mass.setZero(n);
    out.w_dual.setZero(n);
    out.iterations.setZero(n);
    out.residual.setZero(n);
    out.converged.assign(static_cast<std::size_t>(n), 0);

    Eigen::MatrixXd lx(p, n), ly(p, n);
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < n; ++j) {
        lx.col(j) = safe_log(x_cols.col(j));
        ly.col(j) = safe_log(y_cols.col(j));
        const double sx = x_cols.col(j).sum();
        const double sy = y_cols.col(j).sum();
        if (sx == 0.0 || sy == 0.0) {
            // no transportable mass: P = 0, dual value closed-form
            zero_mass_column(x_cols.col(j), y_cols.col(j), sx, out.log_a.col(j),
                             out.log_b.col(j));
            out.w_dual[j] = params.gamma * (sx + sy) + params.epsilon * kernel.sum;
            out.converged[j] = 1;
        } else {
            active.push_back(j);
        }
    }

    Eigen::VectorXd conv_out(p), scratch(p), la_new(p), lb_new(p);
    auto finalize = [&](Eigen::Index j, int iter, bool ok) {
        kernel.log_conv_into(conv_out, out.log_b.col(j), scratch);
        la_new = omega * (lx.col(j) - conv_out);
        out.residual[j] = sup_diff(out.log_a.col(j), la_new);
        out.iterations[j] = iter;
        out.converged[j] = ok ? 1 : 0;
        // mass and dual value from the final scalings
        out.mass[j] = sum_exp(out.log_a.col(j) + conv_out);
        const double tx =
            x_cols.col(j).sum() - marginal_dual_sum(lx.col(j), out.log_a.col(j), rate);
        const double ty =
            y_cols.col(j).sum() - marginal_dual_sum(ly.col(j), out.log_b.col(j), rate);
        out.w_dual[j] = params.gamma * (tx + ty) -
                        params.epsilon * (out.mass[j] - kernel.sum);
    };

    for (int iter = 1; iter <= params.max_iter && !active.empty(); ++iter) {
        std::vector<Eigen::Index> still_active;
        still_active.reserve(active.size());
        double iter_delta = 0.0;
        for (Eigen::Index j : active) {
            kernel.log_conv_into(conv_out, out.log_b.col(j), scratch);
            la_new = omega * (lx.col(j) - conv_out);
            const double da = sup_diff(la_new, out.log_a.col(j));
            out.log_a.col(j) = la_new;

            kernel.log_conv_into(conv_out, out.log_a.col(j), scratch);
            lb_new = omega * (ly.col(j) - conv_out);
            const double db = sup_diff(lb_new, out.log_b.col(j));
            out.log_b.col(j) = lb_new;

            const double delta = std::max(da, db);
            iter_delta = std::max(iter_delta, delta);
            if (delta <= params.tol)
                finalize(j, iter, true);
            else if (iter == params.max_iter)
                finalize(j, iter, false);
            else
                still_active.push_back(j);
        }
        if (params.track_history) out.history.push_back(iter_delta);
        active.swap(still_active);
    }
    return out;
}

SinkhornBatch sinkhorn_symmetric_batch(const Eigen::MatrixXd& x_cols, const GibbsKernel& kernel,
                                       const UotParams& params) {
    params.validate();
    const Eigen::Index p = kernel.k.rows();
    const Eigen::Index n = x_cols.cols();
    if (x_cols.rows() != p) throw std::domain_error("batch shape must be p x n");
    check_nonnegative(x_cols, "transport inputs");

    const double omega = params.omega();
    const double rate = params.epsilon / params.gamma;

    SinkhornBatch out;
    out.log_a = Eigen::MatrixXd::Zero(p, n);
    out.mass.setZero(n);
    out.w_dual.setZero(n);
    out.iterations.setZero(n);
    out.residual.setZero(n);
    out.converged.assign(static_cast<std::size_t>(n), 0);

    Eigen::MatrixXd lx(p, n);
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < n; ++j) {
        lx.col(j) = safe_log(x_cols.col(j));
        if (x_cols.col(j).sum() == 0.0) {
            out.log_a.col(j).setConstant(-kInf);
            out.w_dual[j] = params.epsilon * kernel.sum;
            out.converged[j] = 1;
        } else {
            active.push_back(j);
        }
    }

    Eigen::VectorXd conv_out(p), scratch(p), target(p);
    auto finalize = [&](Eigen::Index j, int iter, bool ok, double res) {
        out.iterations[j] = iter;
        out.converged[j] = ok ? 1 : 0;
        out.residual[j] = res;
        kernel.log_conv_into(conv_out, out.log_a.col(j), scratch);
        out.mass[j] = sum_exp(out.log_a.col(j) + conv_out);
        const double tx =
            x_cols.col(j).sum() - marginal_dual_sum(lx.col(j), out.log_a.col(j), rate);
        out.w_dual[j] =
            2.0 * params.gamma * tx - params.epsilon * (out.mass[j] - kernel.sum);
    };

    for (int iter = 1; iter <= params.max_iter && !active.empty(); ++iter) {
        std::vector<Eigen::Index> still_active;
        still_active.reserve(active.size());
        double iter_delta = 0.0;
        for (Eigen::Index j : active) {
            kernel.log_conv_into(conv_out, out.log_a.col(j), scratch);
            target = omega * (lx.col(j) - conv_out);
            const double res = sup_diff(target, out.log_a.col(j));
            iter_delta = std::max(iter_delta, res);
            // geometric half-step; the undamped map oscillates
            for (Eigen::Index i = 0; i < p; ++i) {
                const double cur = out.log_a(i, j);
                out.log_a(i, j) = cur == target[i] ? cur : 0.5 * (cur + target[i]);
            }
            if (res <= params.tol)
                finalize(j, iter, true, res);
            else if (iter == params.max_iter)
                finalize(j, iter, false, res);
            else
                still_active.push_back(j);
        }
        if (params.track_history) out.history.push_back(iter_delta);
        active.swap(still_active);
    }
    out.log_b = out.log_a;
    return out;
}

namespace {

SinkhornResult from_batch_column(const SinkhornBatch& batch, const GibbsKernel& kernel,
                                 bool with_plan) {
    SinkhornResult r;
    r.state.log_a = batch.log_a.col(0);
    r.state.log_b = batch.log_b.col(0);
    r.state.iterations = batch.iterations[0];
    r.state.residual = batch.residual[0];
    r.state.converged = batch.converged[0] != 0;
    r.state.history = batch.history;
    r.summary.mass = batch.mass[0];
    r.summary.w_value = batch.w_dual[0];
    if (with_plan) {
        const Eigen::Index p = kernel.k.rows();
        Eigen::MatrixXd plan(p, p);
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < p; ++j) {
                const double e = r.state.log_a[i] + kernel.log_k(i, j) + r.state.log_b[j];
                plan(i, j) = std::isnan(e) ? 0.0 : std::exp(e);
            }
        r.summary.plan = std::move(plan);
    }
    return r;
}

} // namespace

SinkhornResult sinkhorn_unbalanced(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                   const GibbsKernel& kernel, const UotParams& params,
                                   bool with_plan) {
    SinkhornBatch batch = sinkhorn_unbalanced_batch(x, y, kernel, params);
    return from_batch_column(batch, kernel, with_plan);
}

SinkhornResult sinkhorn_symmetric(const Eigen::VectorXd& x, const GibbsKernel& kernel,
                                  const UotParams& params) {
    SinkhornBatch batch = sinkhorn_symmetric_batch(x, kernel, params);
    return from_batch_column(batch, kernel, false);
}

double primal_objective(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        const GibbsKernel& kernel, const Eigen::MatrixXd& plan,
                        const UotParams& params) {
    const Eigen::Index p = kernel.k.rows();
    if (plan.rows() != p || plan.cols() != p || x.size() != p || y.size() != p)
        throw std::domain_error("primal objective shape mismatch");
    // generalized KL(P | K), with 0 log 0 = 0
    double kl_plan = kernel.sum - plan.sum();
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) {
            const double pij = plan(i, j);
            if (pij > 0.0) kl_plan += pij * (std::log(pij) - kernel.log_k(i, j));
        }
    auto kl_vec = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (a[i] > 0.0) {
                if (b[i] == 0.0) return kInf;
                s += a[i] * std::log(a[i] / b[i]) - a[i] + b[i];
            } else {
                s += b[i];
            }
        }
        return s;
    };
    const Eigen::VectorXd row_mass = plan.rowwise().sum();
    const Eigen::VectorXd col_mass = plan.colwise().sum();
    return params.epsilon * kl_plan + params.gamma * kl_vec(row_mass, x) +
           params.gamma * kl_vec(col_mass, y);
}

DivergenceParts sinkhorn_divergence_parts(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                          const GibbsKernel& kernel, const UotParams& params) {
    const SinkhornResult xy = sinkhorn_unbalanced(x, y, kernel, params);
    const SinkhornResult xx = sinkhorn_symmetric(x, kernel, params);
    const SinkhornResult yy = sinkhorn_symmetric(y, kernel, params);
    DivergenceParts parts;
    parts.w_xy = xy.summary.w_value;
    parts.w_xx = xx.summary.w_value;
    parts.w_yy = yy.summary.w_value;
    parts.mass_xy = xy.summary.mass;
    parts.mass_xx = xx.summary.mass;
    parts.mass_yy = yy.summary.mass;
    parts.s_dual = parts.w_xy - 0.5 * (parts.w_xx + parts.w_yy);
    parts.s_mass = (params.epsilon + 2.0 * params.gamma) *
                   (0.5 * parts.mass_xx + 0.5 * parts.mass_yy - parts.mass_xy);
    parts.converged =
        xy.state.converged && xx.state.converged && yy.state.converged;
    return parts;
}

double sinkhorn_divergence(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                           const GibbsKernel& kernel, const UotParams& params) {
    const DivergenceParts parts = sinkhorn_divergence_parts(x, y, kernel, params);
    const double scale = std::max(1.0, std::abs(parts.s_mass));
    if (std::abs(parts.s_dual - parts.s_mass) > 1e-6 * scale)
        throw convergence_error("divergence routes disagree beyond 1e-6 relative");
    return parts.s_mass;
}

namespace {
void require_strictly_positive(const Eigen::VectorXd& v, const char* what) {
    if ((v.array() <= 0.0).any())
        throw std::domain_error(std::string(what) + " must be strictly positive");
}
} // namespace

Eigen::VectorXd grad_w(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const GibbsKernel& kernel, const UotParams& params) {
    require_strictly_positive(x, "gradient input x");
    require_strictly_positive(y, "gradient input y");
    const SinkhornResult r = sinkhorn_unbalanced(x, y, kernel, params);
    const double rate = params.epsilon / params.gamma;
    return params.gamma *
           (1.0 - (-rate * r.state.log_a.array()).exp()).matrix();
}

Eigen::VectorXd grad_s(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const GibbsKernel& kernel, const UotParams& params) {
    require_strictly_positive(x, "gradient input x");
    require_strictly_positive(y, "gradient input y");
    const SinkhornResult xy = sinkhorn_unbalanced(x, y, kernel, params);
    const SinkhornResult xx = sinkhorn_symmetric(x, kernel, params);
    const double rate = params.epsilon / params.gamma;
    return params.gamma * ((-rate * xx.state.log_a.array()).exp() -
                           (-rate * xy.state.log_a.array()).exp())
                              .matrix();
}

bool mass_bounds_check(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const GibbsKernel& kernel, const UotParams& params) {
    const SinkhornResult r = sinkhorn_unbalanced(x, y, kernel, params);
    const double sx = x.sum();
    const double sy = y.sum();
    if (sx == 0.0 || sy == 0.0) return r.summary.mass == 0.0;
    const double rate = params.epsilon / params.gamma;
    const double p = static_cast<double>(x.size());
    // kappa = min exp(-M/gamma); the kernel stores log K = -M/eps
    const double max_m = -kernel.log_k.minCoeff() * kernel.epsilon;
    const double log_lower = -max_m / params.gamma + std::log(sx) + std::log(sy);
    const double log_upper = 2.0 * (1.0 + rate) * std::log(p) + std::log(sx) + std::log(sy);
    const double log_val = (2.0 + rate) * std::log(r.summary.mass);
    const double slack = 1e-8;
    return log_lower <= log_val + slack && log_val <= log_upper + slack;
}

} // namespace stakit
