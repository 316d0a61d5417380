#ifndef STAKIT_SINKHORN_HPP
#define STAKIT_SINKHORN_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "stakit/geometry.hpp"

namespace stakit {

/** Solver parameters for the marginal-relaxed entropic transport problem.
 *
 * epsilon weighs the entropy term, gamma the KL penalties on the marginals;
 * omega = gamma / (gamma + epsilon) is the exponent of the scaling updates.
 * Convergence is declared when the sup-norm change of both log scalings
 * drops below tol.
 */
struct UotParams {
    double epsilon = 0.1;
    double gamma = 1.0;
    int max_iter = 5000;
    double tol = 1e-9;
    bool track_history = false;

    double omega() const { return gamma / (gamma + epsilon); }
    void validate() const;
};

/// Dual log scalings and convergence metadata of one solve. a = exp(u/eps),
/// so log_a carries the dual potential in epsilon units; entries are -inf
/// exactly where the corresponding input mass is zero.
struct SinkhornState {
    Eigen::VectorXd log_a;
    Eigen::VectorXd log_b;
    int iterations = 0;
    double residual = 0.0; // sup-norm fixed-point residual at exit
    bool converged = false;
    std::vector<double> history; // per-iteration update sup-norms when tracked
};

struct TransportSummary {
    double mass = 0.0;    // ||P||_1 = <a, K b>
    double w_value = 0.0; // dual objective at the returned scalings
    std::optional<Eigen::MatrixXd> plan;
};

struct SinkhornResult {
    SinkhornState state;
    TransportSummary summary;
};

/** Alternating log-domain scaling iterations for W(x, y).
 *
 * log a <- omega * (log x - log(K exp(log b))) and symmetrically for b, with
 * max-shifted reductions throughout. Inputs must be nonnegative; zero-mass
 * inputs short-circuit to the analytic optimum (empty plan, mass 0). Failure
 * to converge within max_iter is flagged, not thrown.
 */
SinkhornResult sinkhorn_unbalanced(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                   const GibbsKernel& kernel, const UotParams& params,
                                   bool with_plan = false);

/// Damped fixed-point iteration for the symmetric scaling of W(x, x):
/// log a <- (log a + omega*(log x - log(K exp(log a)))) / 2, with a = b.
SinkhornResult sinkhorn_symmetric(const Eigen::VectorXd& x, const GibbsKernel& kernel,
                                  const UotParams& params);

/// Primal objective eps*KL(P|K) + gamma*KL(P1|x) + gamma*KL(P'1|y) at an
/// explicit plan, with the generalized KL (mass-difference term included).
double primal_objective(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        const GibbsKernel& kernel, const Eigen::MatrixXd& plan,
                        const UotParams& params);

/// Both routes to the divergence value plus the ingredients, for inspection.
struct DivergenceParts {
    double s_mass = 0.0; // (eps + 2 gamma) * (mass_xx/2 + mass_yy/2 - mass_xy)
    double s_dual = 0.0; // w_xy - (w_xx + w_yy) / 2
    double w_xy = 0.0;
    double w_xx = 0.0;
    double w_yy = 0.0;
    double mass_xy = 0.0;
    double mass_xx = 0.0;
    double mass_yy = 0.0;
    bool converged = false;
};
DivergenceParts sinkhorn_divergence_parts(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                          const GibbsKernel& kernel, const UotParams& params);

/** Transport divergence S(x, y) = W(x, y) - (W(x, x) + W(y, y)) / 2.
 *
 * Computed through the transported masses and cross-checked against the
 * dual values; disagreement beyond 1e-6 relative raises convergence_error.
 * Zero on identical inputs, symmetric, nonnegative for PSD kernels.
 */
double sinkhorn_divergence(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                           const GibbsKernel& kernel, const UotParams& params);

/// Gradient of x -> W(x, y): gamma * (1 - a^(-eps/gamma)). Requires strictly
/// positive inputs.
Eigen::VectorXd grad_w(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const GibbsKernel& kernel, const UotParams& params);

/// Gradient of x -> S(x, y): gamma * (c^(-eps/gamma) - a^(-eps/gamma)) with
/// c the symmetric scaling of x; vanishes at y = x.
Eigen::VectorXd grad_s(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const GibbsKernel& kernel, const UotParams& params);

/// Checks kappa*|x||y| <= mass^(2 + eps/gamma) <= p^(2(1+eps/gamma))*|x||y|
/// with kappa = min exp(-M/gamma), in log space, slack 1e-8 relative.
bool mass_bounds_check(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const GibbsKernel& kernel, const UotParams& params);

/** Batched solves: column j of X against column j of Y, all sharing one
 * kernel. Columns freeze individually the moment they converge, so every
 * column runs exactly the updates it would run alone and the batch is
 * bit-identical to sequential single solves.
 */
struct SinkhornBatch {
    Eigen::MatrixXd log_a;
    Eigen::MatrixXd log_b;
    Eigen::VectorXd mass;
    Eigen::VectorXd w_dual;
    Eigen::VectorXi iterations;
    Eigen::VectorXd residual;
    std::vector<std::uint8_t> converged;
    std::vector<double> history; // per-iteration max update sup-norm when tracked

    bool all_converged() const;
};

SinkhornBatch sinkhorn_unbalanced_batch(const Eigen::MatrixXd& x_cols,
                                        const Eigen::MatrixXd& y_cols,
                                        const GibbsKernel& kernel, const UotParams& params,
                                        const Eigen::MatrixXd* warm_log_a = nullptr,
                                        const Eigen::MatrixXd* warm_log_b = nullptr);

SinkhornBatch sinkhorn_symmetric_batch(const Eigen::MatrixXd& x_cols, const GibbsKernel& kernel,
                                       const UotParams& params);

} // namespace stakit

#endif
