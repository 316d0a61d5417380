#ifndef STAKIT_STA_HPP
#define STAKIT_STA_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "stakit/align.hpp"
#include "stakit/sinkhorn.hpp"

namespace stakit {

/// A time series of spatial intensity maps: T rows of p nonnegative bins,
/// bound to the geometry its bins live on (null for purely Euclidean use).
struct SpatioTemporalSeries {
    Eigen::MatrixXd data; // T x p
    std::shared_ptr<const GroundGeometry> geometry;
    std::string label;

    int t_len() const { return static_cast<int>(data.rows()); }
    int p() const { return static_cast<int>(data.cols()); }

    /// Finite entries, nonnegative unless signed data is allowed, geometry
    /// bin count consistent when bound.
    void validate(bool allow_signed = false) const;
};

/// Signed-data handling: feed absolute values through the pipeline, or
/// average the divergence of positive and negative parts.
enum class SignedMode { none, absolute, split_average };

/// How the per-frame alignment cost delta(x_i, y_j) is produced.
struct CostProvider {
    enum class Kind { squared_euclidean, sinkhorn_divergence, precomputed };

    Kind kind = Kind::squared_euclidean;
    UotParams params;
    std::shared_ptr<const GibbsKernel> kernel;
    Eigen::MatrixXd precomputed;
    SignedMode signed_mode = SignedMode::none;

    static CostProvider squared_euclidean();
    static CostProvider sinkhorn(std::shared_ptr<const GibbsKernel> kernel, UotParams params);
    static CostProvider from_matrix(Eigen::MatrixXd delta);
};

/// Symmetric scalings of every frame of one series, solved once and shared
/// by all cross pairs that involve the series.
struct SelfCache {
    Eigen::MatrixXd log_c; // p x T
    Eigen::VectorXd mass;  // T
    std::vector<std::uint8_t> converged;
    std::uint64_t iterations = 0;
};
SelfCache compute_self_cache(const Eigen::MatrixXd& frames_t_by_p, const GibbsKernel& kernel,
                             const UotParams& params);

/// Frame-pair cost matrix plus solver bookkeeping. Non-converged entries are
/// flagged, their values still carry the last iterate.
struct SCostResult {
    CostMatrix delta;
    int failed_entries = 0;
    std::uint64_t solver_iterations = 0;
    Eigen::MatrixXd cross_log_a; // p x (T1*T2), column i*T2+j; kept when requested
    bool all_converged() const { return failed_entries == 0; }
};

/** Divergence cost matrix between all frame pairs of two series.
 *
 * The T1 + T2 self terms are solved once each (or taken from the caches);
 * the T1*T2 cross problems run as one batch warm-started from the symmetric
 * scalings. Entries come from the transported-mass identity.
 */
SCostResult s_cost_matrix(const SpatioTemporalSeries& x, const SpatioTemporalSeries& y,
                          const GibbsKernel& kernel, const UotParams& params);
SCostResult s_cost_matrix_cached(const Eigen::MatrixXd& x_frames, const Eigen::MatrixXd& y_frames,
                                 const SelfCache& cache_x, const SelfCache& cache_y,
                                 const GibbsKernel& kernel, const UotParams& params,
                                 bool keep_scalings = false);

/// Positive/negative part decomposition used by the split signed mode.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> split_signed_parts(const Eigen::MatrixXd& frames);

/// Cost matrix under a signed-data mode: absolute feeds |x| through the
/// plain pipeline; split averages the divergences of the two parts.
SCostResult signed_s_cost_matrix(const SpatioTemporalSeries& x, const SpatioTemporalSeries& y,
                                 const GibbsKernel& kernel, const UotParams& params,
                                 SignedMode mode);

struct StaResult {
    SCostResult cost;
    SoftDtwResult alignment;
    double value = 0.0;
};

/// The composed dissimilarity: soft-DTW over the provider's frame costs.
StaResult sta_full(const SpatioTemporalSeries& x, const SpatioTemporalSeries& y, double beta,
                   const CostProvider& provider);
double sta(const SpatioTemporalSeries& x, const SpatioTemporalSeries& y, double beta,
           const CostProvider& provider);

/** Gradient of sta with respect to the first series' data (T1 x p): the
 * expected-alignment weights chain into the per-pair divergence gradients,
 * d sta / d x_t = sum_j E(t, j) * gamma * (c_t^(-eps/gamma) - a_(t,j)^(-eps/gamma)).
 * Requires beta > 0 and strictly positive data.
 */
Eigen::MatrixXd sta_gradient(const SpatioTemporalSeries& x, const SpatioTemporalSeries& y,
                             double beta, const GibbsKernel& kernel, const UotParams& params);

/// Symmetric N x N dissimilarity matrix with run metadata. Failed pairs are
/// NaN sentinels, never silent aborts.
struct DissimilarityMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> labels;
    double beta = 0.0;
    std::string cost_kind;
    double epsilon = 0.0;
    double gamma = 0.0;
    double tol = 0.0;
    int max_iter = 0;
    int failed_pairs = 0;
    std::uint64_t solver_iterations = 0;
    double wall_seconds = 0.0;
};

/** All unordered pairs of the dataset, computed in parallel over pairs with
 * the self-scaling caches built in a sequential pre-pass. Results are
 * independent of the worker count; threads = 0 picks the hardware count.
 */
DissimilarityMatrix pairwise_matrix(const std::vector<SpatioTemporalSeries>& items, double beta,
                                    const CostProvider& provider, int threads = 0);

} // namespace stakit

#endif
