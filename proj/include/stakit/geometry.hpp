#ifndef STAKIT_GEOMETRY_HPP
#define STAKIT_GEOMETRY_HPP

#include <Eigen/Dense>
#include <vector>

namespace stakit {

struct GraphEdge {
    int a = 0;
    int b = 0;
    double weight = 0.0;
};

/** Spatial ground metric over p bins (squared-distance units).
 *
 * Grid geometries index vertices row-major: bin = row * w + col, unit
 * spacing, entries ||.||^exponent. Graph geometries square the all-pairs
 * shortest-path distances. The metric is symmetric with a zero diagonal.
 * separable_unit tracks the uniform factor lambda such that a grid metric
 * with exponent 2 reads lambda * (dr^2 + dc^2); median normalization keeps
 * it uniform, so the Gibbs kernel of such a geometry factorizes.
 */
struct GroundGeometry {
    enum class Kind { grid, graph, custom };

    Kind kind = Kind::custom;
    int p = 0;
    Eigen::MatrixXd metric;
    bool normalized = false;
    int grid_h = 0;
    int grid_w = 0;
    double grid_exponent = 0.0;
    double separable_unit = 0.0; // > 0 only for grid geometries with exponent 2

    bool separable() const { return kind == Kind::grid && separable_unit > 0.0; }
};

/// Lattice of h*w points with unit spacing; entries ||m_i - m_j||^exponent,
/// 0 < exponent <= 2 (the kernel stays positive semi-definite in that range).
GroundGeometry ground_metric_grid(int h, int w, double exponent);

/// All-pairs shortest paths of an undirected nonnegatively weighted graph,
/// squared entrywise. Throws std::domain_error when the graph is disconnected.
GroundGeometry ground_metric_graph(const std::vector<GraphEdge>& edges, int p);

/// Wraps an explicit symmetric zero-diagonal matrix.
GroundGeometry ground_metric_custom(Eigen::MatrixXd metric);

/// Divides the metric by the median of its strictly upper-triangular entries
/// (even counts average the two central values). Not idempotent: applying it
/// twice rescales by the new median again. Throws when the median is zero.
GroundGeometry normalize_by_median(const GroundGeometry& geom);

/** Gibbs kernel K = exp(-M / epsilon), strictly positive, symmetric, with
 * ones on the diagonal. Caches the entry sum and, for separable grid
 * geometries, the row/column factors so a convolution costs two small
 * matrix products instead of one dense one.
 */
struct GibbsKernel {
    double epsilon = 0.0;
    Eigen::MatrixXd k;     // dense p x p
    Eigen::MatrixXd log_k; // -M / epsilon, kept for plan assembly
    double sum = 0.0;      // ||K||_1

    bool separable = false;
    int grid_h = 0;
    int grid_w = 0;
    Eigen::MatrixXd k_row; // h x h factor over grid rows
    Eigen::MatrixXd k_col; // w x w factor over grid columns

    int p() const { return static_cast<int>(k.rows()); }

    /// out = K v through the separable factors when available, dense otherwise.
    void conv_into(Eigen::Ref<Eigen::VectorXd> out,
                   const Eigen::Ref<const Eigen::VectorXd>& v) const;

    /// out = log(K exp(lv)), max-shifted; all -inf input yields all -inf.
    void log_conv_into(Eigen::Ref<Eigen::VectorXd> out,
                       const Eigen::Ref<const Eigen::VectorXd>& lv,
                       Eigen::VectorXd& scratch) const;
};

GibbsKernel gibbs_kernel(const GroundGeometry& geom, double epsilon);

enum class ConvPath { automatic, dense, separable };

struct ConvResult {
    Eigen::VectorXd value;
    bool fast_path = false;        // separable factors were used
    bool fallback_warning = false; // separable requested but unavailable
};

/// K v with an explicit path request; a separable request on a non-separable
/// kernel falls back to the dense product and sets the warning flag.
ConvResult kernel_conv(const GibbsKernel& kernel, const Eigen::VectorXd& v,
                       ConvPath path = ConvPath::automatic);

} // namespace stakit

#endif
