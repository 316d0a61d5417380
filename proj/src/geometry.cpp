#include "stakit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stakit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// The vectorized exponential clamps its argument rather than underflowing,
// leaving subnormal dust where the true value is zero; products of
// subnormals then run at microcode speed. Flush them to the exact zero.
template <class Mat>
void flush_subnormals(Mat& m) {
    const double lo = std::numeric_limits<double>::min();
    double* data = m.data();
    const Eigen::Index n = m.size();
    for (Eigen::Index i = 0; i < n; ++i)
        if (data[i] < lo) data[i] = 0.0;
}

void validate_metric(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw std::domain_error("ground metric must be square and nonempty");
    if (!m.allFinite() || (m.array() < 0.0).any())
        throw std::domain_error("ground metric must be finite and nonnegative");
    if (m.diagonal().cwiseAbs().maxCoeff() != 0.0)
        throw std::domain_error("ground metric must have a zero diagonal");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() != 0.0)
        throw std::domain_error("ground metric must be symmetric");
}
} // namespace

GroundGeometry ground_metric_grid(int h, int w, double exponent) {
    if (h < 1 || w < 1) throw std::domain_error("grid extent must be >= 1");
    if (!(exponent > 0.0 && exponent <= 2.0))
        throw std::domain_error("grid exponent must lie in (0, 2]");
    const int p = h * w;
    Eigen::MatrixXd m(p, p);
    for (int r1 = 0; r1 < h; ++r1)
        for (int c1 = 0; c1 < w; ++c1)
            for (int r2 = 0; r2 < h; ++r2)
                for (int c2 = 0; c2 < w; ++c2) {
                    const double sq = double(r1 - r2) * (r1 - r2) + double(c1 - c2) * (c1 - c2);
                    m(r1 * w + c1, r2 * w + c2) =
                        exponent == 2.0 ? sq : std::pow(sq, exponent / 2.0);
                }
    GroundGeometry g;
    g.kind = GroundGeometry::Kind::grid;
    g.p = p;
    g.metric = std::move(m);
    g.grid_h = h;
    g.grid_w = w;
    g.grid_exponent = exponent;
    g.separable_unit = exponent == 2.0 ? 1.0 : 0.0;
    return g;
}

GroundGeometry ground_metric_graph(const std::vector<GraphEdge>& edges, int p) {
    if (p < 1) throw std::domain_error("graph needs at least one vertex");
    Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(p, p, kInf);
    dist.diagonal().setZero();
    for (const GraphEdge& e : edges) {
        if (e.a < 0 || e.b < 0 || e.a >= p || e.b >= p)
            throw std::domain_error("graph edge endpoint out of range");
        if (e.weight < 0.0) throw std::domain_error("graph edge weights must be >= 0");
        dist(e.a, e.b) = std::min(dist(e.a, e.b), e.weight);
        dist(e.b, e.a) = dist(e.a, e.b);
    }
    // Floyd-Warshall
    for (int k = 0; k < p; ++k)
        for (int i = 0; i < p; ++i) {
            const double dik = dist(i, k);
            if (dik == kInf) continue;
            for (int j = 0; j < p; ++j) {
                const double cand = dik + dist(k, j);
                if (cand < dist(i, j)) dist(i, j) = cand;
            }
        }
    if (!dist.allFinite())
        throw std::domain_error("graph is disconnected: infinite geodesic distance");
    GroundGeometry g;
    g.kind = GroundGeometry::Kind::graph;
    g.p = p;
    g.metric = dist.array().square().matrix();
    return g;
}

GroundGeometry ground_metric_custom(Eigen::MatrixXd metric) {
    validate_metric(metric);
    GroundGeometry g;
    g.kind = GroundGeometry::Kind::custom;
    g.p = static_cast<int>(metric.rows());
    g.metric = std::move(metric);
    return g;
}

GroundGeometry normalize_by_median(const GroundGeometry& geom) {
    if (geom.p < 2) throw std::domain_error("median normalization needs p >= 2");
    std::vector<double> upper;
    upper.reserve(static_cast<std::size_t>(geom.p) * (geom.p - 1) / 2);
    for (int i = 0; i < geom.p; ++i)
        for (int j = i + 1; j < geom.p; ++j) upper.push_back(geom.metric(i, j));
    std::sort(upper.begin(), upper.end());
    const std::size_t n = upper.size();
    const double median =
        n % 2 == 1 ? upper[n / 2] : 0.5 * (upper[n / 2 - 1] + upper[n / 2]);
    if (median <= 0.0) throw std::domain_error("metric median is zero, cannot normalize");
    GroundGeometry g = geom;
    g.metric /= median;
    g.normalized = true;
    if (g.separable_unit > 0.0) g.separable_unit /= median;
    return g;
}

GibbsKernel gibbs_kernel(const GroundGeometry& geom, double epsilon) {
    if (epsilon <= 0.0) throw std::domain_error("gibbs kernel requires epsilon > 0");
    validate_metric(geom.metric);
    GibbsKernel kern;
    kern.epsilon = epsilon;
    kern.log_k = -geom.metric / epsilon;
    kern.k = kern.log_k.array().exp().matrix();
    flush_subnormals(kern.k);
    kern.sum = kern.k.sum();
    if (geom.separable()) {
        kern.separable = true;
        kern.grid_h = geom.grid_h;
        kern.grid_w = geom.grid_w;
        const double unit = geom.separable_unit / epsilon;
        kern.k_row.resize(geom.grid_h, geom.grid_h);
        for (int a = 0; a < geom.grid_h; ++a)
            for (int b = 0; b < geom.grid_h; ++b)
                kern.k_row(a, b) = std::exp(-unit * (a - b) * (a - b));
        kern.k_col.resize(geom.grid_w, geom.grid_w);
        for (int a = 0; a < geom.grid_w; ++a)
            for (int b = 0; b < geom.grid_w; ++b)
                kern.k_col(a, b) = std::exp(-unit * (a - b) * (a - b));
    }
    return kern;
}

void GibbsKernel::conv_into(Eigen::Ref<Eigen::VectorXd> out,
                            const Eigen::Ref<const Eigen::VectorXd>& v) const {
    if (separable) {
        using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        Eigen::Map<const RowMat> vmat(v.data(), grid_h, grid_w);
        Eigen::Map<RowMat> omat(out.data(), grid_h, grid_w);
        omat.noalias() = k_row * vmat * k_col;
        return;
    }
    out.noalias() = k * v;
}

void GibbsKernel::log_conv_into(Eigen::Ref<Eigen::VectorXd> out,
                                const Eigen::Ref<const Eigen::VectorXd>& lv,
                                Eigen::VectorXd& scratch) const {
    const double shift = lv.maxCoeff();
    if (shift == -kInf) {
        out.setConstant(-kInf);
        return;
    }
    scratch = (lv.array() - shift).exp().matrix();
    flush_subnormals(scratch);
    conv_into(out, scratch);
    out.array() = out.array().log() + shift;
}

ConvResult kernel_conv(const GibbsKernel& kernel, const Eigen::VectorXd& v, ConvPath path) {
    if (v.size() != kernel.k.rows())
        throw std::domain_error("kernel convolution size mismatch");
    ConvResult r;
    r.value.resize(v.size());
    const bool want_fast = path != ConvPath::dense;
    if (want_fast && kernel.separable) {
        kernel.conv_into(r.value, v);
        r.fast_path = true;
    } else {
        if (path == ConvPath::separable && !kernel.separable) r.fallback_warning = true;
        r.value.noalias() = kernel.k * v;
    }
    return r;
}

} // namespace stakit
