#include "stakit/synthetic.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace stakit {

void BlobSpec::validate() const {
    if (grid_h < 1 || grid_w < 1) throw std::domain_error("blob grid extent must be >= 1");
    if (t_len < 1) throw std::domain_error("blob series length must be >= 1");
    if (t1 < 1 || t1 > t_len || t2 < 1 || t2 > t_len || t1 == t2)
        throw std::domain_error("activation frames must be distinct and within [1, T]");
    if (n_per_group < 1) throw std::domain_error("need at least one sample per group");
    if (region_a.empty() || region_b.empty())
        throw std::domain_error("both regions must be nonempty");
    const int p = grid_h * grid_w;
    std::set<int> seen;
    for (int v : region_a) {
        if (v < 0 || v >= p) throw std::domain_error("region vertex outside the grid");
        seen.insert(v);
    }
    for (int v : region_b) {
        if (v < 0 || v >= p) throw std::domain_error("region vertex outside the grid");
        if (seen.count(v)) throw std::domain_error("regions must be disjoint");
    }
    if (!(amp_min > 0.0) || amp_max < amp_min)
        throw std::domain_error("amplitude range must satisfy 0 < min <= max");
    if (sigma_time <= 0.0 || sigma_space <= 0.0)
        throw std::domain_error("smoothing widths must be > 0");
}

std::vector<int> BlobSpec::rect(int grid_w, int r0, int c0, int r1, int c1) {
    std::vector<int> cells;
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) cells.push_back(r * grid_w + c);
    return cells;
}

std::string blob_group_label(const BlobSpec& spec, int group) {
    const char region = group < 2 ? 'A' : 'B';
    const int frame = group % 2 == 0 ? spec.t1 : spec.t2;
    return std::string("r") + region + "_t" + std::to_string(frame);
}

namespace {

// smoothed impulse: amplitude * exp(-dt^2 / 2 sig_t^2) * exp(-d^2 / 2 sig_s^2),
// both factors zero beyond four sigmas
Eigen::MatrixXd render_sample(const BlobSpec& spec, int frame, int vertex, double amplitude) {
    Eigen::MatrixXd data = Eigen::MatrixXd::Zero(spec.t_len, spec.grid_h * spec.grid_w);
    const int vr = vertex / spec.grid_w;
    const int vc = vertex % spec.grid_w;
    const double rt = 4.0 * spec.sigma_time;
    const double rs2 = 16.0 * spec.sigma_space * spec.sigma_space;
    for (int t = 1; t <= spec.t_len; ++t) {
        const double dt = t - frame;
        if (std::abs(dt) > rt) continue;
        const double wt = std::exp(-dt * dt / (2.0 * spec.sigma_time * spec.sigma_time));
        for (int r = 0; r < spec.grid_h; ++r)
            for (int c = 0; c < spec.grid_w; ++c) {
                const double d2 = double(r - vr) * (r - vr) + double(c - vc) * (c - vc);
                if (d2 > rs2) continue;
                const double ws =
                    std::exp(-d2 / (2.0 * spec.sigma_space * spec.sigma_space));
                data(t - 1, r * spec.grid_w + c) = amplitude * wt * ws;
            }
    }
    return data;
}

} // namespace

std::vector<SpatioTemporalSeries> generate_blobs(const BlobSpec& spec,
                                                 std::shared_ptr<const GroundGeometry> geometry) {
    spec.validate();
    if (geometry && geometry->p != spec.grid_h * spec.grid_w)
        throw std::domain_error("geometry does not match the blob grid");
    SplitMix64 rng(spec.seed);
    std::vector<SpatioTemporalSeries> items;
    items.reserve(static_cast<std::size_t>(4 * spec.n_per_group));
    for (int group = 0; group < 4; ++group) {
        const std::vector<int>& region = group < 2 ? spec.region_a : spec.region_b;
        const int frame = group % 2 == 0 ? spec.t1 : spec.t2;
        const std::string label = blob_group_label(spec, group);
        for (int s = 0; s < spec.n_per_group; ++s) {
            const int vertex = region[static_cast<std::size_t>(rng.below(region.size()))];
            const double amplitude = rng.uniform(spec.amp_min, spec.amp_max);
            items.push_back(
                SpatioTemporalSeries{render_sample(spec, frame, vertex, amplitude), geometry,
                                     label});
        }
    }
    return items;
}

} // namespace stakit
