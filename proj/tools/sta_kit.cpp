// sta-kit: command-line surface for the spatio-temporal dissimilarity toolkit.
//
// Subcommands: matrix, shift, blobs, delannoy, sinkhorn.
// Exit codes: 0 ok, 2 usage, 3 domain/input error, 4 convergence failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "stakit/delannoy.hpp"
#include "stakit/errors.hpp"
#include "stakit/io.hpp"
#include "stakit/sta.hpp"
#include "stakit/synthetic.hpp"
#include "stakit/timeshift.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct usage_error : std::runtime_error {
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

struct GridSpec {
    int h = 0;
    int w = 0;
};

GridSpec parse_grid(const std::string& s) {
    const auto x = s.find('x');
    if (x == std::string::npos) throw std::domain_error("grid spec must look like HxW");
    GridSpec g;
    g.h = std::stoi(s.substr(0, x));
    g.w = std::stoi(s.substr(x + 1));
    if (g.h < 1 || g.w < 1) throw std::domain_error("grid extents must be >= 1");
    return g;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    if (out.empty()) throw std::domain_error("empty numeric list");
    return out;
}

std::vector<int> parse_rect(const std::string& s, int grid_h, int grid_w) {
    std::vector<int> v;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stoi(cell));
    if (v.size() != 4) throw std::domain_error("region rect must be r0,c0,r1,c1");
    if (v[0] < 0 || v[1] < 0 || v[2] >= grid_h || v[3] >= grid_w || v[0] > v[2] || v[1] > v[3])
        throw std::domain_error("region rect outside the grid");
    return stakit::BlobSpec::rect(grid_w, v[0], v[1], v[2], v[3]);
}

// ---- matrix ---------------------------------------------------------------

struct MatrixArgs {
    std::string manifest;
    std::string out;
    std::string meta;
    double beta = 0.1;
    double epsilon = -1.0; // auto: 10 / p
    double gamma = 1.0;
    double tol = 1e-6;
    int max_iter = 5000;
    int threads = 0;
    std::string cost = "sinkhorn";
    std::string signed_mode; // default: manifest
};

int run_matrix(const MatrixArgs& args) {
    const fs::path manifest_path(args.manifest);
    const stakit::DatasetManifest manifest = stakit::read_manifest(manifest_path);
    if (manifest.items.empty()) throw usage_error("manifest lists no items");
    const fs::path base = manifest_path.parent_path();

    auto geometry =
        std::make_shared<stakit::GroundGeometry>(stakit::manifest_geometry(manifest, base));
    auto items = stakit::load_dataset(manifest, base, geometry);

    stakit::UotParams params;
    params.epsilon = args.epsilon > 0.0 ? args.epsilon : 10.0 / geometry->p;
    params.gamma = args.gamma;
    params.tol = args.tol;
    params.max_iter = args.max_iter;

    const stakit::SignedMode mode = stakit::parse_signed_mode(
        args.signed_mode.empty() ? manifest.signed_mode : args.signed_mode);

    stakit::CostProvider provider;
    if (args.cost == "sinkhorn") {
        auto kernel = std::make_shared<stakit::GibbsKernel>(
            stakit::gibbs_kernel(*geometry, params.epsilon));
        provider = stakit::CostProvider::sinkhorn(kernel, params);
    } else if (args.cost == "sqeuclid") {
        provider = stakit::CostProvider::squared_euclidean();
    } else {
        throw std::domain_error("unknown cost kind " + args.cost);
    }
    provider.signed_mode = mode;

    const stakit::DissimilarityMatrix matrix =
        stakit::pairwise_matrix(items, args.beta, provider, args.threads);
    stakit::write_labeled_matrix_csv(args.out, matrix);

    json meta;
    meta["beta"] = matrix.beta;
    meta["cost"] = matrix.cost_kind;
    meta["epsilon"] = matrix.epsilon;
    meta["gamma"] = matrix.gamma;
    meta["tol"] = matrix.tol;
    meta["max_iter"] = matrix.max_iter;
    meta["threads"] = args.threads;
    meta["items"] = matrix.labels.size();
    meta["p"] = geometry->p;
    meta["signed_mode"] = args.signed_mode.empty() ? manifest.signed_mode : args.signed_mode;
    meta["failed_pairs"] = matrix.failed_pairs;
    meta["solver_iterations"] = matrix.solver_iterations;
    meta["wall_seconds"] = matrix.wall_seconds;
    const fs::path meta_path =
        args.meta.empty() ? fs::path(args.out + ".meta.json") : fs::path(args.meta);
    std::ofstream meta_out(meta_path);
    if (!meta_out) throw std::runtime_error("cannot write " + meta_path.string());
    meta_out << meta.dump(2) << '\n';

    if (matrix.failed_pairs > 0) {
        std::cerr << "matrix: " << matrix.failed_pairs
                  << " pair(s) failed to converge; entries are NaN\n";
        return 4;
    }
    return 0;
}

// ---- shift ----------------------------------------------------------------

struct ShiftArgs {
    int t_len = 400;
    std::string betas = "0.1,1,10,100";
    int k_max = -1;    // auto: maximal feasible
    int pulse_at = -1; // auto: centered
    int pulse_width = 1;
    double amplitude = 1.0;
    std::string out;
};

int run_shift(const ShiftArgs& args) {
    if (args.t_len < 3) throw std::domain_error("shift experiment needs T >= 3");
    if (args.pulse_width < 1) throw std::domain_error("pulse width must be >= 1");
    const int at = args.pulse_at > 0 ? args.pulse_at : (args.t_len + 1) / 2;
    if (at < 2 || at + args.pulse_width - 1 > args.t_len - 1)
        throw std::domain_error("pulse must fluctuate strictly inside [2, T-1]");
    std::vector<double> x(static_cast<std::size_t>(args.t_len), 0.0);
    for (int i = 0; i < args.pulse_width; ++i)
        x[static_cast<std::size_t>(at - 1 + i)] = args.amplitude;

    const stakit::ShiftProfile prof = stakit::profile(x);
    const int feasible = prof.t_len - 1 - prof.offset;
    const int k_max = args.k_max >= 0 ? args.k_max : feasible;
    if (k_max > feasible)
        throw std::domain_error("infeasible k_max; the largest feasible shift is " +
                                std::to_string(feasible));

    const std::vector<double> betas = parse_double_list(args.betas);
    const auto rows = stakit::shift_gap_experiment(x, betas, k_max);

    std::ofstream out(args.out);
    if (!out) throw std::runtime_error("cannot write " + args.out);
    out << "beta,k,gap,log_ratio_bound,quadratic_bound\n";
    for (const auto& r : rows)
        out << stakit::format_double(r.beta) << ',' << r.k << ','
            << stakit::format_double(r.gap) << ','
            << stakit::format_double(r.log_ratio_bound) << ','
            << stakit::format_double(r.quadratic_bound) << '\n';
    return 0;
}

// ---- blobs ----------------------------------------------------------------

struct BlobArgs {
    std::string grid = "16x16";
    int t_len = 20;
    int t1 = 5;
    int t2 = 15;
    int n_per_group = 10;
    double amp_min = 1.0;
    double amp_max = 3.0;
    double sigma_t = 1.0;
    double sigma_s = 0.3;
    std::string region_a = "0,0,6,6";
    std::string region_b = "9,9,15,15";
    std::uint64_t seed = 42;
    std::string out;
};

stakit::BlobSpec blob_spec_from_args(const BlobArgs& args) {
    const GridSpec grid = parse_grid(args.grid);
    stakit::BlobSpec spec;
    spec.grid_h = grid.h;
    spec.grid_w = grid.w;
    spec.t_len = args.t_len;
    spec.t1 = args.t1;
    spec.t2 = args.t2;
    spec.n_per_group = args.n_per_group;
    spec.amp_min = args.amp_min;
    spec.amp_max = args.amp_max;
    spec.sigma_time = args.sigma_t;
    spec.sigma_space = args.sigma_s;
    spec.region_a = parse_rect(args.region_a, grid.h, grid.w);
    spec.region_b = parse_rect(args.region_b, grid.h, grid.w);
    spec.seed = args.seed;
    return spec;
}

int run_blobs(const BlobArgs& args) {
    stakit::write_blob_dataset(args.out, blob_spec_from_args(args));
    return 0;
}

// ---- delannoy -------------------------------------------------------------

struct DelannoyArgs {
    int m_max = 30;
    int k_max = 30;
    std::string out;
    std::string table_out;
};

int run_delannoy(const DelannoyArgs& args) {
    if (args.m_max < 1 || args.k_max < 1) throw std::domain_error("sweep bounds must be >= 1");
    const stakit::DelannoyTable table(args.m_max + 1, args.m_max + args.k_max);
    if (!args.table_out.empty()) {
        std::ofstream tout(args.table_out);
        if (!tout) throw std::runtime_error("cannot write " + args.table_out);
        for (int m = 1; m <= table.max_m(); ++m) {
            for (int n = 1; n <= table.max_n(); ++n) {
                if (n > 1) tout << ',';
                tout << table.value(m, n).to_string();
            }
            tout << '\n';
        }
    }
    std::ofstream out(args.out);
    if (!out) throw std::runtime_error("cannot write " + args.out);
    out << "m,k,D_m_mk,phi,psi,slack_A,slack_B,slack_lemma\n";
    int failures = 0;
    for (int m = 1; m <= args.m_max; ++m)
        for (int k = 1; k <= args.k_max; ++k) {
            const stakit::OffdiagSlack s = stakit::offdiagonal_slack(table, m, k);
            if (!s.a_holds || !s.b_holds || !s.lemma_holds) ++failures;
            out << m << ',' << k << ',' << table.value(m, m + k).to_string() << ','
                << stakit::format_double(stakit::phi(m, k)) << ','
                << stakit::format_double(stakit::psi(m, k)) << ','
                << stakit::format_double(s.slack_a) << ',' << stakit::format_double(s.slack_b)
                << ',' << stakit::format_double(s.slack_lemma) << '\n';
        }
    if (failures > 0) {
        std::cerr << "delannoy: " << failures << " inequality failure(s)\n";
        return 1;
    }
    return 0;
}

// ---- sinkhorn -------------------------------------------------------------

struct SinkhornArgs {
    std::string x_path;
    std::string y_path;
    std::string grid;
    std::string graph_edges;
    int graph_p = 0;
    bool normalize_median = false;
    double epsilon = -1.0;
    double gamma = 1.0;
    double tol = 1e-9;
    int max_iter = 5000;
    std::string out;
    std::string plan_path;
    std::string metric_path;
    std::string kernel_path;
};

int run_sinkhorn(const SinkhornArgs& args) {
    const Eigen::VectorXd x = stakit::read_vector_csv(args.x_path);
    const Eigen::VectorXd y = stakit::read_vector_csv(args.y_path);
    if (x.size() != y.size()) throw std::domain_error("x and y dimensions do not match");

    stakit::GroundGeometry geometry;
    if (!args.grid.empty()) {
        const GridSpec g = parse_grid(args.grid);
        geometry = stakit::ground_metric_grid(g.h, g.w, 2.0);
    } else if (!args.graph_edges.empty()) {
        geometry =
            stakit::ground_metric_graph(stakit::read_edges_csv(args.graph_edges), args.graph_p);
    } else {
        throw std::domain_error("either --grid or --graph is required");
    }
    if (geometry.p != x.size())
        throw std::domain_error("geometry size does not match the input vectors");
    if (args.normalize_median) geometry = stakit::normalize_by_median(geometry);

    stakit::UotParams params;
    params.epsilon = args.epsilon > 0.0 ? args.epsilon : 10.0 / geometry.p;
    params.gamma = args.gamma;
    params.tol = args.tol;
    params.max_iter = args.max_iter;
    const stakit::GibbsKernel kernel = stakit::gibbs_kernel(geometry, params.epsilon);

    const stakit::SinkhornResult r = stakit::sinkhorn_unbalanced(x, y, kernel, params, true);
    const double w_primal = stakit::primal_objective(x, y, kernel, *r.summary.plan, params);
    const stakit::DivergenceParts parts =
        stakit::sinkhorn_divergence_parts(x, y, kernel, params);

    json report;
    report["w"] = r.summary.w_value;
    report["w_primal"] = w_primal;
    report["s"] = parts.s_mass;
    report["s_dual"] = parts.s_dual;
    report["mass"] = r.summary.mass;
    report["iterations"] = r.state.iterations;
    report["residual"] = r.state.residual;
    report["converged"] = r.state.converged;
    report["epsilon"] = params.epsilon;
    report["gamma"] = params.gamma;
    report["tol"] = params.tol;
    report["p"] = geometry.p;
    std::ofstream out(args.out);
    if (!out) throw std::runtime_error("cannot write " + args.out);
    out << report.dump(2) << '\n';

    if (!args.plan_path.empty()) stakit::write_plain_matrix_csv(args.plan_path, *r.summary.plan);
    if (!args.metric_path.empty()) stakit::write_plain_matrix_csv(args.metric_path, geometry.metric);
    if (!args.kernel_path.empty()) stakit::write_plain_matrix_csv(args.kernel_path, kernel.k);

    if (!r.state.converged || !parts.converged) {
        std::cerr << "sinkhorn: solver did not reach tolerance\n";
        return 4;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spatio-temporal alignment dissimilarity toolkit"};
    app.require_subcommand(1);

    MatrixArgs matrix_args;
    CLI::App* matrix = app.add_subcommand("matrix", "pairwise dissimilarity matrix of a dataset");
    matrix->add_option("--manifest", matrix_args.manifest, "dataset manifest JSON")->required();
    matrix->add_option("--out", matrix_args.out, "output matrix CSV")->required();
    matrix->add_option("--meta", matrix_args.meta, "metadata JSON (default: <out>.meta.json)");
    matrix->add_option("--beta", matrix_args.beta, "soft-DTW smoothing");
    matrix->add_option("--epsilon", matrix_args.epsilon, "entropy weight (default 10/p)");
    matrix->add_option("--gamma", matrix_args.gamma, "marginal relaxation weight");
    matrix->add_option("--tol", matrix_args.tol, "solver tolerance");
    matrix->add_option("--max-iter", matrix_args.max_iter, "solver iteration cap");
    matrix->add_option("--threads", matrix_args.threads, "worker threads (0 = hardware)");
    matrix->add_option("--cost", matrix_args.cost, "sinkhorn | sqeuclid");
    matrix->add_option("--signed", matrix_args.signed_mode, "none | absolute | split-average");

    ShiftArgs shift_args;
    CLI::App* shift = app.add_subcommand("shift", "temporal shift gap vs theoretical bounds");
    shift->add_option("--t", shift_args.t_len, "series length");
    shift->add_option("--betas", shift_args.betas, "comma-separated smoothing values");
    shift->add_option("--k-max", shift_args.k_max, "largest shift (default: feasible max)");
    shift->add_option("--pulse-at", shift_args.pulse_at, "pulse position (default: center)");
    shift->add_option("--pulse-width", shift_args.pulse_width, "pulse width in frames");
    shift->add_option("--amplitude", shift_args.amplitude, "pulse amplitude");
    shift->add_option("--out", shift_args.out, "output CSV")->required();

    BlobArgs blob_args;
    CLI::App* blobs = app.add_subcommand("blobs", "synthetic four-group activation dataset");
    blobs->add_option("--grid", blob_args.grid, "grid spec HxW");
    blobs->add_option("--t", blob_args.t_len, "series length");
    blobs->add_option("--t1", blob_args.t1, "first activation frame");
    blobs->add_option("--t2", blob_args.t2, "second activation frame");
    blobs->add_option("--n", blob_args.n_per_group, "samples per group");
    blobs->add_option("--amp-min", blob_args.amp_min, "amplitude lower bound");
    blobs->add_option("--amp-max", blob_args.amp_max, "amplitude upper bound");
    blobs->add_option("--sigma-t", blob_args.sigma_t, "temporal smoothing width");
    blobs->add_option("--sigma-s", blob_args.sigma_s, "spatial smoothing width");
    blobs->add_option("--region-a", blob_args.region_a, "region A rect r0,c0,r1,c1");
    blobs->add_option("--region-b", blob_args.region_b, "region B rect r0,c0,r1,c1");
    blobs->add_option("--seed", blob_args.seed, "generator seed");
    blobs->add_option("--out", blob_args.out, "output directory")->required();

    DelannoyArgs delannoy_args;
    CLI::App* delannoy = app.add_subcommand("delannoy", "lattice-count inequality sweep report");
    delannoy->add_option("--m-max", delannoy_args.m_max, "sweep bound on m");
    delannoy->add_option("--k-max", delannoy_args.k_max, "sweep bound on k");
    delannoy->add_option("--out", delannoy_args.out, "output CSV")->required();
    delannoy->add_option("--table", delannoy_args.table_out, "dump the exact count table as CSV");

    SinkhornArgs sinkhorn_args;
    CLI::App* sinkhorn = app.add_subcommand("sinkhorn", "single-pair transport report");
    sinkhorn->add_option("--x", sinkhorn_args.x_path, "first histogram CSV")->required();
    sinkhorn->add_option("--y", sinkhorn_args.y_path, "second histogram CSV")->required();
    sinkhorn->add_option("--grid", sinkhorn_args.grid, "grid spec HxW");
    sinkhorn->add_option("--graph", sinkhorn_args.graph_edges, "graph edge CSV");
    sinkhorn->add_option("--p", sinkhorn_args.graph_p, "graph vertex count");
    sinkhorn->add_flag("--normalize-median", sinkhorn_args.normalize_median,
                       "normalize the metric by its median");
    sinkhorn->add_option("--epsilon", sinkhorn_args.epsilon, "entropy weight (default 10/p)");
    sinkhorn->add_option("--gamma", sinkhorn_args.gamma, "marginal relaxation weight");
    sinkhorn->add_option("--tol", sinkhorn_args.tol, "solver tolerance");
    sinkhorn->add_option("--max-iter", sinkhorn_args.max_iter, "solver iteration cap");
    sinkhorn->add_option("--out", sinkhorn_args.out, "output report JSON")->required();
    sinkhorn->add_option("--plan", sinkhorn_args.plan_path, "optional plan CSV");
    sinkhorn->add_option("--dump-metric", sinkhorn_args.metric_path, "write the ground metric CSV");
    sinkhorn->add_option("--dump-kernel", sinkhorn_args.kernel_path, "write the kernel CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (matrix->parsed()) return run_matrix(matrix_args);
        if (shift->parsed()) return run_shift(shift_args);
        if (blobs->parsed()) return run_blobs(blob_args);
        if (delannoy->parsed()) return run_delannoy(delannoy_args);
        if (sinkhorn->parsed()) return run_sinkhorn(sinkhorn_args);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const stakit::convergence_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
