#include "stakit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace stakit {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::vector<double>> read_rows(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("bad numeric cell in " + path.string());
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("empty csv file " + path.string());
    return rows;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

} // namespace

void write_series_csv(const fs::path& path, const Eigen::MatrixXd& data) {
    std::ofstream out = open_out(path);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            if (j) out << ',';
            out << format_double(data(i, j));
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_series_csv(const fs::path& path) {
    const auto rows = read_rows(path);
    const std::size_t cols = rows.front().size();
    Eigen::MatrixXd m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols)
            throw std::runtime_error("ragged csv rows in " + path.string());
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Eigen::VectorXd read_vector_csv(const fs::path& path) {
    Eigen::MatrixXd m = read_series_csv(path);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    throw std::runtime_error("expected a single row or column in " + path.string());
}

void write_plain_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m) {
    write_series_csv(path, m);
}

void write_labeled_matrix_csv(const fs::path& path, const DissimilarityMatrix& m) {
    std::ofstream out = open_out(path);
    out << "label";
    for (const std::string& l : m.labels) out << ',' << l;
    out << '\n';
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        out << m.labels[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.values.cols(); ++j)
            out << ',' << format_double(m.values(i, j));
        out << '\n';
    }
}

std::vector<GraphEdge> read_edges_csv(const fs::path& path) {
    const auto rows = read_rows(path);
    std::vector<GraphEdge> edges;
    edges.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != 3) throw std::runtime_error("edge rows must be i,j,weight");
        edges.push_back(GraphEdge{static_cast<int>(row[0]), static_cast<int>(row[1]), row[2]});
    }
    return edges;
}

DatasetManifest read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest " + path.string());
    json j;
    in >> j;
    DatasetManifest m;
    for (const auto& item : j.at("items"))
        m.items.push_back({item.at("path").get<std::string>(),
                           item.value("label", std::string{})});
    const json& geom = j.at("geometry");
    m.geometry_kind = geom.at("kind").get<std::string>();
    if (m.geometry_kind == "grid") {
        m.grid_h = geom.at("h").get<int>();
        m.grid_w = geom.at("w").get<int>();
        m.grid_exponent = geom.value("exponent", 2.0);
    } else if (m.geometry_kind == "graph") {
        m.graph_edges_path = geom.at("edges_csv").get<std::string>();
        m.graph_p = geom.at("p").get<int>();
    } else {
        throw std::runtime_error("unknown geometry kind " + m.geometry_kind);
    }
    if (j.contains("preprocess")) {
        const json& pre = j["preprocess"];
        m.normalize_median = pre.value("normalize_median", true);
        m.signed_mode = pre.value("signed_mode", std::string("none"));
    }
    return m;
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
    json j;
    j["items"] = json::array();
    for (const auto& item : manifest.items)
        j["items"].push_back({{"path", item.path}, {"label", item.label}});
    if (manifest.geometry_kind == "grid") {
        j["geometry"] = {{"kind", "grid"},
                         {"h", manifest.grid_h},
                         {"w", manifest.grid_w},
                         {"exponent", manifest.grid_exponent}};
    } else {
        j["geometry"] = {{"kind", "graph"},
                         {"edges_csv", manifest.graph_edges_path},
                         {"p", manifest.graph_p}};
    }
    j["preprocess"] = {{"normalize_median", manifest.normalize_median},
                       {"signed_mode", manifest.signed_mode}};
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

GroundGeometry manifest_geometry(const DatasetManifest& manifest, const fs::path& base_dir) {
    GroundGeometry g;
    if (manifest.geometry_kind == "grid") {
        g = ground_metric_grid(manifest.grid_h, manifest.grid_w, manifest.grid_exponent);
    } else {
        const fs::path edges = fs::path(manifest.graph_edges_path).is_absolute()
                                   ? fs::path(manifest.graph_edges_path)
                                   : base_dir / manifest.graph_edges_path;
        g = ground_metric_graph(read_edges_csv(edges), manifest.graph_p);
    }
    if (manifest.normalize_median) g = normalize_by_median(g);
    return g;
}

std::vector<SpatioTemporalSeries> load_dataset(const DatasetManifest& manifest,
                                               const fs::path& base_dir,
                                               std::shared_ptr<const GroundGeometry> geometry) {
    std::vector<SpatioTemporalSeries> items;
    items.reserve(manifest.items.size());
    for (const auto& item : manifest.items) {
        const fs::path p =
            fs::path(item.path).is_absolute() ? fs::path(item.path) : base_dir / item.path;
        Eigen::MatrixXd data = read_series_csv(p);
        items.push_back(SpatioTemporalSeries{std::move(data), geometry, item.label});
    }
    return items;
}

SignedMode parse_signed_mode(const std::string& name) {
    if (name == "none") return SignedMode::none;
    if (name == "absolute" || name == "abs") return SignedMode::absolute;
    if (name == "split-average" || name == "split") return SignedMode::split_average;
    throw std::domain_error("unknown signed mode " + name);
}

void write_blob_dataset(const fs::path& out_dir, const BlobSpec& spec) {
    std::shared_ptr<const GroundGeometry> geom = std::make_shared<GroundGeometry>(
        ground_metric_grid(spec.grid_h, spec.grid_w, 2.0));
    const std::vector<SpatioTemporalSeries> items = generate_blobs(spec, geom);
    fs::create_directories(out_dir);
    DatasetManifest manifest;
    manifest.geometry_kind = "grid";
    manifest.grid_h = spec.grid_h;
    manifest.grid_w = spec.grid_w;
    manifest.grid_exponent = 2.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "item_%03zu.csv", i);
        write_series_csv(out_dir / name, items[i].data);
        manifest.items.push_back({name, items[i].label});
    }
    write_manifest(out_dir / "manifest.json", manifest);
}

} // namespace stakit
