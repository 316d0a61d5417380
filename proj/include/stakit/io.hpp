#ifndef STAKIT_IO_HPP
#define STAKIT_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "stakit/sta.hpp"
#include "stakit/synthetic.hpp"

namespace stakit {

/// Shortest decimal that round-trips the double ("%.17g").
std::string format_double(double v);

/// Series files are T rows of p comma-separated plain decimals, no header.
void write_series_csv(const std::filesystem::path& path, const Eigen::MatrixXd& data);
Eigen::MatrixXd read_series_csv(const std::filesystem::path& path);

/// One value per row (a single-column series file); used for histograms.
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path);

/// Bare numeric matrix, no labels; used for metric/kernel/plan dumps.
void write_plain_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// Labeled N x N dissimilarity matrix: header row and column of item labels.
void write_labeled_matrix_csv(const std::filesystem::path& path, const DissimilarityMatrix& m);

/// Edge list rows `i,j,weight` with 0-based vertex indices.
std::vector<GraphEdge> read_edges_csv(const std::filesystem::path& path);

/// Dataset description: item files plus the geometry they share.
struct DatasetManifest {
    struct Item {
        std::string path;
        std::string label;
    };
    std::vector<Item> items;

    std::string geometry_kind = "grid"; // "grid" | "graph"
    int grid_h = 0;
    int grid_w = 0;
    double grid_exponent = 2.0;
    std::string graph_edges_path;
    int graph_p = 0;

    bool normalize_median = true;
    std::string signed_mode = "none"; // none | absolute | split-average
};

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Geometry described by the manifest; relative paths resolve against base_dir.
GroundGeometry manifest_geometry(const DatasetManifest& manifest,
                                 const std::filesystem::path& base_dir);

/// Loads every item and binds it to the shared geometry.
std::vector<SpatioTemporalSeries> load_dataset(const DatasetManifest& manifest,
                                               const std::filesystem::path& base_dir,
                                               std::shared_ptr<const GroundGeometry> geometry);

SignedMode parse_signed_mode(const std::string& name);

/// Writes the blob dataset as item CSVs plus a manifest.json in out_dir.
void write_blob_dataset(const std::filesystem::path& out_dir, const BlobSpec& spec);

} // namespace stakit

#endif
