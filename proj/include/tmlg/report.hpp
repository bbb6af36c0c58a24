#pragma once

#include "tmlg/flows.hpp"
#include "tmlg/metrics.hpp"
#include "tmlg/series.hpp"
#include "tmlg/tgraph.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace tmlg::report {

/// Shortest text that parses back to the same double.
std::string format_real(double value);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Marker dates and period windows as the JSON object written to
/// annotations.json.
nlohmann::json annotations_json(const PeriodConfig& periods);

/// Writes annotations.json into `dir` and returns its path.
std::filesystem::path write_annotations(const std::filesystem::path& dir, const PeriodConfig& periods);

/// Columns: window_start, window_start_iso, value. Also refreshes the
/// annotations.json sidecar in the same directory.
std::filesystem::path write_series(const std::filesystem::path& path, const MetricSeries& series,
                                   const PeriodConfig& periods);
/// Columns: window_start, window_start_iso, new_edges (or new_nodes).
std::filesystem::path write_series(const std::filesystem::path& path, const NoveltySeries& series,
                                   const PeriodConfig& periods, std::string_view value_column = "new_edges");

std::filesystem::path write_matrix(const std::filesystem::path& path, const CorrelationMatrix& matrix);
std::filesystem::path write_matrix(const std::filesystem::path& path, const TransitionMatrix& matrix);

/// One row per (label, metrics) in order. Callers put the full-graph row
/// first.
std::filesystem::path write_table(const std::filesystem::path& path,
                                  const std::vector<std::pair<std::string, LayerMetrics>>& rows);

/// Layer-activity counts, one row per distribution: window_start,
/// window_start_iso, layers_1 .. layers_L, total.
std::filesystem::path write_activity(const std::filesystem::path& path,
                                     const std::vector<LayerActivityDistribution>& series);

/// Users by number of active layers for labelled periods: period, start,
/// end, layers, users, percent.
std::filesystem::path write_activity_table(
    const std::filesystem::path& path, const std::vector<std::pair<std::string, LayerActivityDistribution>>& rows);

/// One row per top-k entry plus a "tail" row per report.
std::filesystem::path write_concentration(const std::filesystem::path& path,
                                          const std::vector<ConcentrationReport>& reports);
std::filesystem::path write_recurrent(const std::filesystem::path& path, const std::vector<RecurrentSeller>& sellers);

/// Exact histogram rows (kind=exact) followed by log bins (kind=log).
std::filesystem::path write_degree_histogram(const std::filesystem::path& path, const DegreeHistogram& histogram,
                                             double ratio = 2.0);

// Parse-back helpers for written files.

MetricSeries read_series(const std::filesystem::path& path);

struct LabeledMatrix {
    std::string corner;
    std::vector<std::string> row_labels;
    std::vector<std::string> column_labels;
    std::vector<std::vector<double>> cells;
};
LabeledMatrix read_matrix(const std::filesystem::path& path);

/// Header + rows of any written CSV, as strings.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
};
Table read_table(const std::filesystem::path& path);

/// Directory of report files plus a manifest.json listing each file with its
/// analysis name, parameters and SHA-256.
class ReportBundle {
public:
    struct Entry {
        std::string analysis;
        nlohmann::json parameters;
        std::string file;  // relative to the bundle directory
        std::string sha256;
    };

    ReportBundle(std::filesystem::path dir, PeriodConfig periods);

    const std::filesystem::path& dir() const { return dir_; }
    const PeriodConfig& periods() const { return periods_; }
    std::filesystem::path path(std::string_view relative) const { return dir_ / relative; }

    /// Records a file already written under dir().
    void add(std::string analysis, nlohmann::json parameters, const std::filesystem::path& file);

    const std::vector<Entry>& entries() const { return entries_; }

    nlohmann::json manifest() const;
    /// Writes manifest.json and returns its path.
    std::filesystem::path write_manifest() const;

private:
    std::filesystem::path dir_;
    PeriodConfig periods_;
    std::vector<Entry> entries_;
};

}  // namespace tmlg::report
