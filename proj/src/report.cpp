#include "tmlg/report.hpp"

#include "tmlg/csv.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace tmlg::report {
namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

double parse_real(const std::string& text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::runtime_error("not a number: '" + text + "'");
    }
    return v;
}

std::string u64(std::uint64_t v) { return std::to_string(v); }

}  // namespace

std::string format_real(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("cannot format number");
    return std::string(buf.data(), ptr);
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for hashing");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned i = 0; i < len; ++i) {
        hex += kHex[digest[i] >> 4];
        hex += kHex[digest[i] & 0xf];
    }
    return hex;
}

nlohmann::json annotations_json(const PeriodConfig& periods) {
    auto window = [](const TimeWindow& w) {
        return nlohmann::json{{"start", format_iso_datetime(w.start)},
                              {"end", format_iso_datetime(w.end)},
                              {"start_unix", w.start},
                              {"end_unix", w.end}};
    };
    nlohmann::json markers = nlohmann::json::array();
    for (const auto& [label, t] : periods.markers) {
        markers.push_back({{"label", label}, {"date", format_iso_date(t)}, {"unix", t}});
    }
    return {{"markers", markers},
            {"exclusion", window(periods.exclusion)},
            {"pre", window(periods.pre)},
            {"post", window(periods.post)}};
}

fs::path write_annotations(const fs::path& dir, const PeriodConfig& periods) {
    fs::path path = dir / "annotations.json";
    auto out = open_output(path);
    out << annotations_json(periods).dump(2) << '\n';
    finish(out, path);
    return path;
}

fs::path write_series(const fs::path& path, const MetricSeries& series, const PeriodConfig& periods) {
    auto out = open_output(path);
    csv::write_row(out, {"window_start", "window_start_iso", std::string(metric_name(series.metric))});
    for (const auto& p : series.points) {
        csv::write_row(out, {std::to_string(p.start), format_iso_datetime(p.start), format_real(p.value)});
    }
    finish(out, path);
    write_annotations(path.parent_path().empty() ? fs::path(".") : path.parent_path(), periods);
    return path;
}

fs::path write_series(const fs::path& path, const NoveltySeries& series, const PeriodConfig& periods,
                      std::string_view value_column) {
    auto out = open_output(path);
    csv::write_row(out, {"window_start", "window_start_iso", std::string(value_column)});
    for (const auto& p : series.points) {
        csv::write_row(out, {std::to_string(p.start), format_iso_datetime(p.start), u64(p.count)});
    }
    finish(out, path);
    write_annotations(path.parent_path().empty() ? fs::path(".") : path.parent_path(), periods);
    return path;
}

fs::path write_matrix(const fs::path& path, const CorrelationMatrix& matrix) {
    auto out = open_output(path);
    std::vector<std::string> header{"ticker"};
    header.insert(header.end(), matrix.tickers.begin(), matrix.tickers.end());
    csv::write_row(out, header);
    for (std::size_t i = 0; i < matrix.tickers.size(); ++i) {
        std::vector<std::string> row{matrix.tickers[i]};
        for (double v : matrix.cells[i]) row.push_back(format_real(v));
        csv::write_row(out, row);
    }
    finish(out, path);
    return path;
}

fs::path write_matrix(const fs::path& path, const TransitionMatrix& matrix) {
    auto out = open_output(path);
    std::vector<std::string> header{"pre\\post"};
    header.insert(header.end(), matrix.labels.begin(), matrix.labels.end());
    csv::write_row(out, header);
    for (std::size_t i = 0; i < matrix.labels.size(); ++i) {
        std::vector<std::string> row{matrix.labels[i]};
        for (auto v : matrix.cells[i]) row.push_back(u64(v));
        csv::write_row(out, row);
    }
    finish(out, path);
    return path;
}

fs::path write_table(const fs::path& path, const std::vector<std::pair<std::string, LayerMetrics>>& rows) {
    if (rows.empty()) throw std::invalid_argument("table needs at least one row");
    auto out = open_output(path);
    csv::write_row(out, {"layer", "nodes", "unique_edges", "transactions", "token_volume", "usd_volume", "active_out",
                         "active_in", "sources", "sinks", "reciprocity", "avg_degree", "density", "clustering",
                         "largest_wcc_fraction"});
    for (const auto& [label, m] : rows) {
        csv::write_row(out, {label, u64(m.nodes), u64(m.unique_edges), u64(m.transactions), m.token_volume.to_string(),
                             format_real(m.usd_volume), u64(m.active_out), u64(m.active_in), u64(m.sources),
                             u64(m.sinks), format_real(m.reciprocity), format_real(m.avg_degree),
                             format_real(m.density), format_real(m.clustering), format_real(m.largest_wcc_fraction)});
    }
    finish(out, path);
    return path;
}

fs::path write_activity(const fs::path& path, const std::vector<LayerActivityDistribution>& series) {
    auto out = open_output(path);
    std::size_t layers = series.empty() ? 0 : series.front().counts.size() - 1;
    std::vector<std::string> header{"window_start", "window_start_iso"};
    for (std::size_t m = 1; m <= layers; ++m) header.push_back("layers_" + std::to_string(m));
    header.emplace_back("total");
    csv::write_row(out, header);
    for (const auto& d : series) {
        std::vector<std::string> row{std::to_string(d.window.start), format_iso_datetime(d.window.start)};
        for (std::size_t m = 1; m < d.counts.size(); ++m) row.push_back(u64(d.counts[m]));
        row.push_back(u64(d.total()));
        csv::write_row(out, row);
    }
    finish(out, path);
    return path;
}

fs::path write_activity_table(const fs::path& path,
                              const std::vector<std::pair<std::string, LayerActivityDistribution>>& rows) {
    auto out = open_output(path);
    csv::write_row(out, {"period", "start", "end", "layers", "users", "percent"});
    for (const auto& [label, d] : rows) {
        const auto total = d.total();
        for (std::size_t m = 1; m < d.counts.size(); ++m) {
            double pct = total ? 100.0 * static_cast<double>(d.counts[m]) / static_cast<double>(total) : 0.0;
            csv::write_row(out, {label, format_iso_datetime(d.window.start), format_iso_datetime(d.window.end),
                                 std::to_string(m), u64(d.counts[m]), format_real(pct)});
        }
    }
    finish(out, path);
    return path;
}

fs::path write_concentration(const fs::path& path, const std::vector<ConcentrationReport>& reports) {
    auto out = open_output(path);
    csv::write_row(out, {"day", "ticker", "rank", "wallet", "tokens_sold", "share"});
    for (const auto& r : reports) {
        std::string day = format_iso_date(r.day);
        for (std::size_t i = 0; i < r.entries.size(); ++i) {
            const auto& e = r.entries[i];
            csv::write_row(out, {day, r.ticker, std::to_string(i + 1), e.wallet, e.tokens_sold.to_string(),
                                 format_real(e.share)});
        }
        csv::write_row(out, {day, r.ticker, "tail", r.no_activity ? "no_activity" : "", r.tail_tokens.to_string(),
                             format_real(r.tail_share)});
    }
    finish(out, path);
    return path;
}

fs::path write_recurrent(const fs::path& path, const std::vector<RecurrentSeller>& sellers) {
    auto out = open_output(path);
    csv::write_row(out, {"wallet", "appearances", "days"});
    for (const auto& s : sellers) {
        std::string days;
        for (auto d : s.days) {
            if (!days.empty()) days += ';';
            days += format_iso_date(d);
        }
        csv::write_row(out, {s.wallet, std::to_string(s.days.size()), days});
    }
    finish(out, path);
    return path;
}

fs::path write_degree_histogram(const fs::path& path, const DegreeHistogram& histogram, double ratio) {
    auto out = open_output(path);
    csv::write_row(out, {"kind", "lower", "upper", "count", "probability", "density"});
    const auto total = static_cast<double>(histogram.total());
    for (const auto& [degree, count] : histogram.counts) {
        double p = static_cast<double>(count) / total;
        csv::write_row(out, {"exact", u64(degree), u64(degree + 1), u64(count), format_real(p), format_real(p)});
    }
    for (const auto& b : histogram.log_binned(ratio)) {
        csv::write_row(out, {"log", u64(b.lower), u64(b.upper), u64(b.count), format_real(b.probability),
                             format_real(b.density)});
    }
    finish(out, path);
    return path;
}

Table read_table(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    csv::Reader reader(in);
    Table t;
    if (!reader.next(t.header)) return t;
    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() != t.header.size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(reader.line()) + ": column count mismatch");
        }
        t.rows.push_back(row);
    }
    return t;
}

std::size_t Table::column(std::string_view name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("missing column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

MetricSeries read_series(const fs::path& path) {
    Table t = read_table(path);
    if (t.header.size() != 3 || t.header[0] != "window_start") throw std::runtime_error("not a series file");
    MetricSeries s;
    if (auto m = parse_metric(t.header[2])) s.metric = *m;
    for (const auto& row : t.rows) {
        s.points.push_back({static_cast<Timestamp>(std::stoll(row[0])), parse_real(row[2])});
    }
    if (s.points.size() >= 2) s.step = s.points[1].start - s.points[0].start;
    return s;
}

LabeledMatrix read_matrix(const fs::path& path) {
    Table t = read_table(path);
    if (t.header.empty()) throw std::runtime_error("empty matrix file");
    LabeledMatrix m;
    m.corner = t.header[0];
    m.column_labels.assign(t.header.begin() + 1, t.header.end());
    for (const auto& row : t.rows) {
        m.row_labels.push_back(row[0]);
        std::vector<double> cells;
        for (std::size_t j = 1; j < row.size(); ++j) cells.push_back(parse_real(row[j]));
        m.cells.push_back(std::move(cells));
    }
    return m;
}

ReportBundle::ReportBundle(fs::path dir, PeriodConfig periods) : dir_(std::move(dir)), periods_(std::move(periods)) {
    fs::create_directories(dir_);
}

void ReportBundle::add(std::string analysis, nlohmann::json parameters, const fs::path& file) {
    fs::path relative = file.lexically_relative(dir_);
    if (relative.empty() || *relative.begin() == "..") relative = file;
    entries_.push_back({std::move(analysis), std::move(parameters), relative.generic_string(), sha256_file(file)});
}

nlohmann::json ReportBundle::manifest() const {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& e : entries_) {
        files.push_back({{"analysis", e.analysis}, {"parameters", e.parameters}, {"file", e.file}, {"sha256", e.sha256}});
    }
    return {{"format", "tmlg-report"}, {"version", 1}, {"periods", annotations_json(periods_)}, {"files", files}};
}

fs::path ReportBundle::write_manifest() const {
    fs::path path = dir_ / "manifest.json";
    auto out = open_output(path);
    out << manifest().dump(2) << '\n';
    finish(out, path);
    return path;
}

}  // namespace tmlg::report
