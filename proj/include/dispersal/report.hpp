#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace dispersal {

/// 17 significant digits, "nan"/"inf"/"-inf" for non-finite values.
std::string format_number(double v);

/// In-memory CSV table; cells are written verbatim, so callers format numbers
/// with format_number.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }
    [[nodiscard]] std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;  // non-positive values are dropped on a log axis
};

/// Polyline plot as a standalone SVG document.
std::string render_svg(const PlotSpec& spec, const std::vector<Series>& series);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace dispersal
