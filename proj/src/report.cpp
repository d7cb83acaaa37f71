#include "dispersal/report.hpp"

#include "dispersal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace dispersal {

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) {
        throw ConfigError("csv: row has " + std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(header_.size()));
    }
    rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                os << ',';
            }
            const std::string& c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos) {
                os << '"';
                for (char ch : c) {
                    if (ch == '"') {
                        os << '"';
                    }
                    os << ch;
                }
                os << '"';
            } else {
                os << c;
            }
        }
        os << '\n';
    };
    line(header_);
    for (const auto& r : rows_) {
        line(r);
    }
    return os.str();
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << text;
}

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '&':
                out += "&amp;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

std::string render_svg(const PlotSpec& spec, const std::vector<Series>& series) {
    const double W = 640.0;
    const double H = 420.0;
    const double left = 70.0;
    const double right = 150.0;
    const double top = 40.0;
    const double bottom = 50.0;

    auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -x0;
    double y0 = x0;
    double y1 = -x0;
    for (const Series& s : series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (spec.log_y && s.y[i] <= 0)) {
                continue;
            }
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!(x0 <= x1)) {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if (x1 == x0) {
        x1 = x0 + 1.0;
    }
    if (y1 == y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pw = W - left - right;
    const double ph = H - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" "
       << "font-size=\"14\">" << escape_xml(spec.title) << "</text>\n";
    os << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(pw)
       << "\" height=\"" << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0;
        const double fy = y0 + (y1 - y0) * k / 4.0;
        const double sx = left + pw * k / 4.0;
        const double sy = top + ph * (1.0 - k / 4.0);
        os << "<text x=\"" << fixed(sx) << "\" y=\"" << fixed(top + ph + 16)
           << "\" text-anchor=\"middle\">" << tick(fx) << "</text>\n";
        os << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(sy + 4)
           << "\" text-anchor=\"end\">" << (spec.log_y ? "1e" + tick(fy) : tick(fy))
           << "</text>\n";
    }
    os << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(H - 10)
       << "\" text-anchor=\"middle\">" << escape_xml(spec.x_label) << "</text>\n";
    os << "<text transform=\"translate(16," << fixed(top + ph / 2)
       << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(spec.y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series& s = series[k];
        const char* colour = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (spec.log_y && s.y[i] <= 0)) {
                continue;
            }
            os << (first ? "" : " ") << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i]));
            first = false;
        }
        os << "\"/>\n";
        const double ly = top + 14.0 + 18.0 * static_cast<double>(k);
        os << "<line x1=\"" << fixed(left + pw + 10) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\""
           << fixed(left + pw + 30) << "\" y2=\"" << fixed(ly - 4) << "\" stroke=\"" << colour
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << fixed(left + pw + 36) << "\" y=\"" << fixed(ly) << "\">"
           << escape_xml(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace dispersal
