#include "fas/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <stdexcept>

namespace fas {

namespace {

std::string iso_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

CsvFile::CsvFile(const std::string& path, const MetaInfo& meta, const std::string& columns)
    : out_(path), path_(path) {
    if (!out_) throw std::runtime_error("cannot write '" + path + "'");
    out_ << "# tool = faslab " << kFaslabVersion << "\n";
    out_ << "# command = " << meta.command << "\n";
    out_ << "# config_hash = " << meta.config_hash << "\n";
    out_ << "# grid = " << meta.grid_desc << "\n";
    out_ << "# generated_at = " << iso_now() << "\n";
    out_ << columns << "\n";
}

void CsvFile::row(const std::string& line) { out_ << line << "\n"; }

std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

void write_json_summary(const std::string& path, const MetaInfo& meta,
                        const nlohmann::json& results) {
    nlohmann::json doc;
    doc["meta"] = {{"tool", "faslab"},
                   {"version", kFaslabVersion},
                   {"command", meta.command},
                   {"config_hash", meta.config_hash},
                   {"grid", meta.grid_desc},
                   {"generated_at", iso_now()}};
    doc["results"] = results;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
}

namespace {

struct Range {
    double lo = 0.0, hi = 1.0;
    void widen(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace

void svg_line_chart(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<ChartSeries>& series, bool log_y) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b"};
    constexpr double W = 640, H = 420;
    constexpr double x0 = 72, x1 = 608, y0 = 356, y1 = 52; // plot box, y grows up

    bool any = false;
    Range rx, ry;
    for (const ChartSeries& s : series)
        for (const auto& [px, py] : s.points) {
            if (log_y && py <= 0.0) continue;
            const double yv = log_y ? std::log10(py) : py;
            if (!any) {
                rx = {px, px};
                ry = {yv, yv};
                any = true;
            } else {
                rx.widen(px);
                ry.widen(yv);
            }
        }
    if (!any) {
        rx = {0, 1};
        ry = {0, 1};
    }
    if (rx.hi - rx.lo < 1e-300) rx.hi = rx.lo + 1.0;
    if (ry.hi - ry.lo < 1e-300) ry.hi = ry.lo + 1.0;

    const auto sx = [&](double v) { return x0 + (v - rx.lo) / (rx.hi - rx.lo) * (x1 - x0); };
    const auto sy = [&](double v) { return y0 + (v - ry.lo) / (ry.hi - ry.lo) * (y1 - y0); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\" "
           "font-family=\"sans-serif\">"
        << title << "</text>\n";

    // axes and ticks
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = rx.lo + (rx.hi - rx.lo) * i / 5.0;
        const double fy = ry.lo + (ry.hi - ry.lo) * i / 5.0;
        const double px = sx(fx), py = sy(fy);
        out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\""
            << y0 + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px << "\" y=\"" << y0 + 20
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
            << fmt_tick(fx) << "</text>\n";
        out << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\""
            << py << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << x0 - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
            << fmt_tick(log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << H - 14
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << xlabel
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << (y0 + y1) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 18 "
        << (y0 + y1) / 2 << ")\">" << ylabel << (log_y ? " (log scale)" : "")
        << "</text>\n";

    // data
    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = palette[si % 6];
        std::string pts;
        for (const auto& [px, py] : series[si].points) {
            if (log_y && py <= 0.0) continue;
            const double yv = log_y ? std::log10(py) : py;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(px), sy(yv));
            pts += buf;
        }
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
            << pts << "\"/>\n";
        out << "<text x=\"" << x1 - 6 << "\" y=\"" << y1 + 16 + 16 * si
            << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\""
            << color << "\">" << series[si].label << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace fas
