#pragma once

// CSV and SVG emitters. CSV: '.' decimal, '\n' line endings, mandatory
// header, 17 significant digits. SVG plots draw only data present in the
// accompanying CSV files.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace strutlab::cli {

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size())
    {
        write_row(header);
    }

    template <class... Cells>
    void row(const Cells&... cells)
    {
        if (sizeof...(cells) != columns_)
            throw std::logic_error("csv: row width does not match header");
        std::vector<std::string> text{cell(cells)...};
        write_row(text);
    }

private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }

    void write_row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ostream& out_;
    std::size_t columns_;
};

inline std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
    std::string color = "#1f77b4";
};

/// Minimal deterministic line plot.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label))
    {
    }

    void add(Series s) { series_.push_back(std::move(s)); }
    void shade(double x0, double x1) { shaded_.push_back({x0, x1}); }
    void equal_aspect() { equal_aspect_ = true; }

    void write(std::ostream& out) const
    {
        double x0 = inf(), x1 = -inf(), y0 = inf(), y1 = -inf();
        for (const auto& s : series_)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                    continue;
                x0 = std::min(x0, s.x[i]);
                x1 = std::max(x1, s.x[i]);
                y0 = std::min(y0, s.y[i]);
                y1 = std::max(y1, s.y[i]);
            }
        if (!(x0 <= x1)) {
            x0 = 0;
            x1 = 1;
            y0 = 0;
            y1 = 1;
        }
        if (x1 - x0 < 1e-12) {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if (y1 - y0 < 1e-12) {
            y0 -= 0.5;
            y1 += 0.5;
        }
        const double pad_y = 0.05 * (y1 - y0);
        y0 -= pad_y;
        y1 += pad_y;

        constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
        double sx = (W - L - R) / (x1 - x0);
        double sy = (H - T - B) / (y1 - y0);
        if (equal_aspect_)
            sx = sy = std::min(sx, sy);
        auto px = [&](double x) { return L + (x - x0) * sx; };
        auto py = [&](double y) { return H - B - (y - y0) * sy; };

        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
            << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        for (const auto& [a, b] : shaded_) {
            const double xa = px(std::max(a, x0)), xb = px(std::min(b, x1));
            out << "<rect x=\"" << num(std::min(xa, xb)) << "\" y=\"" << T << "\" width=\"" << num(std::abs(xb - xa))
                << "\" height=\"" << H - T - B << "\" fill=\"#d9f0d3\"/>\n";
        }
        out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
            << "\" fill=\"none\" stroke=\"black\"/>\n";
        out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"15\">"
            << escape(title_) << "</text>\n";
        out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(x_label_)
            << "</text>\n";
        out << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"12\" transform=\"rotate(-90 16 "
            << H / 2 << ")\">" << escape(y_label_) << "</text>\n";
        for (int i = 0; i <= 4; ++i) {
            const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
            out << "<text x=\"" << num(px(xv)) << "\" y=\"" << H - B + 16
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << tick(xv)
                << "</text>\n";
            out << "<text x=\"" << L - 6 << "\" y=\"" << num(py(yv) + 3)
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << tick(yv) << "</text>\n";
        }
        int legend = 0;
        for (const auto& s : series_) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                    continue;
                out << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
            }
            out << "\"/>\n";
            if (!s.label.empty()) {
                const double ly = T + 14 + 14 * legend++;
                out << "<text x=\"" << W - R - 6 << "\" y=\"" << ly << "\" text-anchor=\"end\" fill=\"" << s.color
                    << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
            }
        }
        out << "</svg>\n";
    }

private:
    static double inf() { return std::numeric_limits<double>::infinity(); }

    static std::string num(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return buf;
    }

    static std::string tick(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-14 ? 0.0 : v);
        return buf;
    }

    static std::string escape(const std::string& s)
    {
        std::string out;
        for (char c : s) {
            switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
            }
        }
        return out;
    }

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
    std::vector<std::pair<double, double>> shaded_;
    bool equal_aspect_ = false;
};

} // namespace strutlab::cli
