#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pisco/csv.hpp"
#include "pisco/errors.hpp"
#include "pisco/harness.hpp"

namespace pisco {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Series {
    std::string label;
    std::vector<double> x, y;
};

constexpr double kW = 760, kH = 480, kL = 70, kR = 180, kT = 36, kB = 48;

std::string svg_header(const std::string& title) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\""
       << " font-size=\"15\">" << title << "</text>\n";
    return os.str();
}

// Line chart with optional log10 y-axis; returns the SVG text.
std::string line_chart(const std::string& title, const std::string& xlabel,
                       const std::vector<Series>& series, bool log_y) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Series& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double y = s.y[i];
            if (log_y) {
                if (y <= 0.0) continue;
                y = std::log10(y);
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (ymax - ymin < 1e-12) {
        ymax += 0.5;
        ymin -= 0.5;
    }
    if (xmax - xmin < 1e-12) xmax = xmin + 1;

    const double pw = kW - kL - kR, ph = kH - kT - kB;
    auto X = [&](double x) { return kL + (x - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double y) { return kT + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << svg_header(title);
    os << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        os << "<line x1=\"" << kL << "\" y1=\"" << Y(fy) << "\" x2=\"" << kL + pw << "\" y2=\""
           << Y(fy) << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << kL - 6 << "\" y=\"" << Y(fy) + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << (log_y ? "1e" + num(fy) : num(fy)) << "</text>\n";
        os << "<text x=\"" << X(fx) << "\" y=\"" << kT + ph + 16
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(fx)
           << "</text>\n";
    }
    os << "<text x=\"" << kL + pw / 2 << "\" y=\"" << kH - 10
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel
       << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        const char* color = kPalette[si % 10];
        std::ostringstream pts;
        bool pen_up = true;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double y = s.y[i];
            if (log_y) {
                if (y <= 0.0) {
                    pen_up = true;
                    continue;
                }
                y = std::log10(y);
            }
            pts << (pen_up ? "M" : "L") << num(X(s.x[i])) << " " << num(Y(y)) << " ";
            pen_up = false;
        }
        os << "<path d=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.5\"/>\n";
        const double ly = kT + 16 + 18 * static_cast<double>(si);
        os << "<line x1=\"" << kL + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << kL + pw + 36
           << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << kL + pw + 42 << "\" y=\"" << ly + 4
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

struct BarCell {
    std::string label;
    double gossip = 0.0, server = 0.0;
};

std::string bar_chart(const std::string& title, const std::vector<BarCell>& cells) {
    double ymax = 1.0;
    for (const BarCell& c : cells) ymax = std::max(ymax, c.gossip + c.server);
    const double pw = kW - kL - kR, ph = kH - kT - kB;
    const double bw = pw / std::max<std::size_t>(1, cells.size());
    std::ostringstream os;
    os << svg_header(title);
    os << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fy = ymax * i / 4.0;
        const double y = kT + ph - fy / ymax * ph;
        os << "<line x1=\"" << kL << "\" y1=\"" << y << "\" x2=\"" << kL + pw << "\" y2=\"" << y
           << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << kL - 6 << "\" y=\"" << y + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(fy)
           << "</text>\n";
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const BarCell& c = cells[i];
        const double x = kL + bw * static_cast<double>(i) + bw * 0.15;
        const double w = bw * 0.7;
        const double hg = c.gossip / ymax * ph;
        const double hs = c.server / ymax * ph;
        os << "<rect x=\"" << num(x) << "\" y=\"" << num(kT + ph - hg) << "\" width=\"" << num(w)
           << "\" height=\"" << num(hg) << "\" fill=\"#1f77b4\"/>\n";
        os << "<rect x=\"" << num(x) << "\" y=\"" << num(kT + ph - hg - hs) << "\" width=\""
           << num(w) << "\" height=\"" << num(hs) << "\" fill=\"#d62728\"/>\n";
        os << "<text x=\"" << num(x + w / 2) << "\" y=\"" << kT + ph + 16
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << c.label
           << "</text>\n";
    }
    os << "<rect x=\"" << kL + pw + 12 << "\" y=\"" << kT + 8
       << "\" width=\"14\" height=\"10\" fill=\"#1f77b4\"/>"
       << "<text x=\"" << kL + pw + 32 << "\" y=\"" << kT + 17
       << "\" font-family=\"sans-serif\" font-size=\"11\">agent-to-agent</text>\n";
    os << "<rect x=\"" << kL + pw + 12 << "\" y=\"" << kT + 26
       << "\" width=\"14\" height=\"10\" fill=\"#d62728\"/>"
       << "<text x=\"" << kL + pw + 32 << "\" y=\"" << kT + 35
       << "\" font-family=\"sans-serif\" font-size=\"11\">agent-to-server</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace

void emit_plots(const std::filesystem::path& run_dir) {
    const csv::Document agg = csv::read(run_dir / "aggregate.csv");
    const int c_p = agg.column("p"), c_to = agg.column("T_o"), c_round = agg.column("round");
    if (c_p < 0 || c_to < 0 || c_round < 0)
        throw DataError("aggregate.csv is missing p/T_o/round columns");

    const char* metrics[] = {"grad_norm_sq", "consensus_err", "tracking_err",
                             "tracking_residual", "train_loss", "train_acc", "test_acc"};
    const bool log_scale[] = {true, true, true, true, false, false, false};

    for (int m = 0; m < 7; ++m) {
        const int col = agg.column(std::string(metrics[m]) + "_mean");
        if (col < 0) continue;
        std::map<std::pair<std::string, std::string>, Series> by_cell;
        for (const auto& row : agg.rows) {
            const std::string& val = row[col];
            if (val.empty()) continue;  // metric absent for this run (e.g. no test set)
            const auto key = std::make_pair(row[c_p], row[c_to]);
            Series& s = by_cell[key];
            if (s.label.empty()) s.label = "p=" + key.first + " T_o=" + key.second;
            s.x.push_back(std::stod(row[c_round]));
            s.y.push_back(std::stod(val));
        }
        if (by_cell.empty()) continue;  // nothing to draw for this metric
        std::vector<Series> series;
        for (auto& [k, s] : by_cell) series.push_back(std::move(s));

        // Companion CSV with exactly the plotted points.
        std::string data = "series,round,value\n";
        for (const Series& s : series)
            for (std::size_t i = 0; i < s.x.size(); ++i)
                data += s.label + ',' + csv::fmt(s.x[i]) + ',' + csv::fmt(s.y[i]) + '\n';
        csv::write_atomic(run_dir / ("plot_" + std::string(metrics[m]) + ".csv"), data);
        csv::write_atomic(run_dir / ("plot_" + std::string(metrics[m]) + ".svg"),
                          line_chart(std::string(metrics[m]) + " (seed mean)", "round", series,
                                     log_scale[m]));
    }

    // Stacked communication-split bars from the aggregated threshold table.
    const std::filesystem::path tpath = run_dir / "thresholds_agg.csv";
    if (std::filesystem::exists(tpath)) {
        const csv::Document th = csv::read(tpath);
        const int tp = th.column("p"), tt = th.column("T_o");
        const int tg = th.column("gossip_rounds_mean"), ts = th.column("server_rounds_mean");
        if (tp >= 0 && tt >= 0 && tg >= 0 && ts >= 0) {
            std::vector<BarCell> cells;
            std::string data = "cell,gossip_rounds_mean,server_rounds_mean\n";
            for (const auto& row : th.rows) {
                BarCell c;
                c.label = "p=" + row[tp] + " T=" + row[tt];
                c.gossip = row[tg].empty() ? 0.0 : std::stod(row[tg]);
                c.server = row[ts].empty() ? 0.0 : std::stod(row[ts]);
                cells.push_back(c);
                data += c.label + ',' + csv::fmt(c.gossip) + ',' + csv::fmt(c.server) + '\n';
            }
            csv::write_atomic(run_dir / "plot_comm_rounds.csv", data);
            csv::write_atomic(run_dir / "plot_comm_rounds.svg",
                              bar_chart("communication rounds by kind", cells));
        }
    }
}

}  // namespace pisco
