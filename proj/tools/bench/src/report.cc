#include "depthkit/bench/report.h"

#include <algorithm>
#include <array>

#include <fmt/format.h>

namespace depthkit::bench {

std::string FormatDouble(double x) { return fmt::format("{}", x); }

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string MetricsCsv(const std::vector<ImageMetrics>& rows, std::span<const double> taus,
                       bool with_vn) {
  std::string out = "id,n_eval,absrel,mae,rmse";
  for (const double tau : taus) out += ",delta_" + FormatDouble(tau);
  if (with_vn) out += ",vn_angle";
  out += "\r\n";
  for (const ImageMetrics& row : rows) {
    const MetricReport& r = row.report;
    out += fmt::format("{},{},{},{},{}", CsvField(row.id), r.n_eval, FormatDouble(r.absrel),
                       FormatDouble(r.mae), FormatDouble(r.rmse));
    for (const auto& [tau, frac] : r.delta) out += "," + FormatDouble(frac);
    if (with_vn) out += "," + (r.vn_angle ? FormatDouble(*r.vn_angle) : std::string());
    out += "\r\n";
  }
  return out;
}

std::string MetricsMarkdown(const MetricReport& a, std::size_t images, std::size_t failed) {
  std::string head = "| images | failed | AbsRel | MAE | RMSE |";
  std::string rule = "|---:|---:|---:|---:|---:|";
  std::string body = fmt::format("| {} | {} | {:.6f} | {:.6f} | {:.6f} |", images, failed,
                                 a.absrel, a.mae, a.rmse);
  for (const auto& [tau, frac] : a.delta) {
    head += fmt::format(" δ<{:.4g} |", tau);
    rule += "---:|";
    body += fmt::format(" {:.6f} |", frac);
  }
  if (a.vn_angle) {
    head += " VN angle (deg) |";
    rule += "---:|";
    body += fmt::format(" {:.4f} |", *a.vn_angle * 180.0 / 3.14159265358979323846);
  }
  return head + "\n" + rule + "\n" + body + "\n";
}

std::string SweepCsv(std::string_view axis, const std::vector<SweepPoint>& points) {
  std::string out = fmt::format("{},absrel,rmse,delta1\r\n", axis);
  for (const SweepPoint& p : points) {
    out += fmt::format("{},{},{},{}\r\n", FormatDouble(p.value), FormatDouble(p.absrel),
                       FormatDouble(p.rmse), FormatDouble(p.delta1));
  }
  return out;
}

namespace {

struct Panel {
  const char* label;
  const char* color;
  double SweepPoint::*field;
};

constexpr std::array<Panel, 3> kPanels = {{
    {"AbsRel", "#1f77b4", &SweepPoint::absrel},
    {"RMSE (m)", "#d62728", &SweepPoint::rmse},
    {"delta1", "#2ca02c", &SweepPoint::delta1},
}};

std::pair<double, double> PaddedRange(double lo, double hi) {
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    const double pad = std::max(std::abs(hi) * 0.05, 1e-6);
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

std::string SweepSvg(std::string_view axis, const std::vector<SweepPoint>& points) {
  constexpr double kWidth = 800, kHeight = 500;
  constexpr double kPanelW = kWidth / 3, kLeft = 62, kRight = 14, kTop = 40, kBottom = 60;
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      kWidth, kHeight);
  if (points.empty()) return svg + "</svg>\n";

  double xmin = points.front().value, xmax = points.back().value;
  if (xmin == xmax) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  for (std::size_t p = 0; p < kPanels.size(); ++p) {
    const Panel& panel = kPanels[p];
    double ylo = points.front().*panel.field, yhi = ylo;
    for (const SweepPoint& pt : points) {
      ylo = std::min(ylo, pt.*panel.field);
      yhi = std::max(yhi, pt.*panel.field);
    }
    std::tie(ylo, yhi) = PaddedRange(ylo, yhi);
    const double x0 = p * kPanelW + kLeft, x1 = (p + 1) * kPanelW - kRight;
    const double y0 = kHeight - kBottom, y1 = kTop;
    auto sx = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); };
    auto sy = [&](double y) { return y0 - (y - ylo) / (yhi - ylo) * (y0 - y1); };

    svg += fmt::format("<g>\n<text x=\"{:.1f}\" y=\"24\" text-anchor=\"middle\" "
                       "font-size=\"13\">{}</text>\n",
                       (x0 + x1) / 2, panel.label);
    svg += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" "
                       "stroke=\"black\"/>\n",
                       x0, y0, x1);
    svg += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" "
                       "stroke=\"black\"/>\n",
                       x0, y0, y1);
    for (int t = 0; t <= 4; ++t) {
      const double xv = xmin + (xmax - xmin) * t / 4.0;
      const double yv = ylo + (yhi - ylo) * t / 4.0;
      svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.4g}</text>\n",
                         sx(xv), y0 + 16, xv);
      svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n",
                         x0 - 4, sy(yv) + 4, yv);
    }
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                       (x0 + x1) / 2, kHeight - 18, axis);

    std::string pts;
    for (const SweepPoint& pt : points) {
      pts += fmt::format("{:.2f},{:.2f} ", sx(pt.value), sy(pt.*panel.field));
    }
    pts.pop_back();
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" "
                       "points=\"{}\"/>\n",
                       panel.color, pts);
    for (const SweepPoint& pt : points) {
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n",
                         sx(pt.value), sy(pt.*panel.field), panel.color);
    }
    svg += "</g>\n";
  }
  return svg + "</svg>\n";
}

}  // namespace depthkit::bench
