#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "depthkit/metrics.h"

namespace depthkit::bench {

// Shortest decimal that round-trips through strtod.
std::string FormatDouble(double x);

// Quotes a field when it holds a comma, quote or line break.
std::string CsvField(std::string_view s);

struct ImageMetrics {
  std::string id;
  MetricReport report;
};

std::string MetricsCsv(const std::vector<ImageMetrics>& rows,
                       std::span<const double> taus, bool with_vn);
std::string MetricsMarkdown(const MetricReport& aggregate, std::size_t images,
                            std::size_t failed);

struct SweepPoint {
  double value = 0.0;
  double absrel = 0.0;
  double rmse = 0.0;
  double delta1 = 0.0;
};

std::string SweepCsv(std::string_view axis, const std::vector<SweepPoint>& points);

// Self-contained 800x500 SVG with one panel and polyline per metric.
std::string SweepSvg(std::string_view axis, const std::vector<SweepPoint>& points);

}  // namespace depthkit::bench
