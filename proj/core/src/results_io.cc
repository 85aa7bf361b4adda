// Copyright 2026 The otbary Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "json.hpp"
#include "otbary/errors.h"
#include "otbary/experiments.h"
#include "otbary/measure_io.h"

namespace otbary {
namespace {

using nlohmann::json;

constexpr char kHeader[] =
    "axis,replication,empirical_cost,population_cost_estimate,"
    "reference_optimum_estimate,estimation_error,wall_time_ms";
constexpr double kZ95 = 1.96;

double ParseNumber(const std::string& field, size_t line) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size()) {
    throw InputError("results line " + std::to_string(line) +
                     ": bad number '" + field + "'");
  }
  return v;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

std::string Fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

std::string RecordsToCsv(const std::vector<ExperimentRecord>& records) {
  std::string out = std::string(kHeader) + "\n";
  for (const ExperimentRecord& r : records) {
    out += FormatDouble(r.axis) + "," + std::to_string(r.replication) + "," +
           FormatDouble(r.empirical_cost) + "," +
           FormatDouble(r.population_cost_estimate) + "," +
           FormatDouble(r.reference_optimum_estimate) + "," +
           FormatDouble(r.estimation_error) + "," +
           FormatDouble(r.wall_time_ms) + "\n";
  }
  return out;
}

std::vector<ExperimentRecord> RecordsFromCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw InputError("results CSV has an unexpected header");
  }
  std::vector<ExperimentRecord> records;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 7) {
      throw InputError("results line " + std::to_string(lineno) +
                       ": expected 7 fields");
    }
    ExperimentRecord r;
    r.axis = ParseNumber(f[0], lineno);
    r.replication = static_cast<size_t>(ParseNumber(f[1], lineno));
    r.empirical_cost = ParseNumber(f[2], lineno);
    r.population_cost_estimate = ParseNumber(f[3], lineno);
    r.reference_optimum_estimate = ParseNumber(f[4], lineno);
    r.estimation_error = ParseNumber(f[5], lineno);
    r.wall_time_ms = ParseNumber(f[6], lineno);
    records.push_back(r);
  }
  return records;
}

std::vector<ExperimentRecord> ReadRecordsCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return RecordsFromCsv(ss.str());
}

std::vector<AxisSummary> SummarizeByAxis(
    const std::vector<ExperimentRecord>& records) {
  std::map<double, std::vector<double>> groups;
  for (const ExperimentRecord& r : records) {
    auto& g = groups[r.axis];
    if (std::isfinite(r.estimation_error)) g.push_back(r.estimation_error);
  }
  std::vector<AxisSummary> out;
  for (const auto& [axis, errors] : groups) {
    AxisSummary s;
    s.axis = axis;
    s.count = errors.size();
    if (s.count > 0) {
      double mean = 0.0;
      for (double e : errors) mean += e;
      mean /= static_cast<double>(s.count);
      s.mean_error = mean;
      if (s.count > 1) {
        double var = 0.0;
        for (double e : errors) var += (e - mean) * (e - mean);
        var /= static_cast<double>(s.count - 1);
        s.std_error = std::sqrt(var / static_cast<double>(s.count));
      }
    } else {
      s.mean_error = std::nan("");
    }
    s.ci_half_width = kZ95 * s.std_error;
    out.push_back(s);
  }
  return out;
}

SlopeReport EstimateSlope(const std::vector<ExperimentRecord>& records) {
  SlopeReport rep;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> var;
  for (const AxisSummary& s : SummarizeByAxis(records)) {
    if (!(s.axis > 0.0) || !(s.mean_error > 0.0)) {
      rep.excluded.push_back(s.axis);
      continue;
    }
    rep.points.push_back(s);
    x.push_back(std::log(s.axis));
    y.push_back(std::log(s.mean_error));
    // Delta method: Var(log m) ~ (se / m)^2.
    const double rel = s.std_error / s.mean_error;
    var.push_back(rel * rel);
  }
  const size_t n = x.size();
  if (n < 3) {
    throw InputError("slope fit needs at least 3 axis values with positive "
                     "mean error, got " + std::to_string(n));
  }
  double xbar = 0.0;
  double ybar = 0.0;
  for (size_t i = 0; i < n; ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= static_cast<double>(n);
  ybar /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  rep.slope = sxy / sxx;
  rep.intercept = ybar - rep.slope * xbar;
  double var_slope = 0.0;
  double var_intercept = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double c = (x[i] - xbar) / sxx;
    const double d = 1.0 / static_cast<double>(n) - xbar * c;
    var_slope += c * c * var[i];
    var_intercept += d * d * var[i];
  }
  rep.slope_half_width = kZ95 * std::sqrt(var_slope);
  rep.intercept_half_width = kZ95 * std::sqrt(var_intercept);
  return rep;
}

std::string SlopeToJson(const SlopeReport& slope) {
  json j;
  j["slope"] = slope.slope;
  j["intercept"] = slope.intercept;
  j["slope_ci95_half_width"] = slope.slope_half_width;
  j["intercept_ci95_half_width"] = slope.intercept_half_width;
  j["points"] = json::array();
  for (const AxisSummary& s : slope.points) {
    j["points"].push_back({{"axis", s.axis},
                           {"count", s.count},
                           {"mean_error", s.mean_error},
                           {"std_error", s.std_error},
                           {"ci95_half_width", s.ci_half_width}});
  }
  j["excluded_axis_values"] = slope.excluded;
  return j.dump(2);
}

std::string RenderChartSvg(const std::vector<ExperimentRecord>& records,
                           const std::string& series, double reference_slope) {
  std::vector<AxisSummary> pts;
  for (const AxisSummary& s : SummarizeByAxis(records)) {
    if (s.axis > 0.0 && s.mean_error > 0.0) pts.push_back(s);
  }
  constexpr double kW = 640.0;
  constexpr double kH = 420.0;
  constexpr double kLeft = 70.0;
  constexpr double kRight = 20.0;
  constexpr double kTop = 30.0;
  constexpr double kBottom = 50.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (pts.empty()) {
    svg << "<text x=\"" << kW / 2 << "\" y=\"" << kH / 2
        << "\" text-anchor=\"middle\">no positive mean errors</text>\n</svg>\n";
    return svg.str();
  }

  double xlo = std::log10(pts.front().axis);
  double xhi = std::log10(pts.back().axis);
  double ylo = 1e300;
  double yhi = -1e300;
  for (const AxisSummary& s : pts) {
    const double lo = s.mean_error - s.ci_half_width;
    ylo = std::min(ylo, std::log10(lo > 0.0 ? lo : s.mean_error / 2.0));
    yhi = std::max(yhi, std::log10(s.mean_error + s.ci_half_width));
  }
  const double anchor_x = std::log10(pts.front().axis);
  const double anchor_y = std::log10(pts.front().mean_error);
  const double ref_end = anchor_y + reference_slope * (xhi - anchor_x);
  ylo = std::min(ylo, ref_end);
  yhi = std::max(yhi, ref_end);
  if (xhi - xlo < 1e-9) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  if (yhi - ylo < 1e-9) {
    ylo -= 0.5;
    yhi += 0.5;
  }
  const double xpad = 0.05 * (xhi - xlo);
  const double ypad = 0.08 * (yhi - ylo);
  xlo -= xpad;
  xhi += xpad;
  ylo -= ypad;
  yhi += ypad;
  auto px = [&](double lx) {
    return kLeft + (lx - xlo) / (xhi - xlo) * (kW - kLeft - kRight);
  };
  auto py = [&](double ly) {
    return kH - kBottom - (ly - ylo) / (yhi - ylo) * (kH - kTop - kBottom);
  };

  svg << "<g stroke=\"black\" fill=\"none\">\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\""
      << kW - kRight << "\" y2=\"" << kH - kBottom << "\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kH - kBottom << "\"/>\n";
  svg << "</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (const AxisSummary& s : pts) {
    svg << "<text x=\"" << Fixed(px(std::log10(s.axis))) << "\" y=\""
        << kH - kBottom + 16 << "\" text-anchor=\"middle\">" << s.axis
        << "</text>\n";
  }
  svg << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10
      << "\" text-anchor=\"middle\">axis (log scale)</text>\n";
  svg << "<text x=\"16\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 16 "
      << kH / 2 << ")\" text-anchor=\"middle\">estimation error (log "
      << "scale)</text>\n";
  svg << "</g>\n";

  svg << "<line class=\"reference\" stroke=\"gray\" stroke-dasharray=\"6 4\" "
      << "x1=\"" << Fixed(px(anchor_x)) << "\" y1=\"" << Fixed(py(anchor_y))
      << "\" x2=\"" << Fixed(px(xhi - xpad)) << "\" y2=\""
      << Fixed(py(anchor_y + reference_slope * (xhi - xpad - anchor_x)))
      << "\"/>\n";

  svg << "<g class=\"series\" data-series=\"" << series
      << "\" stroke=\"steelblue\" fill=\"steelblue\">\n";
  std::string path;
  for (const AxisSummary& s : pts) {
    const double x = px(std::log10(s.axis));
    const double lo = s.mean_error - s.ci_half_width;
    const double ylow = py(std::log10(lo > 0.0 ? lo : s.mean_error / 2.0));
    const double yhigh = py(std::log10(s.mean_error + s.ci_half_width));
    svg << "<line class=\"ci-bar\" x1=\"" << Fixed(x) << "\" y1=\""
        << Fixed(ylow) << "\" x2=\"" << Fixed(x) << "\" y2=\"" << Fixed(yhigh)
        << "\"/>\n";
    svg << "<circle cx=\"" << Fixed(x) << "\" cy=\""
        << Fixed(py(std::log10(s.mean_error))) << "\" r=\"3\"/>\n";
    path += (path.empty() ? "M" : " L") + Fixed(x) + " " +
            Fixed(py(std::log10(s.mean_error)));
  }
  svg << "<path fill=\"none\" d=\"" << path << "\"/>\n";
  svg << "</g>\n";
  svg << "<text x=\"" << kW - kRight << "\" y=\"20\" text-anchor=\"end\" "
      << "font-family=\"sans-serif\" font-size=\"12\">" << series
      << " (mean, 95% CI); dashed: slope " << reference_slope << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void WriteResults(const std::vector<ExperimentRecord>& records,
                  const std::optional<SlopeReport>& slope,
                  const std::string& dir, const std::string& series,
                  double reference_slope, const std::string& summary_extra) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir + ": " + ec.message());
  const fs::path base(dir);
  WriteFile(base / "results.csv", RecordsToCsv(records));

  json summary = json::object();
  try {
    const json extra = json::parse(summary_extra);
    if (extra.is_object()) summary.update(extra);
  } catch (const json::exception&) {
    throw InputError("summary extra is not valid JSON");
  }
  summary["series"] = series;
  summary["record_count"] = records.size();
  summary["slope"] = slope ? json::parse(SlopeToJson(*slope)) : json(nullptr);
  WriteFile(base / "summary.json", summary.dump(2) + "\n");

  if (!records.empty()) {
    WriteFile(base / "chart.svg", RenderChartSvg(records, series, reference_slope));
  }
}

}  // namespace otbary
