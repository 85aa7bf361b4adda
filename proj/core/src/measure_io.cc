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

#include "otbary/measure_io.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "otbary/errors.h"

namespace otbary {
namespace {

using nlohmann::json;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

DiscreteMeasure MeasureFromJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed measure JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("points")) {
    throw InputError("measure JSON needs a \"points\" array");
  }
  try {
    auto points = doc.at("points").get<std::vector<Point>>();
    if (doc.contains("weights")) {
      return DiscreteMeasure::Create(points,
                                     doc.at("weights").get<std::vector<double>>());
    }
    return DiscreteMeasure::Uniform(points);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed measure JSON: ") + e.what());
  }
}

std::string MeasureToJson(const DiscreteMeasure& m) {
  json doc;
  doc["points"] = m.points();
  doc["weights"] = std::vector<double>(m.weights().begin(), m.weights().end());
  return doc.dump();
}

DiscreteMeasure ReadMeasureFile(const std::string& path) {
  return MeasureFromJson(ReadFile(path));
}

void WriteMeasureFile(const std::string& path, const DiscreteMeasure& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << MeasureToJson(m) << "\n";
}

std::vector<Point> ReadPointsCsv(const std::string& path) {
  std::istringstream in(ReadFile(path));
  std::vector<Point> points;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    Point p;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      cell = Trim(cell);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw InputError(path + ":" + std::to_string(line_no) +
                         ": not a number: '" + cell + "'");
      }
      p.push_back(v);
    }
    points.push_back(std::move(p));
  }
  if (points.empty()) throw InputError("'" + path + "' has no points");
  return points;
}

void WritePointsCsv(const std::string& path, const std::vector<Point>& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  for (const Point& p : points) {
    for (size_t k = 0; k < p.size(); ++k) {
      if (k) out << ',';
      out << FormatDouble(p[k]);
    }
    out << '\n';
  }
}

DiscreteMeasure LoadMeasure(const std::string& path) {
  if (EndsWith(path, ".csv")) return DiscreteMeasure::Uniform(ReadPointsCsv(path));
  return ReadMeasureFile(path);
}

std::string FormatDouble(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace otbary
