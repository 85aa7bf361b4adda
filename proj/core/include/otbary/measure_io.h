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

#ifndef OTBARY_MEASURE_IO_H_
#define OTBARY_MEASURE_IO_H_

#include <string>
#include <vector>

#include "otbary/measure.h"

namespace otbary {

// JSON schema: {"points": [[x, ...], ...], "weights": [w, ...]}. "weights"
// may be omitted, in which case the measure is uniform.
DiscreteMeasure MeasureFromJson(const std::string& text);
std::string MeasureToJson(const DiscreteMeasure& m);

DiscreteMeasure ReadMeasureFile(const std::string& path);
void WriteMeasureFile(const std::string& path, const DiscreteMeasure& m);

// One point per row, comma separated, no header.
std::vector<Point> ReadPointsCsv(const std::string& path);
void WritePointsCsv(const std::string& path, const std::vector<Point>& points);

// Loads a measure from .json, or an empirical measure from a .csv sample file.
DiscreteMeasure LoadMeasure(const std::string& path);

// Decimal text with 17 significant digits; parses back bit-exactly.
std::string FormatDouble(double x);

}  // namespace otbary

#endif  // OTBARY_MEASURE_IO_H_
