/*
 * Copyright 2026 The Revise Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef REVISE_TEXT_FORMAT_H_
#define REVISE_TEXT_FORMAT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace revise {

// Decimal with 17 significant digits ("%.17g"); parses back to the same
// double. Non-finite values are rendered as "nan", "inf" or "-inf".
std::string FormatDouble(double value);

// Whole-string decimal parse. Rejects empty strings, trailing garbage and
// non-finite values.
std::optional<double> ParseDouble(std::string_view text);

// Splits on `sep` without any quoting rules. Strips surrounding spaces and a
// trailing carriage return from each cell.
std::vector<std::string> SplitCells(std::string_view line, char sep);

}  // namespace revise

#endif  // REVISE_TEXT_FORMAT_H_
