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

#ifndef REVISE_JSON_FORMAT_H_
#define REVISE_JSON_FORMAT_H_

#include <string>

#include "json.hpp"

namespace revise {

using Json = nlohmann::ordered_json;

// Compact serialization with floating-point numbers written to 17
// significant digits. Keys keep insertion order; non-finite numbers become
// null.
std::string DumpJson(const Json& value);

}  // namespace revise

#endif  // REVISE_JSON_FORMAT_H_
