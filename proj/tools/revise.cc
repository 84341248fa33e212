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

// Usage example:
//
//   revise train --data data/credit_risk_fixture.csv --out model.tsv
//   revise explain --data data/credit_risk_fixture.csv --model model.tsv \
//     --out attributions.csv
//   revise plan --data data/credit_risk_fixture.csv --model model.tsv \
//     --start S001
//   revise serve --data data/credit_risk_fixture.csv --model model.tsv \
//     --ui-dir ui/dist

#include <iostream>

#include "revise/cli.h"

int main(int argc, char** argv) {
  return revise::cli::Main(argc, argv, std::cout, std::cerr);
}
