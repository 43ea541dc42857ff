/*
 * Copyright 2026 The Privver Authors.
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

#ifndef PRIVVER_CLI_BENCH_H_
#define PRIVVER_CLI_BENCH_H_

#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "privver/encoding/fixed_point.h"
#include "privver/jointbayes/io.h"
#include "privver/protocols/compare.h"
#include "privver/scenarios/keys.h"
#include "privver/scenarios/types.h"

namespace privver::cli {

enum class Stage { kRegistration, kVerification };
enum class Party { kClient, kServer };

const char* StageName(Stage stage);
const char* PartyName(Party party);
// "plaintext", "additive", "leveled".
const char* SchemeLabel(scenarios::ScenarioId scenario);

struct BenchConfig {
  std::vector<scenarios::ScenarioId> scenarios{scenarios::ScenarioId::kS1Plaintext,
                                               scenarios::ScenarioId::kS2Additive,
                                               scenarios::ScenarioId::kS3Leveled};
  int runs = 5;
  scenarios::KeySizes sizes;
  encoding::LrScales scales;
  protocols::ComparisonParams compare;
  // false runs each session over a loopback TCP connection.
  bool in_process = false;
  uint64_t seed = 1;
};

struct BenchCell {
  std::vector<double> seconds;
  double median_seconds = 0;
  size_t messages = 0;
  size_t bytes = 0;
};

using CellKey = std::tuple<Stage, Party, scenarios::ScenarioId>;

struct BenchReport {
  int d = 0;
  int runs = 0;
  bool in_process = false;
  std::vector<scenarios::ScenarioId> scenarios;
  std::map<CellKey, BenchCell> cells;
  // Decisions from every verification run, per scenario.
  std::map<scenarios::ScenarioId, std::vector<bool>> decisions;

  // Populated cells; 12 when all three scenarios ran.
  size_t populated() const;
  // (stage, party) rows where plaintext <= additive <= leveled fails on the
  // median compute times.
  std::vector<std::pair<Stage, Party>> OrderingViolations() const;
};

// Registers and verifies runs fresh identities drawn from the model's prior in
// every scenario. Key generation happens before any timing starts; S1 draws a
// pre-generated ephemeral comparison key set per verification.
BenchReport RunBench(const jointbayes::Model& model, const BenchConfig& config,
                     const std::function<void(const std::string&)>& progress = {});

std::string FormatBenchTable(const BenchReport& report);
std::string BenchJson(const BenchReport& report);

}  // namespace privver::cli

#endif  // PRIVVER_CLI_BENCH_H_
