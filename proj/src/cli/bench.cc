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

#include "privver/cli/bench.h"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "privver/common/error.h"
#include "privver/jointbayes/synth.h"
#include "privver/scenarios/scenarios.h"

namespace privver::cli {
namespace {

using scenarios::ScenarioId;

constexpr Stage kStages[] = {Stage::kRegistration, Stage::kVerification};
constexpr Party kParties[] = {Party::kClient, Party::kServer};

double Median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

jointbayes::Vector Clip(const jointbayes::Vector& v, double bound) {
  return v.cwiseMax(-bound).cwiseMin(bound);
}

struct Sessions {
  scenarios::PartyStats client;
  scenarios::PartyStats server;
};

// Runs one client session against the server over the configured transport.
template <typename ClientFn>
Sessions RunSession(scenarios::Server& server, bool in_process, Rng& server_rng, ClientFn client_fn) {
  Sessions out;
  scenarios::SessionOutcome outcome;
  if (in_process) {
    protocols::TwoPartyRun run = protocols::RunInProcess(
        [&](protocols::Channel& ch) { out.client = client_fn(ch); },
        [&](protocols::Channel& ch) { outcome = server.HandleSession(ch, server_rng); });
    if (run.alice_error) std::rethrow_exception(run.alice_error);
    run.Rethrow();
  } else {
    protocols::TcpListener listener("127.0.0.1", 0);
    std::thread worker([&] {
      auto ch = listener.Accept();
      outcome = server.HandleSession(*ch, server_rng);
    });
    try {
      auto ch = protocols::ConnectTcp("127.0.0.1", listener.port());
      out.client = client_fn(*ch);
    } catch (...) {
      worker.join();
      throw;
    }
    worker.join();
  }
  if (outcome.kind == scenarios::SessionOutcome::Kind::kFailed) Fail(outcome.error_code, outcome.error);
  out.server = outcome.stats;
  return out;
}

void Record(BenchReport* report, Stage stage, ScenarioId s, const Sessions& sessions) {
  BenchCell& c = report->cells[{stage, Party::kClient, s}];
  c.seconds.push_back(sessions.client.compute_seconds);
  c.messages = sessions.client.messages;
  c.bytes = sessions.client.bytes;
  BenchCell& sv = report->cells[{stage, Party::kServer, s}];
  sv.seconds.push_back(sessions.server.compute_seconds);
  sv.messages = sessions.server.messages;
  sv.bytes = sessions.server.bytes;
}

}  // namespace

const char* StageName(Stage stage) { return stage == Stage::kRegistration ? "registration" : "verification"; }
const char* PartyName(Party party) { return party == Party::kClient ? "client" : "server"; }

const char* SchemeLabel(ScenarioId scenario) {
  switch (scenario) {
    case ScenarioId::kS1Plaintext:
      return "plaintext";
    case ScenarioId::kS2Additive:
      return "additive";
    case ScenarioId::kS3Leveled:
      return "leveled";
  }
  return "?";
}

size_t BenchReport::populated() const {
  size_t n = 0;
  for (const auto& [key, cell] : cells) n += cell.seconds.empty() ? 0 : 1;
  return n;
}

std::vector<std::pair<Stage, Party>> BenchReport::OrderingViolations() const {
  std::vector<std::pair<Stage, Party>> out;
  for (Stage stage : kStages) {
    for (Party party : kParties) {
      double prev = -1;
      bool ok = true;
      for (ScenarioId s : {ScenarioId::kS1Plaintext, ScenarioId::kS2Additive, ScenarioId::kS3Leveled}) {
        auto it = cells.find({stage, party, s});
        if (it == cells.end()) continue;
        if (it->second.median_seconds < prev) ok = false;
        prev = it->second.median_seconds;
      }
      if (!ok) out.emplace_back(stage, party);
    }
  }
  return out;
}

BenchReport RunBench(const jointbayes::Model& model, const BenchConfig& config,
                     const std::function<void(const std::string&)>& progress) {
  if (config.runs < 1) Fail(ErrorCode::kBadParams, "bench needs at least one run");
  auto say = [&](const std::string& s) {
    if (progress) progress(s);
  };
  BenchReport report;
  report.d = model.verifier.d();
  report.runs = config.runs;
  report.in_process = config.in_process;
  report.scenarios = config.scenarios;

  const encoding::EncodedVerifier encoded = encoding::EncodeVerifier(model.verifier, config.scales);
  Rng keys_rng = Rng::ForSession(config.seed, "bench-keys");
  Rng data_rng = Rng::FromSeed(config.seed, "bench-data");
  const jointbayes::Matrix mu_factor = jointbayes::CovarianceFactor(model.params.s_mu);
  const jointbayes::Matrix eps_factor = jointbayes::CovarianceFactor(model.params.s_eps);

  // Same identities in every scenario so the decisions can be compared.
  std::vector<std::pair<jointbayes::Vector, jointbayes::Vector>> samples;
  for (int r = 0; r < config.runs; ++r) {
    jointbayes::Vector mu = jointbayes::SampleGaussian(mu_factor, data_rng);
    jointbayes::Vector x = mu + jointbayes::SampleGaussian(eps_factor, data_rng);
    jointbayes::Vector y = mu + jointbayes::SampleGaussian(eps_factor, data_rng);
    samples.emplace_back(Clip(x, encoding::kInputRange), Clip(y, encoding::kInputRange));
  }

  say("generating server keys");
  scenarios::ServerKeys server_keys = scenarios::GenerateServerKeys(keys_rng, config.sizes);
  for (ScenarioId s : config.scenarios) {
    say(std::string("generating ") + scenarios::ScenarioName(s) + " client keys");
    scenarios::ClientKeys client = scenarios::GenerateClientKeys(s, keys_rng, config.sizes);
    std::vector<protocols::AliceKeys> ephemeral;
    if (s == ScenarioId::kS1Plaintext) {
      for (int r = 0; r < config.runs; ++r) ephemeral.push_back(scenarios::GenerateEphemeralKeys(keys_rng, config.sizes));
    }
    auto db = scenarios::Database::InMemory();
    scenarios::Server server({s, encoded, config.compare}, server_keys, db.get());
    Rng client_rng = Rng::ForSession(config.seed, std::string("bench-client-") + scenarios::ScenarioName(s));
    Rng server_rng = Rng::ForSession(config.seed, std::string("bench-server-") + scenarios::ScenarioName(s));
    for (int r = 0; r < config.runs; ++r) {
      say(std::string(scenarios::ScenarioName(s)) + " run " + std::to_string(r + 1) + "/" +
          std::to_string(config.runs));
      scenarios::IdCard card;
      Sessions reg = RunSession(server, config.in_process, server_rng, [&](protocols::Channel& ch) {
        scenarios::RegistrationResult res = scenarios::RegisterClient(ch, client, samples[r].first, client_rng);
        card = res.card;
        return res.stats;
      });
      Record(&report, Stage::kRegistration, s, reg);
      if (s == ScenarioId::kS1Plaintext) client.compare = ephemeral[r];
      bool granted = false;
      Sessions ver = RunSession(server, config.in_process, server_rng, [&](protocols::Channel& ch) {
        scenarios::AccessDecision d = scenarios::VerifyClient(ch, client, card, samples[r].second, client_rng);
        granted = d.granted;
        return d.stats;
      });
      Record(&report, Stage::kVerification, s, ver);
      report.decisions[s].push_back(granted);
    }
  }
  for (auto& [key, cell] : report.cells) cell.median_seconds = Median(cell.seconds);
  return report;
}

std::string FormatBenchTable(const BenchReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "d = %d, %d runs, median compute seconds per party (%s)\n", report.d,
                report.runs, report.in_process ? "in-process" : "loopback TCP");
  out << line;
  std::snprintf(line, sizeof(line), "%-13s %-7s", "stage", "party");
  out << line;
  for (ScenarioId s : report.scenarios) {
    std::snprintf(line, sizeof(line), " %12s %8s %12s", SchemeLabel(s), "msgs", "bytes");
    out << line;
  }
  out << "\n";
  for (Stage stage : kStages) {
    for (Party party : kParties) {
      std::snprintf(line, sizeof(line), "%-13s %-7s", StageName(stage), PartyName(party));
      out << line;
      for (ScenarioId s : report.scenarios) {
        auto it = report.cells.find({stage, party, s});
        if (it == report.cells.end()) {
          std::snprintf(line, sizeof(line), " %12s %8s %12s", "-", "-", "-");
        } else {
          std::snprintf(line, sizeof(line), " %12.4f %8zu %12zu", it->second.median_seconds, it->second.messages,
                        it->second.bytes);
        }
        out << line;
      }
      out << "\n";
    }
  }
  auto violations = report.OrderingViolations();
  if (violations.empty()) {
    out << "ordering plaintext <= additive <= leveled: holds in every cell\n";
  } else {
    for (const auto& [stage, party] : violations) {
      out << "ordering plaintext <= additive <= leveled: VIOLATED for " << StageName(stage) << " " << PartyName(party)
          << "\n";
    }
  }
  return out.str();
}

std::string BenchJson(const BenchReport& report) {
  nlohmann::json j;
  j["d"] = report.d;
  j["runs"] = report.runs;
  j["transport"] = report.in_process ? "in-process" : "tcp";
  j["cells"] = nlohmann::json::array();
  for (const auto& [key, cell] : report.cells) {
    const auto& [stage, party, s] = key;
    j["cells"].push_back({{"stage", StageName(stage)},
                          {"party", PartyName(party)},
                          {"scheme", SchemeLabel(s)},
                          {"scenario", scenarios::ScenarioName(s)},
                          {"median_seconds", cell.median_seconds},
                          {"seconds", cell.seconds},
                          {"messages", cell.messages},
                          {"bytes", cell.bytes}});
  }
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& [stage, party] : report.OrderingViolations()) {
    violations.push_back({{"stage", StageName(stage)}, {"party", PartyName(party)}});
  }
  j["ordering_violations"] = violations;
  return j.dump(2);
}

}  // namespace privver::cli
