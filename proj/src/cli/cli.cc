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

#include "privver/cli/cli.h"

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "privver/cli/bench.h"
#include "privver/common/error.h"
#include "privver/common/rng.h"
#include "privver/jointbayes/io.h"
#include "privver/jointbayes/synth.h"
#include "privver/scenarios/scenarios.h"

namespace privver::cli {
namespace {

using jointbayes::Vector;
using scenarios::ScenarioId;

// Raised for problems that are the caller's fault rather than the session's.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

jointbayes::CovarianceSpec ParseCovSpec(const std::string& text) {
  // "<scale>" for scale*I, "spd:<scale>[:<seed>]" for a random SPD matrix.
  jointbayes::CovarianceSpec spec;
  try {
    if (text.rfind("spd:", 0) == 0) {
      spec.kind = jointbayes::CovarianceSpec::Kind::kRandomSpd;
      const std::string rest = text.substr(4);
      const auto colon = rest.find(':');
      spec.scale = std::stod(rest.substr(0, colon));
      if (colon != std::string::npos) spec.seed = std::stoull(rest.substr(colon + 1));
    } else {
      spec.scale = std::stod(text);
    }
  } catch (const std::exception&) {
    throw UsageError("bad covariance spec: " + text);
  }
  if (spec.scale < 0) throw UsageError("covariance scale must be non-negative");
  return spec;
}

Vector SelectRow(const std::string& path, int row) {
  const auto rows = jointbayes::ReadFeatureCsv(path);
  if (row < 0 || static_cast<size_t>(row) >= rows.size()) {
    throw UsageError("row " + std::to_string(row) + " out of range (" + std::to_string(rows.size()) + " rows)");
  }
  return rows[static_cast<size_t>(row)].values;
}

std::optional<uint64_t> SeedOpt(const CLI::Option* opt, uint64_t seed) {
  return opt->count() > 0 ? std::optional<uint64_t>(seed) : std::nullopt;
}

struct Options {
  // Shared
  std::string scenario = "s2";
  std::string model;
  std::string db;
  std::string keys;
  std::string host = "127.0.0.1";
  uint16_t port = 7450;
  uint64_t seed = 0;
  int scale_bits = encoding::kDefaultScaleBits;
  int kappa = protocols::kDefaultKappa;
  int compare_bits = protocols::kLrCompareBits;
  std::optional<double> threshold;
  std::string out;
  int additive_bits = 2048;
  int comparison_bits = 2048;

  // keygen
  std::string role = "client";
  // synth
  int d = 160;
  int identities = 500;
  int images = 5;
  std::string mu_spec = "1";
  std::string eps_spec = "0.1";
  // train / calibrate
  std::string features;
  int max_iters = 200;
  double tol = 1e-5;
  int positives = 3000;
  int negatives = 3000;
  // serve
  size_t max_sessions = 0;
  std::string port_file;
  // register / verify
  int row = 0;
  std::string card;
  // bench
  std::string scenario_list = "s1,s2,s3";
  int runs = 5;
  bool in_process = false;
  std::string json;
};

encoding::LrScales Scales(const Options& o) {
  if (o.scale_bits < 1 || o.scale_bits > 16) throw UsageError("--scale-bits must be in [1, 16]");
  encoding::LrScales s;
  s.feature = o.scale_bits;
  s.matrix = o.scale_bits;
  return s;
}

protocols::ComparisonParams Compare(const Options& o) {
  protocols::ComparisonParams p;
  p.l = o.compare_bits;
  p.kappa = o.kappa;
  return p;
}

scenarios::KeySizes Sizes(const Options& o) {
  scenarios::KeySizes s;
  s.additive_bits = o.additive_bits;
  s.comparison_bits = o.comparison_bits;
  return s;
}

jointbayes::Model LoadModelWithThreshold(const Options& o) {
  if (o.model.empty()) throw UsageError("--model is required");
  jointbayes::Model model = jointbayes::LoadModel(o.model);
  if (o.threshold) model.verifier.threshold = *o.threshold;
  return model;
}

int RunKeygen(const Options& o, const CLI::Option* seed_opt, std::ostream& out) {
  if (o.out.empty()) throw UsageError("--out is required");
  Rng rng = Rng::ForSession(SeedOpt(seed_opt, o.seed), "keygen");
  if (o.role == "server") {
    scenarios::SaveServerKeys(o.out, scenarios::GenerateServerKeys(rng, Sizes(o)));
  } else {
    const ScenarioId s = scenarios::ParseScenario(o.scenario);
    scenarios::SaveClientKeys(o.out, scenarios::GenerateClientKeys(s, rng, Sizes(o)));
  }
  out << "wrote " << o.role << " keys to " << o.out << "\n";
  return kExitOk;
}

int RunSynth(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw UsageError("--out is required");
  if (o.d < 1 || o.identities < 1 || o.images < 1) throw UsageError("counts must be at least 1");
  jointbayes::SynthConfig config;
  config.d = o.d;
  config.n_identities = o.identities;
  config.images_per_identity = o.images;
  config.s_mu = ParseCovSpec(o.mu_spec);
  config.s_eps = ParseCovSpec(o.eps_spec);
  config.seed = o.seed;
  const jointbayes::SynthData data = jointbayes::Synthesize(config);
  jointbayes::WriteFeatureCsv(o.out, data.rows);
  out << "wrote " << data.rows.size() << " rows of dimension " << o.d << " to " << o.out << "\n";
  return kExitOk;
}

int RunTrain(const Options& o, std::ostream& out) {
  if (o.features.empty() || o.out.empty()) throw UsageError("--features and --out are required");
  const auto groups = jointbayes::GroupRows(jointbayes::ReadFeatureCsv(o.features));
  jointbayes::EmConfig config;
  config.max_iters = o.max_iters;
  config.tol = o.tol;
  const jointbayes::EmResult fit = jointbayes::fit_em(groups, config);
  jointbayes::Model model;
  model.params = fit.params;
  model.verifier = jointbayes::derive_verifier(fit.params, o.threshold.value_or(0.0));
  jointbayes::SaveModel(o.out, model);
  out << "trained on " << groups.size() << " identities, d = " << model.params.d() << ", " << fit.iterations
      << " iterations" << (fit.converged ? "" : " (not converged)") << "\n";
  return kExitOk;
}

std::vector<jointbayes::LabeledPair> PairsFromGroups(const std::vector<jointbayes::IdentityGroup>& groups,
                                                     int positives, int negatives, Rng& rng) {
  std::vector<jointbayes::LabeledPair> pairs;
  std::vector<size_t> multi;
  for (size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].m() >= 2) multi.push_back(i);
  }
  if (multi.empty() || groups.size() < 2) Fail(ErrorCode::kDegenerateLabels, "need repeated and distinct identities");
  for (int k = 0; k < positives; ++k) {
    const auto& g = groups[multi[rng.Uniform(multi.size())]];
    const size_t a = rng.Uniform(static_cast<uint64_t>(g.m()));
    size_t b = rng.Uniform(static_cast<uint64_t>(g.m() - 1));
    if (b >= a) ++b;
    pairs.push_back({g.images[a], g.images[b], true});
  }
  for (int k = 0; k < negatives; ++k) {
    const size_t a = rng.Uniform(groups.size());
    size_t b = rng.Uniform(groups.size() - 1);
    if (b >= a) ++b;
    const auto& ga = groups[a];
    const auto& gb = groups[b];
    pairs.push_back({ga.images[rng.Uniform(static_cast<uint64_t>(ga.m()))],
                     gb.images[rng.Uniform(static_cast<uint64_t>(gb.m()))], false});
  }
  return pairs;
}

int RunCalibrate(const Options& o, const CLI::Option* seed_opt, std::ostream& out) {
  jointbayes::Model model = LoadModelWithThreshold(o);
  Rng rng = Rng::ForSession(SeedOpt(seed_opt, o.seed), "calibrate");
  std::vector<jointbayes::LabeledPair> pairs;
  if (!o.features.empty()) {
    pairs = PairsFromGroups(jointbayes::GroupRows(jointbayes::ReadFeatureCsv(o.features)), o.positives, o.negatives,
                            rng);
  } else {
    pairs = jointbayes::SamplePairs(model.params.s_mu, model.params.s_eps, o.positives, o.negatives, rng);
  }
  const jointbayes::Calibration cal = jointbayes::calibrate_threshold(model.verifier, pairs);
  model.verifier.threshold = cal.threshold;
  jointbayes::SaveModel(o.out.empty() ? o.model : o.out, model);
  out << "threshold " << cal.threshold << " accuracy " << cal.accuracy << " on " << pairs.size() << " pairs\n";
  return kExitOk;
}

int RunServe(const Options& o, const CLI::Option* seed_opt, std::ostream& out, std::ostream& err) {
  if (o.keys.empty()) throw UsageError("--keys is required");
  const jointbayes::Model model = LoadModelWithThreshold(o);
  scenarios::ServerConfig config;
  config.scenario = scenarios::ParseScenario(o.scenario);
  config.verifier = encoding::EncodeVerifier(model.verifier, Scales(o));
  config.compare = Compare(o);
  auto db = scenarios::Database::Open(o.db);
  scenarios::Server server(config, scenarios::LoadServerKeys(o.keys), db.get());
  protocols::TcpListener listener(o.host, o.port);
  if (!o.port_file.empty()) {
    std::ofstream f(o.port_file + ".tmp");
    f << listener.port() << "\n";
    f.close();
    if (std::rename((o.port_file + ".tmp").c_str(), o.port_file.c_str()) != 0) {
      Fail(ErrorCode::kIoFailure, "cannot write " + o.port_file);
    }
  }
  out << "serving " << scenarios::ScenarioName(config.scenario) << " on " << o.host << ":" << listener.port()
      << std::endl;
  Rng rng = Rng::ForSession(SeedOpt(seed_opt, o.seed), "serve");
  std::atomic<bool> stop{false};
  std::mutex log_mu;
  server.Serve(listener, rng, stop, o.max_sessions, [&](const scenarios::SessionOutcome& r) {
    std::lock_guard<std::mutex> lock(log_mu);
    switch (r.kind) {
      case scenarios::SessionOutcome::Kind::kRegistered:
        out << "registered index " << r.index << std::endl;
        break;
      case scenarios::SessionOutcome::Kind::kVerified:
        out << "verified index " << r.index << ": " << (r.granted ? "granted" : "denied") << std::endl;
        break;
      case scenarios::SessionOutcome::Kind::kFailed:
        err << "session failed: " << ErrorCodeName(r.error_code) << ": " << r.error << std::endl;
        break;
    }
  });
  return kExitOk;
}

scenarios::ClientKeys LoadClient(const Options& o) {
  if (o.keys.empty()) throw UsageError("--keys is required");
  if (o.features.empty()) throw UsageError("--features is required");
  return scenarios::LoadClientKeys(o.keys);
}

int RunRegister(const Options& o, const CLI::Option* seed_opt, std::ostream& out) {
  if (o.card.empty()) throw UsageError("--card is required");
  const scenarios::ClientKeys keys = LoadClient(o);
  const Vector x = SelectRow(o.features, o.row);
  Rng rng = Rng::ForSession(SeedOpt(seed_opt, o.seed), "register");
  try {
    auto ch = protocols::ConnectTcp(o.host, o.port);
    const scenarios::RegistrationResult res = scenarios::RegisterClient(*ch, keys, x, rng);
    scenarios::SaveIdCard(o.card, res.card);
  } catch (const Error& e) {
    out << "ERROR " << e.message() << "\n";
    return kExitAbort;
  }
  out << "REGISTERED\n";
  return kExitOk;
}

int RunVerify(const Options& o, const CLI::Option* seed_opt, std::ostream& out) {
  if (o.card.empty()) throw UsageError("--card is required");
  scenarios::ClientKeys keys = LoadClient(o);
  const scenarios::IdCard card = scenarios::LoadIdCard(o.card);
  const Vector y = SelectRow(o.features, o.row);
  Rng rng = Rng::ForSession(SeedOpt(seed_opt, o.seed), "verify");
  if (keys.scenario == ScenarioId::kS1Plaintext) keys.compare = scenarios::GenerateEphemeralKeys(rng, Sizes(o));
  scenarios::AccessDecision decision;
  try {
    auto ch = protocols::ConnectTcp(o.host, o.port);
    decision = scenarios::VerifyClient(*ch, keys, card, y, rng);
  } catch (const Error& e) {
    out << "ERROR " << e.message() << "\n";
    return kExitAbort;
  }
  out << (decision.granted ? "GRANTED" : "DENIED") << "\n";
  return decision.granted ? kExitOk : kExitDenied;
}

std::vector<ScenarioId> ParseScenarioList(const std::string& text) {
  std::vector<ScenarioId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(scenarios::ParseScenario(item));
  }
  if (out.empty()) throw UsageError("--scenarios is empty");
  return out;
}

int RunBenchCommand(const Options& o, const CLI::Option* seed_opt, std::ostream& out, std::ostream& err) {
  BenchConfig config;
  config.scenarios = ParseScenarioList(o.scenario_list);
  config.runs = o.runs;
  if (config.runs < 5) throw UsageError("--runs must be at least 5");
  config.sizes = Sizes(o);
  config.scales = Scales(o);
  config.compare = Compare(o);
  config.in_process = o.in_process;
  config.seed = o.seed;
  (void)seed_opt;
  jointbayes::Model model;
  if (!o.model.empty()) {
    model = LoadModelWithThreshold(o);
  } else {
    err << "training a model on synthetic data (d = " << o.d << ")\n";
    jointbayes::SynthConfig synth;
    synth.d = o.d;
    synth.n_identities = o.identities;
    synth.images_per_identity = o.images;
    synth.s_mu = ParseCovSpec(o.mu_spec);
    synth.s_eps = ParseCovSpec(o.eps_spec);
    synth.seed = o.seed;
    const auto data = jointbayes::Synthesize(synth);
    const auto fit = jointbayes::fit_em(jointbayes::GroupRows(data.rows));
    model.params = fit.params;
    model.verifier = jointbayes::derive_verifier(fit.params, o.threshold.value_or(0.0));
  }
  const BenchReport report = RunBench(model, config, [&](const std::string& s) { err << s << std::endl; });
  out << FormatBenchTable(report);
  if (!o.json.empty()) {
    std::ofstream f(o.json);
    f << BenchJson(report) << "\n";
    if (!f) Fail(ErrorCode::kIoFailure, "cannot write " + o.json);
  }
  return kExitOk;
}

}  // namespace

std::vector<std::string> ExpandConfig(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::vector<std::string> injected;
  for (size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) Fail(ErrorCode::kParseError, "--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    std::ifstream f(path);
    if (!f) Fail(ErrorCode::kIoFailure, "cannot open config " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      line = Trim(line);
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        Fail(ErrorCode::kParseError, path + ":" + std::to_string(lineno) + ": expected key=value");
      }
      std::string key = Trim(line.substr(0, eq));
      std::string value = Trim(line.substr(eq + 1));
      if (key.rfind("--", 0) == 0) key = key.substr(2);
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      injected.push_back("--" + key + "=" + value);
    }
  }
  // Injected flags go first so explicit flags, parsed later, win.
  if (rest.empty()) return injected;
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> expanded;
  try {
    expanded = ExpandConfig(args);
  } catch (const Error& e) {
    err << "error: " << e.message() << "\n";
    return kExitUsage;
  }

  Options o;
  CLI::App app{"Privacy-preserving face verification"};
  app.name("privver");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<CLI::Option*> seed_opts;
  auto common = [&](CLI::App* sub) {
    seed_opts.push_back(sub->add_option("--seed", o.seed, "RNG seed (honoured in test mode)"));
  };
  auto key_bits = [&](CLI::App* sub) {
    sub->add_option("--additive-bits", o.additive_bits, "Paillier modulus bits")->check(CLI::Range(64, 8192));
    sub->add_option("--comparison-bits", o.comparison_bits, "comparison key modulus bits")
        ->check(CLI::Range(64, 8192));
  };
  auto network = [&](CLI::App* sub) {
    sub->add_option("--host", o.host, "server address");
    sub->add_option("--port", o.port, "server port");
  };
  auto protocol = [&](CLI::App* sub) {
    sub->add_option("--scale-bits", o.scale_bits, "fixed-point fractional bits");
    sub->add_option("--kappa", o.kappa, "statistical blinding bits");
    sub->add_option("--compare-bits", o.compare_bits, "bit length of compared values");
    sub->add_option("--threshold", o.threshold, "override the model threshold");
  };
  auto synth_opts = [&](CLI::App* sub) {
    sub->add_option("--d", o.d, "feature dimension");
    sub->add_option("--identities", o.identities, "number of identities");
    sub->add_option("--images", o.images, "images per identity");
    sub->add_option("--mu-scale", o.mu_spec, "S_mu: <scale> or spd:<scale>[:<seed>]");
    sub->add_option("--eps-scale", o.eps_spec, "S_eps: <scale> or spd:<scale>[:<seed>]");
  };

  CLI::App* keygen = app.add_subcommand("keygen", "generate a key file");
  keygen->add_option("--role", o.role, "server or client")->check(CLI::IsMember({"server", "client"}));
  keygen->add_option("--scenario", o.scenario, "s1, s2 or s3");
  keygen->add_option("--out", o.out, "output key file");
  key_bits(keygen);
  common(keygen);

  CLI::App* synth = app.add_subcommand("synth", "write a synthetic feature CSV");
  synth_opts(synth);
  synth->add_option("--out", o.out, "output CSV");
  common(synth);

  CLI::App* train = app.add_subcommand("train", "fit the model with EM");
  train->add_option("--features", o.features, "training CSV");
  train->add_option("--out", o.out, "output model file");
  train->add_option("--threshold", o.threshold, "decision threshold");
  train->add_option("--max-iters", o.max_iters, "EM iteration cap");
  train->add_option("--tol", o.tol, "EM relative tolerance");

  CLI::App* calibrate = app.add_subcommand("calibrate", "choose the threshold on held-out pairs");
  calibrate->add_option("--model", o.model, "model file");
  calibrate->add_option("--features", o.features, "held-out CSV; pairs are sampled from the model if absent");
  calibrate->add_option("--positives", o.positives, "same-identity pairs");
  calibrate->add_option("--negatives", o.negatives, "different-identity pairs");
  calibrate->add_option("--out", o.out, "output model file (default: overwrite --model)");
  common(calibrate);

  CLI::App* serve = app.add_subcommand("serve", "run the server role");
  serve->add_option("--scenario", o.scenario, "s1, s2 or s3");
  serve->add_option("--model", o.model, "model file");
  serve->add_option("--db", o.db, "registration database file");
  serve->add_option("--keys", o.keys, "server key file");
  serve->add_option("--max-sessions", o.max_sessions, "exit after this many sessions (0: never)");
  serve->add_option("--port-file", o.port_file, "write the bound port here");
  network(serve);
  protocol(serve);
  common(serve);

  CLI::App* reg = app.add_subcommand("register", "enroll a feature vector");
  reg->add_option("--keys", o.keys, "client key file");
  reg->add_option("--features", o.features, "feature CSV");
  reg->add_option("--row", o.row, "row of the CSV to use");
  reg->add_option("--card", o.card, "id card output file");
  network(reg);
  common(reg);

  CLI::App* verify = app.add_subcommand("verify", "request access with an id card");
  verify->add_option("--keys", o.keys, "client key file");
  verify->add_option("--features", o.features, "feature CSV");
  verify->add_option("--row", o.row, "row of the CSV to use");
  verify->add_option("--card", o.card, "id card file");
  key_bits(verify);
  network(verify);
  common(verify);

  CLI::App* bench = app.add_subcommand("bench", "time every scenario");
  bench->add_option("--scenarios", o.scenario_list, "comma-separated scenarios");
  bench->add_option("--runs", o.runs, "runs per scenario (at least 5)");
  bench->add_option("--model", o.model, "model file; a synthetic model is trained if absent");
  bench->add_flag("--in-process", o.in_process, "skip the loopback socket");
  bench->add_option("--json", o.json, "write the report as JSON");
  synth_opts(bench);
  protocol(bench);
  key_bits(bench);
  common(bench);

  std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const CLI::Option* seed_opt = nullptr;
  for (const CLI::Option* opt : seed_opts) {
    if (opt->count() > 0) seed_opt = opt;
  }
  if (seed_opt == nullptr) seed_opt = seed_opts.front();

  try {
    if (*keygen) return RunKeygen(o, seed_opt, out);
    if (*synth) return RunSynth(o, out);
    if (*train) return RunTrain(o, out);
    if (*calibrate) return RunCalibrate(o, seed_opt, out);
    if (*serve) return RunServe(o, seed_opt, out, err);
    if (*reg) return RunRegister(o, seed_opt, out);
    if (*verify) return RunVerify(o, seed_opt, out);
    if (*bench) return RunBenchCommand(o, seed_opt, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kProtocolAbort ? kExitAbort : kExitUsage;
  }
  return kExitUsage;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace privver::cli
