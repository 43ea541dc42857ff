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

#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "privver/common/rng.h"
#include "privver/he/he.h"
#include "privver/kernels/kernels.h"

namespace privver {
namespace {

struct Fixture {
  he::KeyPair keys;
  std::vector<mpz_class> values;
  std::vector<he::Ciphertext> cts;
  kernels::IntMatrix m;
};

// One fixture per (scheme, n), built outside the timed region.
const Fixture& GetFixture(he::SchemeId scheme, size_t n) {
  static std::map<std::pair<int, size_t>, Fixture> cache;
  auto key = std::make_pair(static_cast<int>(scheme), n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Fixture f;
  Rng rng = Rng::FromSeed(7, "kernels-bench");
  f.keys = he::keygen(he::SchemeParams::Default(scheme), rng);
  for (size_t i = 0; i < n; ++i) f.values.push_back(static_cast<long>(rng.Uniform(2001)) - 1000);
  f.cts = kernels::serial::EncryptBatch(f.keys.pub, f.values, 8, rng);
  f.m.rows = n;
  f.m.cols = n;
  for (size_t i = 0; i < n * n; ++i) f.m.values.push_back(static_cast<int64_t>(rng.Uniform(511)) - 255);
  return cache.emplace(key, std::move(f)).first->second;
}

template <bool kParallel>
void BM_Encrypt(benchmark::State& state) {
  const auto scheme = static_cast<he::SchemeId>(state.range(0));
  const Fixture& f = GetFixture(scheme, static_cast<size_t>(state.range(1)));
  Rng rng = Rng::FromSeed(1);
  for (auto _ : state) {
    auto out = kParallel ? kernels::parallel::EncryptBatch(f.keys.pub, f.values, 8, rng)
                         : kernels::serial::EncryptBatch(f.keys.pub, f.values, 8, rng);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

template <bool kParallel>
void BM_Decrypt(benchmark::State& state) {
  const auto scheme = static_cast<he::SchemeId>(state.range(0));
  const Fixture& f = GetFixture(scheme, static_cast<size_t>(state.range(1)));
  for (auto _ : state) {
    auto out = kParallel ? kernels::parallel::DecryptBatch(f.keys.sec, f.cts)
                         : kernels::serial::DecryptBatch(f.keys.sec, f.cts);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

template <bool kParallel>
void BM_MatVec(benchmark::State& state) {
  const auto scheme = static_cast<he::SchemeId>(state.range(0));
  const Fixture& f = GetFixture(scheme, static_cast<size_t>(state.range(1)));
  for (auto _ : state) {
    auto out = kParallel ? kernels::parallel::MatVecPlain(f.keys.pub, f.m, f.cts, 8)
                         : kernels::serial::MatVecPlain(f.keys.pub, f.m, f.cts, 8);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(1) * state.range(1));
}

template <bool kParallel>
void BM_Rerandomize(benchmark::State& state) {
  const auto scheme = static_cast<he::SchemeId>(state.range(0));
  const Fixture& f = GetFixture(scheme, static_cast<size_t>(state.range(1)));
  Rng rng = Rng::FromSeed(2);
  for (auto _ : state) {
    auto out = kParallel ? kernels::parallel::RerandomizeBatch(f.keys.pub, f.cts, rng)
                         : kernels::serial::RerandomizeBatch(f.keys.pub, f.cts, rng);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

constexpr int kAdditive = static_cast<int>(he::SchemeId::kAdditive);
constexpr int kLeveled = static_cast<int>(he::SchemeId::kLeveled);

BENCHMARK(BM_Encrypt<false>)->Args({kAdditive, 32})->Args({kLeveled, 8})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Encrypt<true>)->Args({kAdditive, 32})->Args({kLeveled, 8})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Decrypt<false>)->Args({kAdditive, 32})->Args({kLeveled, 8})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Decrypt<true>)->Args({kAdditive, 32})->Args({kLeveled, 8})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatVec<false>)->Args({kAdditive, 16})->Args({kLeveled, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatVec<true>)->Args({kAdditive, 16})->Args({kLeveled, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rerandomize<false>)->Args({kAdditive, 32})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rerandomize<true>)->Args({kAdditive, 32})->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace privver

BENCHMARK_MAIN();
