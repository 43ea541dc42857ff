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

#include "privver/he/bfv.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "privver/common/error.h"

namespace privver::bfv {

using he::FindNttPrimes;
using he::IsPrime;
using he::LargestPrimeBelow;

namespace {

// Tail factor for Gaussian noise bounds: n * 2 * Pr[|N(0,1)| > 8.5] < 2^-40.
constexpr double kTailFactor = 8.5;
// Upper limit on InnerProduct fan-in used to size the auxiliary basis.
constexpr int kMaxTensorFanInBits = 16;
constexpr int kAuxPrimeBits = 62;

// Largest log2(Q) for 128-bit security by ring degree (homomorphic
// encryption standard tables, ternary secrets).
double MaxLogQ(size_t n) {
  switch (n) {
    case 1024: return 27;
    case 2048: return 54;
    case 4096: return 109;
    case 8192: return 218;
    case 16384: return 438;
    case 32768: return 881;
    default: return 0;
  }
}

double Log2(const mpz_class& v) {
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log2(mant) + static_cast<double>(exp);
}

uint64_t MpzMod(const mpz_class& v, uint64_t m) {
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), m);
  return r.get_ui();
}

mpz_class FromU64(uint64_t v) {
  mpz_class out;
  mpz_import(out.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return out;
}

}  // namespace

struct Context::Impl {
  // Encoding.
  std::vector<uint64_t> delta_mod_q;

  // Q -> P conversion.
  std::vector<MulConst> qhat_inv_mod_q;
  std::vector<std::vector<uint64_t>> qhat_mod_p;  // [j][i]
  std::vector<uint64_t> q_mod_p;
  std::vector<long double> inv_q;

  // P -> Q conversion.
  std::vector<MulConst> phat_inv_mod_p;
  std::vector<std::vector<uint64_t>> phat_mod_q;  // [i][j]
  std::vector<uint64_t> p_mod_q;
  std::vector<long double> inv_p;

  // Scaling by t/Q from the QP basis.
  std::vector<MulConst> qphat_inv_mod_q;
  std::vector<std::vector<uint64_t>> omega_mod_p;  // [j][i]
  std::vector<long double> theta;
  std::vector<MulConst> t_qinv_mod_p;

  // Decryption.
  std::vector<mpz_class> qhat;
  std::vector<uint64_t> t_mod_q;
};

Context::~Context() = default;

Context::Context(size_t n, std::vector<uint64_t> q_primes, uint64_t t, double sigma)
    : n_(n), t_(t), sigma_(sigma), impl_(std::make_unique<Impl>()) {
  if (MaxLogQ(n) == 0) Fail(ErrorCode::kBadParams, "ring degree must be a power of two in [1024, 32768]");
  if (q_primes.empty()) Fail(ErrorCode::kBadParams, "need at least one ciphertext prime");
  if (t < 2 || t >= (uint64_t{1} << 62)) Fail(ErrorCode::kBadParams, "plaintext modulus out of range");
  if (!(sigma > 0 && sigma < 100)) Fail(ErrorCode::kBadParams, "error deviation out of range");
  big_q_ = 1;
  for (uint64_t p : q_primes) {
    if (!IsPrime(p) || (p - 1) % (2 * n) != 0) {
      Fail(ErrorCode::kBadParams, "ciphertext moduli must be NTT-friendly primes");
    }
    if (std::count(q_primes.begin(), q_primes.end(), p) != 1) {
      Fail(ErrorCode::kBadParams, "ciphertext primes must be distinct");
    }
    if (p == t) Fail(ErrorCode::kBadParams, "plaintext modulus equals a ciphertext prime");
    q_.emplace_back(p);
    q_ntt_.emplace_back(n, q_.back());
    big_q_ *= FromU64(p);
  }
  double log_q = Log2(big_q_);
  if (log_q > MaxLogQ(n)) {
    Fail(ErrorCode::kBadParams, "log2(Q) = " + std::to_string(log_q) +
                                    " exceeds the 128-bit security bound for n = " +
                                    std::to_string(n));
  }
  if (big_q_ <= FromU64(t)) Fail(ErrorCode::kBadParams, "plaintext modulus exceeds Q");

  // P must exceed fan_in * t * n * Q so scaled tensors fit centered in P.
  double need = kMaxTensorFanInBits + std::log2(static_cast<double>(t)) +
                std::log2(static_cast<double>(n)) + log_q + 2;
  size_t p_count = static_cast<size_t>(std::ceil(need / (kAuxPrimeBits - 0.5)));
  for (uint64_t p : FindNttPrimes(kAuxPrimeBits, n, p_count, q_primes)) {
    p_.emplace_back(p);
    p_ntt_.emplace_back(n, p_.back());
  }
  mpz_class big_p = 1;
  for (const Modulus& p : p_) big_p *= FromU64(p.value());

  Impl& im = *impl_;
  const size_t k = q_.size();
  const size_t m = p_.size();
  mpz_class t_big = FromU64(t);
  mpz_class delta = big_q_ / t_big;
  for (size_t i = 0; i < k; ++i) {
    uint64_t qi = q_[i].value();
    im.delta_mod_q.push_back(MpzMod(delta, qi));
    mpz_class qhat = big_q_ / FromU64(qi);
    im.qhat.push_back(qhat);
    im.qhat_inv_mod_q.emplace_back(q_[i].Inverse(MpzMod(qhat, qi)), qi);
    im.inv_q.push_back(1.0L / static_cast<long double>(qi));
    im.t_mod_q.push_back(t % qi);
  }
  im.qhat_mod_p.assign(m, std::vector<uint64_t>(k));
  for (size_t j = 0; j < m; ++j) {
    for (size_t i = 0; i < k; ++i) im.qhat_mod_p[j][i] = MpzMod(im.qhat[i], p_[j].value());
    im.q_mod_p.push_back(MpzMod(big_q_, p_[j].value()));
  }
  for (size_t j = 0; j < m; ++j) {
    uint64_t pj = p_[j].value();
    mpz_class phat = big_p / FromU64(pj);
    im.phat_inv_mod_p.emplace_back(p_[j].Inverse(MpzMod(phat, pj)), pj);
    im.inv_p.push_back(1.0L / static_cast<long double>(pj));
  }
  im.phat_mod_q.assign(k, std::vector<uint64_t>(m));
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < m; ++j) {
      im.phat_mod_q[i][j] = MpzMod(big_p / FromU64(p_[j].value()), q_[i].value());
    }
    im.p_mod_q.push_back(MpzMod(big_p, q_[i].value()));
  }
  mpz_class qp = big_q_ * big_p;
  im.omega_mod_p.assign(m, std::vector<uint64_t>(k));
  for (size_t i = 0; i < k; ++i) {
    uint64_t qi = q_[i].value();
    mpz_class qphat = qp / FromU64(qi);
    im.qphat_inv_mod_q.emplace_back(q_[i].Inverse(MpzMod(qphat, qi)), qi);
    mpz_class num = t_big * big_p;
    mpz_class omega, rem;
    mpz_fdiv_qr_ui(omega.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), qi);
    im.theta.push_back(static_cast<long double>(rem.get_ui()) / static_cast<long double>(qi));
    for (size_t j = 0; j < m; ++j) im.omega_mod_p[j][i] = MpzMod(omega, p_[j].value());
  }
  for (size_t j = 0; j < m; ++j) {
    uint64_t pj = p_[j].value();
    uint64_t q_inv = p_[j].Inverse(MpzMod(big_q_, pj));
    im.t_qinv_mod_p.emplace_back(p_[j].Mul(t % pj, q_inv), pj);
  }
}

std::shared_ptr<const Context> Context::Create(const Params& params) {
  if (params.q_bits.empty()) Fail(ErrorCode::kBadParams, "need at least one ciphertext prime");
  std::vector<uint64_t> primes;
  for (int bits : params.q_bits) {
    if (bits < 30 || bits > 60) Fail(ErrorCode::kBadParams, "ciphertext primes must be 30..60 bits");
    auto found = FindNttPrimes(bits, params.n, 1, primes);
    primes.push_back(found.front());
  }
  uint64_t t = params.t != 0 ? params.t : LargestPrimeBelow(51);
  return std::make_shared<const Context>(params.n, std::move(primes), t, params.sigma);
}

std::shared_ptr<const Context> Context::FromPrimes(size_t n, std::vector<uint64_t> q_primes,
                                                   uint64_t t, double sigma) {
  return std::make_shared<const Context>(n, std::move(q_primes), t, sigma);
}

std::vector<uint64_t> Context::q_primes() const {
  std::vector<uint64_t> out;
  for (const Modulus& q : q_) out.push_back(q.value());
  return out;
}

NoiseEstimate Context::EstimateNoise() const {
  const double n = static_cast<double>(n_);
  const double z = kTailFactor;
  // Fresh: e*u + e2*s + e1 with ternary u, s (variance 2/3).
  double fresh = z * std::sqrt(2.0 * n * (2.0 / 3.0) * sigma_ * sigma_ + sigma_ * sigma_);
  double lin = fresh * std::sqrt(static_cast<double>(kMaxFanIn)) * std::ldexp(1.0, kWeightBits);
  double s_norm = 1.0 + z * std::sqrt(n * 2.0 / 3.0);
  double product = static_cast<double>(t_) * z * std::sqrt(n) * (fresh + lin) * s_norm;
  double q_max = 0;
  for (const Modulus& q : q_) q_max = std::max(q_max, static_cast<double>(q.value()));
  double relin = static_cast<double>(q_.size()) * q_max * std::sqrt(n) * z * sigma_;
  double sum = (product + relin) * std::sqrt(static_cast<double>(kMaxFanIn));
  NoiseEstimate est;
  est.fresh_bits = std::log2(fresh);
  est.product_sum_bits = std::log2(sum);
  est.limit_bits = Log2(big_q_) - std::log2(static_cast<double>(t_)) - 1.0;
  return est;
}

namespace {

size_t Words(const Context& ctx) { return ctx.q_count() * ctx.n(); }

int64_t SampleGaussian(Rng& rng, double sigma) {
  const double bound = 6.0 * sigma;
  while (true) {
    double v = std::nearbyint(rng.Normal(0.0, sigma));
    if (std::abs(v) <= bound) return static_cast<int64_t>(v);
  }
}

std::vector<int64_t> GaussianPoly(Rng& rng, size_t n, double sigma) {
  std::vector<int64_t> out(n);
  for (auto& v : out) v = SampleGaussian(rng, sigma);
  return out;
}

std::vector<int8_t> TernaryPoly(Rng& rng, size_t n) {
  std::vector<int8_t> out(n);
  for (auto& v : out) v = static_cast<int8_t>(static_cast<int>(rng.Uniform(3)) - 1);
  return out;
}

template <typename T>
RnsPoly ToRns(const Context& ctx, const std::vector<T>& small) {
  RnsPoly out(Words(ctx));
  for (size_t i = 0; i < ctx.q_count(); ++i) {
    const Modulus& q = ctx.q()[i];
    for (size_t c = 0; c < ctx.n(); ++c) out[i * ctx.n() + c] = q.FromSigned(small[c]);
  }
  return out;
}

void NttForwardAll(const Context& ctx, RnsPoly& poly) {
  for (size_t i = 0; i < ctx.q_count(); ++i) ctx.q_ntt(i).Forward(poly.data() + i * ctx.n());
}

RnsPoly UniformNtt(const Context& ctx, Rng& rng) {
  RnsPoly out(Words(ctx));
  for (size_t i = 0; i < ctx.q_count(); ++i) {
    uint64_t q = ctx.q()[i].value();
    for (size_t c = 0; c < ctx.n(); ++c) out[i * ctx.n() + c] = rng.Uniform(q);
  }
  return out;
}

// -(a*s + e) in NTT form, with a and s in NTT form and e small.
RnsPoly NegAsPlusE(const Context& ctx, const RnsPoly& a, const RnsPoly& s_ntt,
                   const std::vector<int64_t>& e) {
  RnsPoly e_ntt = ToRns(ctx, e);
  NttForwardAll(ctx, e_ntt);
  RnsPoly out(Words(ctx));
  for (size_t i = 0; i < ctx.q_count(); ++i) {
    const Modulus& q = ctx.q()[i];
    for (size_t c = 0; c < ctx.n(); ++c) {
      size_t idx = i * ctx.n() + c;
      out[idx] = q.Neg(q.Add(q.Mul(a[idx], s_ntt[idx]), e_ntt[idx]));
    }
  }
  return out;
}

void CheckCiphertext(const Context& ctx, const Ciphertext& ct) {
  if (ct.c.size() != 2) Fail(ErrorCode::kParseError, "ciphertext must have two components");
  if (ct.n != ctx.n()) Fail(ErrorCode::kKeyMismatch, "ciphertext ring degree does not match key");
  for (const RnsPoly& p : ct.c) {
    if (p.size() != Words(ctx)) Fail(ErrorCode::kKeyMismatch, "ciphertext shape does not match key");
  }
}

void CheckRange(const Context& ctx, const mpz_class& m) {
  mpz_class t = FromU64(ctx.t());
  if (abs(m) * 2 > t) Fail(ErrorCode::kPlaintextOutOfRange, "plaintext outside (-t/2, t/2]");
}

}  // namespace

SecretKey MakeSecretKey(const ContextPtr& ctx, std::vector<int8_t> s) {
  if (s.size() != ctx->n()) Fail(ErrorCode::kParseError, "secret key length mismatch");
  for (int8_t v : s) {
    if (v < -1 || v > 1) Fail(ErrorCode::kParseError, "secret key must be ternary");
  }
  SecretKey sk;
  sk.ctx = ctx;
  sk.s_ntt = ToRns(*ctx, s);
  NttForwardAll(*ctx, sk.s_ntt);
  sk.s = std::move(s);
  return sk;
}

void KeyGen(const ContextPtr& ctx, Rng& rng, SecretKey* sk, PublicKey* pk) {
  NoiseEstimate est = ctx->EstimateNoise();
  if (est.margin_bits() <= 0) {
    Fail(ErrorCode::kBadParams,
         "parameters do not support depth-1 evaluation: estimated noise 2^" +
             std::to_string(est.product_sum_bits) + " exceeds bound 2^" +
             std::to_string(est.limit_bits));
  }
  *sk = MakeSecretKey(ctx, TernaryPoly(rng, ctx->n()));
  pk->ctx = ctx;
  pk->pk1_ntt = UniformNtt(*ctx, rng);
  pk->pk0_ntt = NegAsPlusE(*ctx, pk->pk1_ntt, sk->s_ntt, GaussianPoly(rng, ctx->n(), ctx->sigma()));
  const size_t n = ctx->n();
  RnsPoly s2(sk->s_ntt.size());
  for (size_t i = 0; i < ctx->q_count(); ++i) {
    const Modulus& q = ctx->q()[i];
    for (size_t c = 0; c < n; ++c) s2[i * n + c] = q.Mul(sk->s_ntt[i * n + c], sk->s_ntt[i * n + c]);
  }
  pk->rlk0_ntt.clear();
  pk->rlk1_ntt.clear();
  for (size_t g = 0; g < ctx->q_count(); ++g) {
    RnsPoly a = UniformNtt(*ctx, rng);
    RnsPoly b = NegAsPlusE(*ctx, a, sk->s_ntt, GaussianPoly(rng, n, ctx->sigma()));
    // Gadget element g is 1 mod q_g and 0 mod the other primes.
    const Modulus& q = ctx->q()[g];
    for (size_t c = 0; c < n; ++c) b[g * n + c] = q.Add(b[g * n + c], s2[g * n + c]);
    pk->rlk0_ntt.push_back(std::move(b));
    pk->rlk1_ntt.push_back(std::move(a));
  }
}

Ciphertext Encrypt(const PublicKey& pk, const mpz_class& m, Rng& rng) {
  const Context& ctx = *pk.ctx;
  CheckRange(ctx, m);
  const size_t n = ctx.n();
  RnsPoly u = ToRns(ctx, TernaryPoly(rng, n));
  NttForwardAll(ctx, u);
  std::vector<int64_t> e1 = GaussianPoly(rng, n, ctx.sigma());
  std::vector<int64_t> e2 = GaussianPoly(rng, n, ctx.sigma());
  Ciphertext ct;
  ct.n = n;
  ct.c.assign(2, RnsPoly(Words(ctx)));
  for (size_t i = 0; i < ctx.q_count(); ++i) {
    const Modulus& q = ctx.q()[i];
    uint64_t* c0 = ct.c[0].data() + i * n;
    uint64_t* c1 = ct.c[1].data() + i * n;
    const uint64_t* ui = u.data() + i * n;
    for (size_t c = 0; c < n; ++c) {
      c0[c] = q.Mul(pk.pk0_ntt[i * n + c], ui[c]);
      c1[c] = q.Mul(pk.pk1_ntt[i * n + c], ui[c]);
    }
    ctx.q_ntt(i).Inverse(c0);
    ctx.q_ntt(i).Inverse(c1);
    for (size_t c = 0; c < n; ++c) {
      c0[c] = q.Add(c0[c], q.FromSigned(e1[c]));
      c1[c] = q.Add(c1[c], q.FromSigned(e2[c]));
    }
    uint64_t dm = q.Mul(ctx.impl().delta_mod_q[i], MpzMod(m, q.value()));
    c0[0] = q.Add(c0[0], dm);
  }
  return ct;
}

namespace {

// round(t * phase / Q) mod t, centered, for one coefficient given by residues.
mpz_class DecodeCoefficient(const Context& ctx, const std::vector<uint64_t>& residues) {
  const auto& im = ctx.impl();
  mpz_class phase = 0;
  for (size_t i = 0; i < ctx.q_count(); ++i) {
    uint64_t y = im.qhat_inv_mod_q[i].Apply(residues[i], ctx.q()[i].value());
    phase += im.qhat[i] * FromU64(y);
  }
  const mpz_class& big_q = ctx.big_q();
  phase %= big_q;
  mpz_class t = FromU64(ctx.t());
  mpz_class num = 2 * t * phase + big_q;
  mpz_class two_q = 2 * big_q;
  mpz_class m;
  mpz_fdiv_q(m.get_mpz_t(), num.get_mpz_t(), two_q.get_mpz_t());
  mpz_fdiv_r(m.get_mpz_t(), m.get_mpz_t(), t.get_mpz_t());
  if (m * 2 > t) m -= t;
  return m;
}

}  // namespace

mpz_class Decrypt(const SecretKey& sk, const Ciphertext& ct) {
  const Context& ctx = *sk.ctx;
  CheckCiphertext(ctx, ct);
  const size_t n = ctx.n();
  std::vector<uint64_t> residues(ctx.q_count());
  for (size_t i = 0; i < ctx.q_count(); ++i) {
    const Modulus& q = ctx.q()[i];
    const uint64_t* c0 = ct.c[0].data() + i * n;
    const uint64_t* c1 = ct.c[1].data() + i * n;
    // Constant term of c1 * s in Z[X]/(X^n + 1): c1_0 s_0 - sum_j c1_j s_{n-j}.
    __int128 acc = static_cast<__int128>(c1[0]) * sk.s[0];
    for (size_t j = 1; j < n; ++j) acc -= static_cast<__int128>(c1[j]) * sk.s[n - j];
    int64_t qv = static_cast<int64_t>(q.value());
    int64_t r = static_cast<int64_t>(acc % qv);
    if (r < 0) r += qv;
    residues[i] = q.Add(c0[0], static_cast<uint64_t>(r));
  }
  return DecodeCoefficient(ctx, residues);
}

NoiseReport InspectNoise(const SecretKey& sk, const Ciphertext& ct) {
  const Context& ctx = *sk.ctx;
  CheckCiphertext(ctx, ct);
  const auto& im = ctx.impl();
  const size_t n = ctx.n();
  const size_t k = ctx.q_count();
  RnsPoly phase = ct.c[1];
  for (size_t i = 0; i < k; ++i) {
    const Modulus& q = ctx.q()[i];
    uint64_t* p = phase.data() + i * n;
    ctx.q_ntt(i).Forward(p);
    for (size_t c = 0; c < n; ++c) p[c] = q.Mul(p[c], sk.s_ntt[i * n + c]);
    ctx.q_ntt(i).Inverse(p);
    const uint64_t* c0 = ct.c[0].data() + i * n;
    for (size_t c = 0; c < n; ++c) p[c] = q.Add(p[c], c0[c]);
  }
  NoiseReport report;
  long double worst = 0;
  const long double t = static_cast<long double>(ctx.t());
  for (size_t c = 0; c < n; ++c) {
    long double coarse = 0;
    long double fine = 0;
    for (size_t i = 0; i < k; ++i) {
      const Modulus& q = ctx.q()[i];
      uint64_t x = phase[i * n + c];
      uint64_t y = im.qhat_inv_mod_q[i].Apply(x, q.value());
      uint64_t yt = q.Mul(y, im.t_mod_q[i]);
      coarse += static_cast<long double>(y) * im.inv_q[i];
      fine += static_cast<long double>(yt) * im.inv_q[i];
    }
    coarse -= std::nearbyint(coarse);  // [phase]_Q / Q
    fine -= std::nearbyint(fine);      // frac(t * phase / Q)
    if (c > 0 && std::nearbyint(coarse * t) != 0) report.constant_message = false;
    worst = std::max(worst, std::abs(fine));
  }
  constexpr double kCap = 55.0;
  report.budget_bits = worst > 0 ? std::min(kCap, -std::log2(static_cast<double>(2 * worst))) : kCap;
  return report;
}

Ciphertext Add(const Context& ctx, const Ciphertext& a, const Ciphertext& b) {
  Ciphertext out = a;
  AddInPlace(ctx, out, b);
  return out;
}

void AddInPlace(const Context& ctx, Ciphertext& acc, const Ciphertext& b) {
  CheckCiphertext(ctx, acc);
  CheckCiphertext(ctx, b);
  const size_t n = ctx.n();
  for (size_t comp = 0; comp < 2; ++comp) {
    for (size_t i = 0; i < ctx.q_count(); ++i) {
      const Modulus& q = ctx.q()[i];
      uint64_t* x = acc.c[comp].data() + i * n;
      const uint64_t* y = b.c[comp].data() + i * n;
      for (size_t c = 0; c < n; ++c) x[c] = q.Add(x[c], y[c]);
    }
  }
}

Ciphertext Negate(const Context& ctx, const Ciphertext& a) {
  CheckCiphertext(ctx, a);
  Ciphertext out = a;
  const size_t n = ctx.n();
  for (size_t comp = 0; comp < 2; ++comp) {
    for (size_t i = 0; i < ctx.q_count(); ++i) {
      const Modulus& q = ctx.q()[i];
      uint64_t* x = out.c[comp].data() + i * n;
      for (size_t c = 0; c < n; ++c) x[c] = q.Neg(x[c]);
    }
  }
  return out;
}

Ciphertext Sub(const Context& ctx, const Ciphertext& a, const Ciphertext& b) {
  return Add(ctx, a, Negate(ctx, b));
}

Ciphertext AddPlain(const Context& ctx, const Ciphertext& a, const mpz_class& m) {
  CheckCiphertext(ctx, a);
  CheckRange(ctx, m);
  Ciphertext out = a;
  for (size_t i = 0; i < ctx.q_count(); ++i) {
    const Modulus& q = ctx.q()[i];
    uint64_t dm = q.Mul(ctx.impl().delta_mod_q[i], MpzMod(m, q.value()));
    uint64_t& c0 = out.c[0][i * ctx.n()];
    c0 = q.Add(c0, dm);
  }
  return out;
}

Ciphertext MulPlain(const Context& ctx, const Ciphertext& a, const mpz_class& k) {
  CheckCiphertext(ctx, a);
  CheckRange(ctx, k);
  Ciphertext out = a;
  const size_t n = ctx.n();
  for (size_t i = 0; i < ctx.q_count(); ++i) {
    const Modulus& q = ctx.q()[i];
    MulConst w(MpzMod(k, q.value()), q.value());
    for (size_t comp = 0; comp < 2; ++comp) {
      uint64_t* x = out.c[comp].data() + i * n;
      for (size_t c = 0; c < n; ++c) x[c] = w.Apply(x[c], q.value());
    }
  }
  return out;
}

Ciphertext LinearCombination(const Context& ctx, std::span<const Ciphertext* const> cts,
                             std::span<const int64_t> weights) {
  if (cts.size() != weights.size() || cts.empty()) {
    Fail(ErrorCode::kDimensionMismatch, "linear combination needs matching non-empty inputs");
  }
  for (const Ciphertext* ct : cts) CheckCiphertext(ctx, *ct);
  for (int64_t w : weights) {
    if (w <= -(int64_t{1} << 31) || w >= (int64_t{1} << 31)) {
      Fail(ErrorCode::kPlaintextOutOfRange, "linear combination weight exceeds 31 bits");
    }
  }
  const size_t n = ctx.n();
  Ciphertext out;
  out.n = n;
  out.c.assign(2, RnsPoly(Words(ctx)));
  std::vector<__int128> acc(n);
  for (size_t comp = 0; comp < 2; ++comp) {
    for (size_t i = 0; i < ctx.q_count(); ++i) {
      std::fill(acc.begin(), acc.end(), 0);
      for (size_t j = 0; j < cts.size(); ++j) {
        const int64_t w = weights[j];
        if (w == 0) continue;
        const uint64_t* x = cts[j]->c[comp].data() + i * n;
        for (size_t c = 0; c < n; ++c) acc[c] += static_cast<__int128>(static_cast<int64_t>(x[c])) * w;
      }
      const __int128 qv = ctx.q()[i].value();
      uint64_t* y = out.c[comp].data() + i * n;
      for (size_t c = 0; c < n; ++c) {
        __int128 r = acc[c] % qv;
        if (r < 0) r += qv;
        y[c] = static_cast<uint64_t>(r);
      }
    }
  }
  return out;
}

namespace detail {

void ConvertQToP(const Context& ctx, const uint64_t* in_q, uint64_t* out_p) {
  const auto& im = ctx.impl();
  const size_t n = ctx.n();
  const size_t k = ctx.q_count();
  const size_t m = ctx.p_count();
  std::vector<uint64_t> y(k);
  for (size_t c = 0; c < n; ++c) {
    long double frac = 0;
    for (size_t i = 0; i < k; ++i) {
      y[i] = im.qhat_inv_mod_q[i].Apply(in_q[i * n + c], ctx.q()[i].value());
      frac += static_cast<long double>(y[i]) * im.inv_q[i];
    }
    // x = sum_i y_i Q/q_i - v Q with v chosen for the centered representative.
    uint64_t v = static_cast<uint64_t>(std::llround(frac));
    for (size_t j = 0; j < m; ++j) {
      const Modulus& p = ctx.p()[j];
      u128 acc = 0;
      for (size_t i = 0; i < k; ++i) acc += static_cast<u128>(y[i]) * im.qhat_mod_p[j][i];
      uint64_t r = p.Reduce(acc);
      out_p[j * n + c] = p.Sub(r, p.Mul(v, im.q_mod_p[j]));
    }
  }
}

namespace {

void ConvertPToQ(const Context& ctx, const uint64_t* in_p, uint64_t* out_q) {
  const auto& im = ctx.impl();
  const size_t n = ctx.n();
  const size_t k = ctx.q_count();
  const size_t m = ctx.p_count();
  std::vector<uint64_t> y(m);
  for (size_t c = 0; c < n; ++c) {
    long double frac = 0;
    for (size_t j = 0; j < m; ++j) {
      y[j] = im.phat_inv_mod_p[j].Apply(in_p[j * n + c], ctx.p()[j].value());
      frac += static_cast<long double>(y[j]) * im.inv_p[j];
    }
    uint64_t v = static_cast<uint64_t>(std::llround(frac));
    for (size_t i = 0; i < k; ++i) {
      const Modulus& q = ctx.q()[i];
      u128 acc = 0;
      for (size_t j = 0; j < m; ++j) acc += static_cast<u128>(y[j]) * im.phat_mod_q[i][j];
      uint64_t r = q.Reduce(acc);
      out_q[i * n + c] = q.Sub(r, q.Mul(v, im.p_mod_q[i]));
    }
  }
}

}  // namespace

void ScaleDown(const Context& ctx, const uint64_t* in_qp, uint64_t* out_q) {
  const auto& im = ctx.impl();
  const size_t n = ctx.n();
  const size_t k = ctx.q_count();
  const size_t m = ctx.p_count();
  std::vector<uint64_t> z(m * n);
  std::vector<uint64_t> y(k);
  for (size_t c = 0; c < n; ++c) {
    long double frac = 0;
    for (size_t i = 0; i < k; ++i) {
      y[i] = im.qphat_inv_mod_q[i].Apply(in_qp[i * n + c], ctx.q()[i].value());
      frac += static_cast<long double>(y[i]) * im.theta[i];
    }
    uint64_t rounded = static_cast<uint64_t>(std::llround(frac));
    for (size_t j = 0; j < m; ++j) {
      const Modulus& p = ctx.p()[j];
      u128 acc = rounded;
      for (size_t i = 0; i < k; ++i) acc += static_cast<u128>(y[i]) * im.omega_mod_p[j][i];
      uint64_t r = p.Reduce(acc);
      uint64_t own = im.t_qinv_mod_p[j].Apply(in_qp[(k + j) * n + c], p.value());
      z[j * n + c] = p.Add(r, own);
    }
  }
  ConvertPToQ(ctx, z.data(), out_q);
}

}  // namespace detail

namespace {

// Lifts a Q-basis polynomial to QP and transforms every residue.
std::vector<uint64_t> LiftToQpNtt(const Context& ctx, const RnsPoly& poly) {
  const size_t n = ctx.n();
  const size_t k = ctx.q_count();
  const size_t m = ctx.p_count();
  std::vector<uint64_t> out((k + m) * n);
  std::copy(poly.begin(), poly.end(), out.begin());
  detail::ConvertQToP(ctx, poly.data(), out.data() + k * n);
  for (size_t i = 0; i < k; ++i) ctx.q_ntt(i).Forward(out.data() + i * n);
  for (size_t j = 0; j < m; ++j) ctx.p_ntt(j).Forward(out.data() + (k + j) * n);
  return out;
}

const Modulus& QpModulus(const Context& ctx, size_t r) {
  return r < ctx.q_count() ? ctx.q()[r] : ctx.p()[r - ctx.q_count()];
}

struct Tensor {
  std::vector<uint64_t> e[3];
};

void AccumulateTensor(const Context& ctx, const Ciphertext& a, const Ciphertext& b, Tensor& t) {
  auto a0 = LiftToQpNtt(ctx, a.c[0]);
  auto a1 = LiftToQpNtt(ctx, a.c[1]);
  auto b0 = LiftToQpNtt(ctx, b.c[0]);
  auto b1 = LiftToQpNtt(ctx, b.c[1]);
  const size_t n = ctx.n();
  const size_t residues = ctx.q_count() + ctx.p_count();
  for (size_t r = 0; r < residues; ++r) {
    const Modulus& q = QpModulus(ctx, r);
    for (size_t c = r * n; c < (r + 1) * n; ++c) {
      t.e[0][c] = q.Add(t.e[0][c], q.Mul(a0[c], b0[c]));
      t.e[1][c] = q.Add(t.e[1][c], q.Reduce(static_cast<u128>(a0[c]) * b1[c] +
                                            static_cast<u128>(a1[c]) * b0[c]));
      t.e[2][c] = q.Add(t.e[2][c], q.Mul(a1[c], b1[c]));
    }
  }
}

Ciphertext FinishTensor(const PublicKey& pk, Tensor& t) {
  const Context& ctx = *pk.ctx;
  const size_t n = ctx.n();
  const size_t k = ctx.q_count();
  const size_t m = ctx.p_count();
  RnsPoly d[3];
  for (int part = 0; part < 3; ++part) {
    for (size_t i = 0; i < k; ++i) ctx.q_ntt(i).Inverse(t.e[part].data() + i * n);
    for (size_t j = 0; j < m; ++j) ctx.p_ntt(j).Inverse(t.e[part].data() + (k + j) * n);
    d[part].resize(k * n);
    detail::ScaleDown(ctx, t.e[part].data(), d[part].data());
  }
  // Relinearize d[2] with the RNS gadget: digit g is d2 mod q_g.
  RnsPoly acc0(k * n, 0), acc1(k * n, 0);
  std::vector<uint64_t> digit(n);
  for (size_t g = 0; g < k; ++g) {
    const uint64_t* src = d[2].data() + g * n;
    for (size_t i = 0; i < k; ++i) {
      const Modulus& q = ctx.q()[i];
      for (size_t c = 0; c < n; ++c) digit[c] = src[c] % q.value();
      ctx.q_ntt(i).Forward(digit.data());
      const uint64_t* r0 = pk.rlk0_ntt[g].data() + i * n;
      const uint64_t* r1 = pk.rlk1_ntt[g].data() + i * n;
      uint64_t* x0 = acc0.data() + i * n;
      uint64_t* x1 = acc1.data() + i * n;
      for (size_t c = 0; c < n; ++c) {
        x0[c] = q.Add(x0[c], q.Mul(digit[c], r0[c]));
        x1[c] = q.Add(x1[c], q.Mul(digit[c], r1[c]));
      }
    }
  }
  Ciphertext out;
  out.n = n;
  out.c.assign(2, RnsPoly(k * n));
  for (size_t i = 0; i < k; ++i) {
    const Modulus& q = ctx.q()[i];
    ctx.q_ntt(i).Inverse(acc0.data() + i * n);
    ctx.q_ntt(i).Inverse(acc1.data() + i * n);
    for (size_t c = i * n; c < (i + 1) * n; ++c) {
      out.c[0][c] = q.Add(d[0][c], acc0[c]);
      out.c[1][c] = q.Add(d[1][c], acc1[c]);
    }
  }
  return out;
}

Tensor EmptyTensor(const Context& ctx) {
  Tensor t;
  for (auto& e : t.e) e.assign((ctx.q_count() + ctx.p_count()) * ctx.n(), 0);
  return t;
}

}  // namespace

Ciphertext Multiply(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  const Ciphertext* lhs[] = {&a};
  const Ciphertext* rhs[] = {&b};
  return InnerProduct(pk, lhs, rhs);
}

Ciphertext InnerProduct(const PublicKey& pk, std::span<const Ciphertext* const> a,
                        std::span<const Ciphertext* const> b) {
  const Context& ctx = *pk.ctx;
  if (a.size() != b.size() || a.empty()) {
    Fail(ErrorCode::kDimensionMismatch, "inner product needs matching non-empty inputs");
  }
  if (a.size() > (size_t{1} << kMaxTensorFanInBits)) {
    Fail(ErrorCode::kBadParams, "inner product fan-in too large");
  }
  Tensor t = EmptyTensor(ctx);
  for (size_t i = 0; i < a.size(); ++i) {
    CheckCiphertext(ctx, *a[i]);
    CheckCiphertext(ctx, *b[i]);
    AccumulateTensor(ctx, *a[i], *b[i], t);
  }
  return FinishTensor(pk, t);
}

Ciphertext Rerandomize(const PublicKey& pk, const Ciphertext& a, Rng& rng) {
  return Add(*pk.ctx, a, Encrypt(pk, 0, rng));
}

}  // namespace privver::bfv
