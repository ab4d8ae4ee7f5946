#include "ppdispatch/masking.hpp"

#include <cmath>

namespace ppd {

namespace {

Mat sample_conditioned(GaussianSampler& g, int n, const KeyPolicy& policy,
                       const char* label) {
  for (int attempt = 0; attempt < policy.max_attempts; ++attempt) {
    Mat m = g.matrix(n, n);
    if (condition_number(m) <= policy.cond_max) return m;
  }
  throw KeyGenerationFailure(std::string(label) +
                             ": resampling budget exhausted under cond_max");
}

}  // namespace

MaskingKeys generate_keys(int T, std::uint64_t seed, const KeyPolicy& policy) {
  if (T < 1) throw std::invalid_argument("generate_keys: T must be >= 1");
  if (policy.duplication < 1)
    throw std::invalid_argument("generate_keys: duplication must be >= 1");

  GaussianSampler g(seed, policy.mean, policy.variance);
  MaskingKeys k;
  k.seed = seed;
  k.duplication = policy.duplication;
  k.W = sample_conditioned(g, T, policy, "W");
  k.e_diag = Vec(2 * T);
  for (int i = 0; i < 2 * T; ++i)
    k.e_diag(i) = std::max(std::abs(g()), policy.e_floor);
  k.V = sample_conditioned(g, 3 * policy.duplication * T, policy, "V");
  return k;
}

FeasibilityBlocks build_blocks(const CompactBla& c, const MaskingKeys& k) {
  const int T = c.horizon();
  if (k.horizon() != T)
    throw std::invalid_argument("build_blocks: keys and model disagree on T");
  const int q = k.duplication;

  const Mat RW = c.R * k.W;
  Mat D(2 * T, T);
  D.topRows(T) = k.W;
  D.bottomRows(T) = -k.W;
  Vec x_bd(2 * T);
  x_bd.head(T).setConstant(c.x_hi);
  x_bd.tail(T).setConstant(-c.x_lo);

  FeasibilityBlocks b;
  b.T = T;
  b.duplication = q;
  const int rows = 3 * q * T;
  b.F = Mat::Zero(rows, T);
  b.G = Mat::Zero(rows, T);
  b.H = Mat::Zero(rows, 2 * T);
  b.e = Vec::Zero(rows);

  for (int i = 0; i < q; ++i) {
    b.F.middleRows(i * T, T) = RW;
    b.G.middleRows(i * T, T) = -c.S;  // R x - S u = d
    b.e.segment(i * T, T) = c.d;
  }
  const int off = q * T;
  for (int i = 0; i < q; ++i) {
    b.F.middleRows(off + i * 2 * T, 2 * T) = D;
    b.H.middleRows(off + i * 2 * T, 2 * T) = Mat(k.e_diag.asDiagonal());
    b.e.segment(off + i * 2 * T, 2 * T) = x_bd;
  }
  return b;
}

MaskedBla apply_te2(const FeasibilityBlocks& b, const Mat& V,
                    const std::string& id) {
  const int rows = static_cast<int>(b.F.rows());
  if (V.rows() != rows || V.cols() != rows)
    throw std::invalid_argument("apply_te2: V has the wrong dimension");
  if (!(condition_number(V) < 1e14))
    throw std::invalid_argument("apply_te2: V is singular or near-singular");

  MaskedBla m;
  m.id = id;
  m.f1 = V * b.F;
  m.f2 = V * b.G;
  m.f3 = V * b.H;
  m.f4 = V * b.e;
  return m;
}

MaskedBla mask(const CompactBla& c, const MaskingKeys& k, const std::string& id) {
  return apply_te2(build_blocks(c, k), k.V, id);
}

InsecureNoCrt mask_no_crt(const CompactBla& c, const MaskingKeys& k) {
  const int T = c.horizon();
  if (k.horizon() != T)
    throw std::invalid_argument("mask_no_crt: keys and model disagree on T");

  // Fresh masks for this variant, derived from the key seed so runs replay.
  GaussianSampler g(mix_seed(k.seed, 0x637274), 0.1, 0.1);
  KeyPolicy pol;
  Mat V1 = g.matrix(T, T);
  for (int attempt = 0; attempt < pol.max_attempts &&
                        condition_number(V1) > pol.cond_max;
       ++attempt)
    V1 = g.matrix(T, T);
  Vec v2(2 * T);
  for (int i = 0; i < 2 * T; ++i)
    v2(i) = std::max(std::abs(g()), pol.e_floor);  // must stay positive

  Vec x_bd(2 * T);
  x_bd.head(T).setConstant(c.x_hi);
  x_bd.tail(T).setConstant(-c.x_lo);

  InsecureNoCrt out;
  out.b_rw = V1 * (c.R * k.W);
  out.b_s = V1 * -c.S;
  out.b_d = V1 * c.d;
  out.b_bounds = v2.asDiagonal() * x_bd;
  out.b_w = v2.head(T).asDiagonal() * k.W;
  return out;
}

InsecureNoCet mask_no_cet(const CompactBla& c, const MaskingKeys& k,
                          const std::string& id) {
  const int T = c.horizon();
  if (k.horizon() != T)
    throw std::invalid_argument("mask_no_cet: keys and model disagree on T");

  // Single-copy stack masked by a fresh 3T x 3T matrix.
  MaskingKeys single = k;
  single.duplication = 1;
  FeasibilityBlocks b = build_blocks(c, single);

  GaussianSampler g(mix_seed(k.seed, 0x636574), 0.1, 0.1);
  KeyPolicy pol;
  Mat Vp = g.matrix(3 * T, 3 * T);
  for (int attempt = 0; attempt < pol.max_attempts &&
                        condition_number(Vp) > pol.cond_max;
       ++attempt)
    Vp = g.matrix(3 * T, 3 * T);

  MaskedBla m = apply_te2(b, Vp, id);
  InsecureNoCet out;
  out.id = m.id;
  out.f1 = std::move(m.f1);
  out.f2 = std::move(m.f2);
  out.f3 = std::move(m.f3);
  out.f4 = std::move(m.f4);
  return out;
}

std::variant<InsecureNoCrt, InsecureNoCet> mask_insecure(const CompactBla& c,
                                                         const MaskingKeys& k,
                                                         InsecureVariant variant) {
  switch (variant) {
    case InsecureVariant::NoCrt: return mask_no_crt(c, k);
    case InsecureVariant::NoCet: return mask_no_cet(c, k);
  }
  throw std::invalid_argument("mask_insecure: unknown variant");
}

Vec recover_state(const Vec& x_tilde, const Mat& W) {
  if (W.rows() != W.cols() || W.cols() != x_tilde.size())
    throw std::invalid_argument("recover_state: dimension mismatch");
  return W * x_tilde;
}

FeasibilityReport verify_recovered(const CompactBla& c, const Vec& x,
                                   const Vec& u, double tol) {
  const int T = c.horizon();
  if (x.size() != T || u.size() != T)
    throw std::invalid_argument("verify_recovered: dimension mismatch");

  FeasibilityReport r;
  r.equality_residual = (c.R * x - c.S * u - c.d).cwiseAbs().maxCoeff();
  double bv = 0.0;
  for (int t = 0; t < T; ++t) {
    bv = std::max(bv, x(t) - c.x_hi);
    bv = std::max(bv, c.x_lo - x(t));
  }
  r.bound_violation = std::max(bv, 0.0);
  r.threshold = tol * (1.0 + c.d.cwiseAbs().maxCoeff());
  r.pass = r.equality_residual <= r.threshold && r.bound_violation <= r.threshold;
  return r;
}

}  // namespace ppd
