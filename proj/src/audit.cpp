#include "ppdispatch/audit.hpp"

#include <cmath>

#include "ppdispatch/atdm.hpp"

namespace ppd {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Full: return "full";
    case Scheme::NoCet: return "no_cet";
    case Scheme::NoCrt: return "no_crt";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::UnderDetermined: return "under_determined";
    case Verdict::OverDetermined: return "over_determined";
    case Verdict::Square: return "square";
  }
  return "unknown";
}

CountReport count_inference(int T, int M, Scheme scheme, int duplication) {
  if (T < 1 || M < 1)
    throw std::invalid_argument("count_inference: T and M must be >= 1");
  if (duplication < 1)
    throw std::invalid_argument("count_inference: duplication must be >= 1");

  CountReport r;
  r.scheme = scheme;
  r.T = T;
  r.M = M;
  r.duplication = duplication;
  const long long Tll = T, Mll = M, q = duplication;

  switch (scheme) {
    case Scheme::Full: {
      // Uploads: (3qT x T), (3qT x T), (3qT x 2T), (3qT x 1).
      r.equations = 3 * q * Tll * (4 * Tll + 1);
      // V alone already outnumbers the equations.
      r.unknowns = 9 * q * q * Tll * Tll;
      r.unknown_inventory = {
          {"V", 9 * q * q * Tll * Tll}, {"W", Tll * Tll}, {"E", 2 * Tll},
          {"R(alpha)", Mll},            {"S(beta)", Mll + 1},
          {"d", Tll},                   {"bounds", 2}};
      break;
    }
    case Scheme::NoCet: {
      r.equations = 12 * Tll * Tll + 3 * Tll;
      r.unknowns = 10 * Tll * Tll + 3 * Tll + 2 * Mll + 3;
      r.unknown_inventory = {
          {"V'", 9 * Tll * Tll}, {"W", Tll * Tll}, {"E", 2 * Tll},
          {"R(alpha)", Mll},     {"S(beta)", Mll + 1},
          {"d", Tll},            {"bounds", 2}};
      break;
    }
    case Scheme::NoCrt: {
      r.equations = 3 * Tll * Tll + 3 * Tll;
      r.unknowns = 2 * Tll * Tll + 3 * Tll + 2 * Mll + 3;
      r.unknown_inventory = {
          {"V1", Tll * Tll}, {"V2", 2 * Tll}, {"W", Tll * Tll},
          {"R(alpha)", Mll}, {"S(beta)", Mll + 1},
          {"d", Tll},        {"bounds", 2}};
      break;
    }
  }
  if (r.unknowns > r.equations)
    r.verdict = Verdict::UnderDetermined;
  else if (r.unknowns < r.equations)
    r.verdict = Verdict::OverDetermined;
  else
    r.verdict = Verdict::Square;
  return r;
}

namespace {

// Attacker-side parametrization of the uploaded blocks.
struct Unknowns {
  Mat W;       // T x T
  Vec e_diag;  // 2T
  Vec alpha;   // M
  Vec beta;    // M+1
  Vec d;       // T
  double x_hi = 0.0;
  double x_lo = 0.0;
};

struct BlockSet {
  Mat F, G, H;
  Vec e;
};

BlockSet make_blocks(const Unknowns& u, int T, int q) {
  Mat R = Mat::Identity(T, T);
  for (int m = 1; m <= static_cast<int>(u.alpha.size()) && m <= T; ++m)
    R -= u.alpha(m - 1) * lambda_matrix(m, T);
  Mat S = Mat::Zero(T, T);
  for (int m = 0; m < static_cast<int>(u.beta.size()) && m <= T; ++m)
    S += u.beta(m) * lambda_matrix(m, T);

  const Mat RW = R * u.W;
  Mat D(2 * T, T);
  D.topRows(T) = u.W;
  D.bottomRows(T) = -u.W;
  Vec x_bd(2 * T);
  x_bd.head(T).setConstant(u.x_hi);
  x_bd.tail(T).setConstant(-u.x_lo);

  BlockSet b;
  const int rows = 3 * q * T;
  b.F = Mat::Zero(rows, T);
  b.G = Mat::Zero(rows, T);
  b.H = Mat::Zero(rows, 2 * T);
  b.e = Vec::Zero(rows);
  for (int i = 0; i < q; ++i) {
    b.F.middleRows(i * T, T) = RW;
    b.G.middleRows(i * T, T) = -S;
    b.e.segment(i * T, T) = u.d;
  }
  const int off = q * T;
  for (int i = 0; i < q; ++i) {
    b.F.middleRows(off + i * 2 * T, 2 * T) = D;
    b.H.middleRows(off + i * 2 * T, 2 * T) = Mat(u.e_diag.asDiagonal());
    b.e.segment(off + i * 2 * T, 2 * T) = x_bd;
  }
  return b;
}

double relative_residual(const Mat& V, const BlockSet& b, const Mat& f1,
                         const Mat& f2, const Mat& f3, const Vec& f4) {
  const double num = (V * b.F - f1).squaredNorm() + (V * b.G - f2).squaredNorm() +
                     (V * b.H - f3).squaredNorm() + (V * b.e - f4).squaredNorm();
  const double den = f1.squaredNorm() + f2.squaredNorm() + f3.squaredNorm() +
                     f4.squaredNorm();
  return std::sqrt(num / std::max(den, 1e-300));
}

// min_s ||s A - B||_F / ||B||_F (scale gauge of the weakened variants).
double scale_min_distance(const Mat& a, const Mat& b) {
  const double bb = b.squaredNorm();
  if (bb <= 0.0) return a.norm() > 0 ? 1.0 : 0.0;
  const double aa = a.squaredNorm();
  if (aa <= 0.0) return 1.0;
  const double s = (a.array() * b.array()).sum() / aa;
  return (s * a - b).norm() / std::sqrt(bb);
}

AttackReport run_attack(const Mat& f1, const Mat& f2, const Mat& f3, const Vec& f4,
                        int T, int M, int q, int attempts, std::uint64_t seed,
                        const AttackTruth& truth, int max_iters) {
  const int rows = 3 * q * T;
  if (f1.rows() != rows)
    throw std::invalid_argument("empirical_attack: hints do not match block shape");

  AttackReport rep;
  rep.attempts = attempts;
  rep.best_residual = 1e300;

  // Column layout of the linear block step: vec(W), e_diag, beta, d, bounds.
  const int nW = T * T, nE = 2 * T, nB = M + 1, nD = T;
  const int ncols = nW + nE + nB + nD + 2;
  const int block_rows = rows * T + rows * T + rows * 2 * T + rows;

  for (int attempt = 0; attempt < attempts; ++attempt) {
    GaussianSampler g(mix_seed(seed, static_cast<std::uint64_t>(attempt)), 0.1, 0.1);
    Unknowns u;
    u.W = g.matrix(T, T);
    u.e_diag = g.vector(2 * T);
    u.alpha = g.vector(M);
    u.beta = g.vector(M + 1);
    u.d = g.vector(T);
    u.x_hi = g();
    u.x_lo = g();

    Mat V = Mat::Zero(rows, rows);
    double prev = 1e300;
    double resid = 1e300;

    for (int iter = 0; iter < max_iters; ++iter) {
      // V-step: least squares (minimum-norm when underdetermined).
      BlockSet b = make_blocks(u, T, q);
      Mat Mhat(rows, 4 * T + 1);
      Mhat.leftCols(T) = b.F;
      Mhat.middleCols(T, T) = b.G;
      Mhat.middleCols(2 * T, 2 * T) = b.H;
      Mhat.col(4 * T) = b.e;
      Mat Nhat(rows, 4 * T + 1);
      Nhat.leftCols(T) = f1;
      Nhat.middleCols(T, T) = f2;
      Nhat.middleCols(2 * T, 2 * T) = f3;
      Nhat.col(4 * T) = f4;
      Eigen::CompleteOrthogonalDecomposition<Mat> cod(Mhat.transpose());
      V = cod.solve(Nhat.transpose()).transpose();

      // Block step: everything except alpha is linear given V.
      Mat design = Mat::Zero(block_rows, ncols);
      Vec rhs(block_rows);
      {
        Mat R = Mat::Identity(T, T);
        for (int m = 1; m <= M && m <= T; ++m)
          R -= u.alpha(m - 1) * lambda_matrix(m, T);
        // f1 = V * [R W ; ... ; W; -W; ...] column by column of W.
        for (int a = 0; a < T; ++a)
          for (int bcol = 0; bcol < T; ++bcol) {
            Mat Wb = Mat::Zero(T, T);
            Wb(a, bcol) = 1.0;
            const Mat RWb = R * Wb;
            Mat Fb = Mat::Zero(rows, T);
            for (int i = 0; i < q; ++i) Fb.middleRows(i * T, T) = RWb;
            const int off = q * T;
            for (int i = 0; i < q; ++i) {
              Fb.middleRows(off + i * 2 * T, T) = Wb;
              Fb.middleRows(off + i * 2 * T + T, T) = -Wb;
            }
            Mat col = V * Fb;  // rows x T
            design.block(0, a * T + bcol, rows * T, 1) =
                Eigen::Map<Vec>(col.data(), rows * T);
          }
        // f2 = V * G(beta).
        for (int m = 0; m < nB; ++m) {
          Mat Sb = m <= T ? Mat(lambda_matrix(m, T)) : Mat(Mat::Zero(T, T));
          Mat Gb = Mat::Zero(rows, T);
          for (int i = 0; i < q; ++i) Gb.middleRows(i * T, T) = -Sb;
          Mat col = V * Gb;
          design.block(rows * T, nW + nE + m, rows * T, 1) =
              Eigen::Map<Vec>(col.data(), rows * T);
        }
        // f3 = V * H(e_diag).
        for (int ei = 0; ei < nE; ++ei) {
          Mat Hb = Mat::Zero(rows, 2 * T);
          const int off = q * T;
          for (int i = 0; i < q; ++i) Hb(off + i * 2 * T + ei, ei) = 1.0;
          Mat col = V * Hb;
          design.block(2 * rows * T, nW + ei, rows * 2 * T, 1) =
              Eigen::Map<Vec>(col.data(), rows * 2 * T);
        }
        // f4 = V * e(d, bounds).
        for (int t = 0; t < T; ++t) {
          Vec eb = Vec::Zero(rows);
          for (int i = 0; i < q; ++i) eb(i * T + t) = 1.0;
          design.block(2 * rows * T + rows * 2 * T, nW + nE + nB + t, rows, 1) =
              V * eb;
        }
        {
          Vec ehi = Vec::Zero(rows), elo = Vec::Zero(rows);
          const int off = q * T;
          for (int i = 0; i < q; ++i) {
            ehi.segment(off + i * 2 * T, T).setConstant(1.0);
            elo.segment(off + i * 2 * T + T, T).setConstant(-1.0);
          }
          design.block(2 * rows * T + rows * 2 * T, ncols - 2, rows, 1) = V * ehi;
          design.block(2 * rows * T + rows * 2 * T, ncols - 1, rows, 1) = V * elo;
        }
        rhs.segment(0, rows * T) = Eigen::Map<const Vec>(f1.data(), rows * T);
        rhs.segment(rows * T, rows * T) = Eigen::Map<const Vec>(f2.data(), rows * T);
        rhs.segment(2 * rows * T, rows * 2 * T) =
            Eigen::Map<const Vec>(f3.data(), rows * 2 * T);
        rhs.tail(rows) = f4;
      }
      Vec theta = design.colPivHouseholderQr().solve(rhs);
      u.W = Eigen::Map<Mat>(theta.data(), T, T).transpose();
      u.e_diag = theta.segment(nW, nE);
      u.beta = theta.segment(nW + nE, nB);
      u.d = theta.segment(nW + nE + nB, nD);
      u.x_hi = theta(ncols - 2);
      u.x_lo = theta(ncols - 1);

      // Alpha step: linear given V and W, driven by the f1 block alone.
      {
        Mat base = Mat::Zero(rows, T);
        for (int i = 0; i < q; ++i) base.middleRows(i * T, T) = u.W;
        const int off = q * T;
        for (int i = 0; i < q; ++i) {
          base.middleRows(off + i * 2 * T, T) = u.W;
          base.middleRows(off + i * 2 * T + T, T) = -u.W;
        }
        Mat resid_mat = f1 - V * base;
        Mat adesign(rows * T, M);
        for (int m = 1; m <= M; ++m) {
          Mat Fm = Mat::Zero(rows, T);
          const Mat LW = (m <= T ? Mat(lambda_matrix(m, T) * u.W) : Mat(Mat::Zero(T, T)));
          for (int i = 0; i < q; ++i) Fm.middleRows(i * T, T) = -LW;
          Mat col = V * Fm;
          adesign.col(m - 1) = Eigen::Map<Vec>(col.data(), rows * T);
        }
        Vec r = Eigen::Map<Vec>(resid_mat.data(), rows * T);
        u.alpha = adesign.colPivHouseholderQr().solve(r);
      }

      BlockSet bb = make_blocks(u, T, q);
      resid = relative_residual(V, bb, f1, f2, f3, f4);
      if (resid < 1e-12 || std::abs(prev - resid) < 1e-13 * (1.0 + resid)) break;
      prev = resid;
    }

    // Recovery metrics for this attempt.
    AttackAttempt at;
    at.residual = resid;
    Mat Rhat = Mat::Identity(T, T);
    for (int m = 1; m <= M && m <= T; ++m)
      Rhat -= u.alpha(m - 1) * lambda_matrix(m, T);
    Mat Shat = Mat::Zero(T, T);
    for (int m = 0; m <= M && m <= T; ++m) Shat += u.beta(m) * lambda_matrix(m, T);
    at.err_R = (Rhat - truth.R).norm() / truth.R.norm();
    at.err_S = scale_min_distance(Shat, truth.S);
    at.err_d = scale_min_distance(Mat(u.d), Mat(truth.d));
    rep.per_attempt.push_back(at);

    const bool fits = at.residual <= 1e-6;
    if (fits) {
      ++rep.fit_count;
      if (at.err_R <= 0.01) ++rep.success_R_count;
      if (at.err_S <= 0.01) ++rep.success_S_count;
      if (at.err_R <= 0.01 && at.err_S <= 0.01 && at.err_d <= 0.01)
        rep.success = true;
    }
    if (at.residual < rep.best_residual) {
      rep.best_residual = at.residual;
      rep.err_R = at.err_R;
      rep.err_S = at.err_S;
      rep.err_d = at.err_d;
    }
  }
  return rep;
}

}  // namespace

AttackReport empirical_attack(const MaskedBla& m, int T, int M, int duplication,
                              int attempts, std::uint64_t seed,
                              const AttackTruth& truth, int max_iters) {
  return run_attack(m.f1, m.f2, m.f3, m.f4, T, M, duplication, attempts, seed,
                    truth, max_iters);
}

AttackReport empirical_attack(const InsecureNoCet& m, int T, int M, int attempts,
                              std::uint64_t seed, const AttackTruth& truth,
                              int max_iters) {
  return run_attack(m.f1, m.f2, m.f3, m.f4, T, M, 1, attempts, seed, truth,
                    max_iters);
}

MaskingDistance masking_distance(const Mat& original, const Mat& masked) {
  if (original.cols() != masked.cols())
    throw std::invalid_argument("masking_distance: column counts differ");
  MaskingDistance d;
  d.max_abs_correlation = max_row_correlation(original, masked);
  d.orig_min = original.minCoeff();
  d.orig_max = original.maxCoeff();
  d.masked_min = masked.minCoeff();
  d.masked_max = masked.maxCoeff();
  return d;
}

}  // namespace ppd
