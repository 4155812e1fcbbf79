#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "sfeec/spai.hpp"

namespace sfeec {

const char* pattern_name(PatternKind k) {
  switch (k) {
    case PatternKind::Diagonal: return "diagonal";
    case PatternKind::M1: return "m1";
    case PatternKind::M1Squared: return "m1sq";
    case PatternKind::Dense: return "dense";
    case PatternKind::Custom: return "custom";
  }
  return "?";
}

PatternKind pattern_from_name(const std::string& s) {
  if (s == "diagonal") return PatternKind::Diagonal;
  if (s == "m1") return PatternKind::M1;
  if (s == "m1sq") return PatternKind::M1Squared;
  if (s == "dense") return PatternKind::Dense;
  throw InvalidParameter("unknown pattern: " + s);
}

SparsityPattern make_pattern(const SparseOperator& m, PatternKind kind) {
  if (m.rows != m.cols) throw InvalidParameter("make_pattern: square operator");
  const int n = m.rows;
  SparsityPattern p;
  p.n = n;
  p.kind = kind;
  p.cols.resize((size_t)n);
  switch (kind) {
    case PatternKind::Diagonal:
      for (int i = 0; i < n; ++i) p.cols[(size_t)i] = {i};
      break;
    case PatternKind::M1:
      for (int i = 0; i < n; ++i) {
        auto cs = m.row_cols(i);
        p.cols[(size_t)i].assign(cs.begin(), cs.end());
      }
      break;
    case PatternKind::M1Squared: {
#pragma omp parallel for schedule(static)
      for (int i = 0; i < n; ++i) {
        std::vector<int> acc;
        for (int j : m.row_cols(i)) {
          auto cs = m.row_cols(j);
          acc.insert(acc.end(), cs.begin(), cs.end());
        }
        std::sort(acc.begin(), acc.end());
        acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
        p.cols[(size_t)i] = std::move(acc);
      }
      break;
    }
    case PatternKind::Dense:
      for (int i = 0; i < n; ++i) {
        p.cols[(size_t)i].resize((size_t)n);
        std::iota(p.cols[(size_t)i].begin(), p.cols[(size_t)i].end(), 0);
      }
      break;
    case PatternKind::Custom:
      throw InvalidParameter("make_pattern: custom patterns are user-supplied");
  }
  return p;
}

namespace {

// numeric sparse product S = M * M with deterministic per-row accumulation
SparseOperator sparse_square(const SparseOperator& m) {
  const int n = m.rows;
  std::vector<std::vector<int>> cols((size_t)n);
  std::vector<std::vector<double>> vals((size_t)n);
#pragma omp parallel
  {
    std::vector<double> scratch((size_t)n, 0.0);
    std::vector<int> touched;
#pragma omp for schedule(static)
    for (int i = 0; i < n; ++i) {
      touched.clear();
      auto ci = m.row_cols(i);
      auto vi = m.row_vals(i);
      for (size_t k = 0; k < ci.size(); ++k) {
        int j = ci[k];
        double w = vi[k];
        auto cj = m.row_cols(j);
        auto vj = m.row_vals(j);
        for (size_t l = 0; l < cj.size(); ++l) {
          if (scratch[(size_t)cj[l]] == 0.0 &&
              std::find(touched.begin(), touched.end(), cj[l]) == touched.end())
            touched.push_back(cj[l]);
          scratch[(size_t)cj[l]] += w * vj[l];
        }
      }
      std::sort(touched.begin(), touched.end());
      for (int c : touched) {
        cols[(size_t)i].push_back(c);
        vals[(size_t)i].push_back(scratch[(size_t)c]);
        scratch[(size_t)c] = 0.0;
      }
    }
  }
  SparseOperator s;
  s.rows = s.cols = n;
  s.row_ptr.assign((size_t)n + 1, 0);
  for (int i = 0; i < n; ++i)
    s.row_ptr[(size_t)i + 1] = s.row_ptr[(size_t)i] + (int)cols[(size_t)i].size();
  s.col_idx.reserve((size_t)s.row_ptr[(size_t)n]);
  s.val.reserve((size_t)s.row_ptr[(size_t)n]);
  for (int i = 0; i < n; ++i) {
    s.col_idx.insert(s.col_idx.end(), cols[(size_t)i].begin(), cols[(size_t)i].end());
    s.val.insert(s.val.end(), vals[(size_t)i].begin(), vals[(size_t)i].end());
  }
  s.symmetric = m.symmetric;
  return s;
}

}  // namespace

std::pair<SparseOperator, SpaiReport> spai_approximate_inverse(
    const SparseOperator& m, const SparsityPattern& pattern,
    const SpaiOptions& opts) {
  if (m.rows != m.cols) throw InvalidParameter("spai: square operator required");
  if (!m.symmetric)
    throw InvalidParameter("spai: symmetric positive definite operator required");
  const int n = m.rows;
  if (pattern.n != n) throw InvalidParameter("spai: pattern dimension mismatch");
  for (const auto& c : pattern.cols)
    if (c.empty()) throw InvalidParameter("spai: empty pattern column");

  auto t0 = std::chrono::steady_clock::now();

  // Gram(a, b) = (M^T M)(I_a, I_b) = (M^2)(I_a, I_b) for symmetric M
  const SparseOperator m2 = sparse_square(m);

  std::vector<std::vector<double>> colvals((size_t)n);
  std::vector<double> col_res2((size_t)n, 0.0);
  std::vector<char> fallback((size_t)n, 0);

  const double eig_cut = 1e-12;

  if (pattern.kind == PatternKind::Dense) {
    // one shared Gram factorization serves every column
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      auto cs = m2.row_cols(i);
      auto vs = m2.row_vals(i);
      for (size_t k = 0; k < cs.size(); ++k) gram(i, cs[k]) = vs[k];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("spai: dense Gram factorization failed");
#pragma omp parallel for schedule(static) if (opts.exec == Exec::Parallel)
    for (int l = 0; l < n; ++l) {
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
      auto cs = m.row_cols(l);
      auto vs = m.row_vals(l);
      for (size_t k = 0; k < cs.size(); ++k) rhs(cs[k]) = vs[k];
      Eigen::VectorXd q = llt.solve(rhs);
      colvals[(size_t)l].assign(q.data(), q.data() + n);
      std::vector<double> mq((size_t)n);
      spmv_serial(m, q.data(), mq.data());
      mq[(size_t)l] -= 1.0;
      double r2 = 0;
      for (double v : mq) r2 += v * v;
      col_res2[(size_t)l] = r2;
    }
  } else {
#pragma omp parallel if (opts.exec == Exec::Parallel)
    {
      std::vector<double> resid((size_t)n, 0.0);
      std::vector<int> touched;
#pragma omp for schedule(dynamic, 16)
      for (int l = 0; l < n; ++l) {
        const auto& idx = pattern.cols[(size_t)l];
        const int k = (int)idx.size();
        Eigen::MatrixXd gram(k, k);
        for (int a = 0; a < k; ++a)
          for (int b = a; b < k; ++b) {
            double v = m2.at(idx[(size_t)a], idx[(size_t)b]);
            gram(a, b) = v;
            gram(b, a) = v;
          }
        Eigen::VectorXd rhs(k);
        for (int a = 0; a < k; ++a) rhs(a) = m.at(l, idx[(size_t)a]);

        Eigen::VectorXd q;
        bool solved = false;
        if (opts.use_cg) {
          // plain CG on the (SPD) normal equations
          Eigen::VectorXd x = Eigen::VectorXd::Zero(k), r = rhs, p = rhs;
          double rr = r.squaredNorm(), bb = rr;
          for (int it = 0; it < 4 * k && rr > opts.cg_tol * opts.cg_tol * bb;
               ++it) {
            Eigen::VectorXd ap = gram * p;
            double alpha = rr / p.dot(ap);
            x += alpha * p;
            r -= alpha * ap;
            double rr2 = r.squaredNorm();
            p = r + (rr2 / rr) * p;
            rr = rr2;
          }
          q = x;
          solved = true;
        } else {
          Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
          // rank-deficient Grams (linearly dependent pattern columns) show up
          // as vanished pivots and take the minimum-norm path instead
          if (ldlt.info() == Eigen::Success &&
              ldlt.vectorD().minCoeff() > eig_cut * gram.trace()) {
            q = ldlt.solve(rhs);
            solved = q.allFinite();
          }
        }
        if (!solved) {
          // minimum-norm solution with eigenvalue thresholding
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
          double cut = eig_cut * gram.trace();
          Eigen::VectorXd w = es.eigenvalues();
          Eigen::VectorXd y = es.eigenvectors().transpose() * rhs;
          for (int a = 0; a < k; ++a) y(a) = w(a) > cut ? y(a) / w(a) : 0.0;
          q = es.eigenvectors() * y;
          fallback[(size_t)l] = 1;
        }

        colvals[(size_t)l].assign(q.data(), q.data() + k);

        // true residual || M q - e_l ||^2 via sparse scatter (the Gram-based
        // expression cancels catastrophically near exact solves)
        touched.clear();
        for (int a = 0; a < k; ++a) {
          auto ccs = m.row_cols(idx[(size_t)a]);  // = column for symmetric M
          auto cvs = m.row_vals(idx[(size_t)a]);
          for (size_t t = 0; t < ccs.size(); ++t) {
            if (resid[(size_t)ccs[t]] == 0.0) touched.push_back(ccs[t]);
            resid[(size_t)ccs[t]] += cvs[t] * q(a);
          }
        }
        if (resid[(size_t)l] == 0.0) touched.push_back(l);
        resid[(size_t)l] -= 1.0;
        double r2 = 0;
        for (int t : touched) {
          r2 += resid[(size_t)t] * resid[(size_t)t];
          resid[(size_t)t] = 0.0;
        }
        col_res2[(size_t)l] = r2;
      }
    }
  }

  // assemble Q by rows
  std::vector<Triplet> tri;
  size_t nnz = 0;
  for (const auto& c : pattern.cols) nnz += c.size();
  tri.reserve(nnz);
  for (int l = 0; l < n; ++l) {
    const auto& idx = pattern.cols[(size_t)l];
    for (size_t a = 0; a < idx.size(); ++a)
      tri.push_back({idx[a], l, colvals[(size_t)l][a]});
  }
  SparseOperator q = operator_from_triplets(n, n, std::move(tri));

  SpaiReport rep;
  double fro2 = 0, maxr = 0;
  int nfb = 0;
  for (int l = 0; l < n; ++l) {
    fro2 += col_res2[(size_t)l];
    maxr = std::max(maxr, col_res2[(size_t)l]);
    nfb += fallback[(size_t)l];
  }
  rep.frobenius_residual = std::sqrt(fro2);
  rep.max_column_residual = std::sqrt(maxr);
  rep.avg_nnz_per_row = (double)q.nnz() / (double)n;
  rep.fallback_columns = nfb;
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return {std::move(q), rep};
}

StencilStats stencil_stats(const SparsityPattern& pattern) {
  StencilStats s;
  size_t total = 0;
  for (const auto& c : pattern.cols) {
    total += c.size();
    s.max_nnz_per_row = std::max(s.max_nnz_per_row, (int)c.size());
  }
  s.avg_nnz_per_row = pattern.n ? (double)total / (double)pattern.n : 0.0;
  s.data_volume_ratio_vs_diagonal = s.avg_nnz_per_row;
  return s;
}

}  // namespace sfeec
