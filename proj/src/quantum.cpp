#include "semitoric/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "semitoric/error.hpp"

namespace semitoric {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

long spin_dim(double j, const char* name) {
  const double twice = 2.0 * j;
  if (!(j >= 0.5) || std::abs(twice - std::round(twice)) > 1e-12) {
    std::ostringstream os;
    os << name << " must be a half-integer >= 1/2, got " << j;
    fail(ErrorKind::BadParameter, os.str());
  }
  return std::lround(twice) + 1;
}

// <m+1| S+ |m> for spin j.
double raise(double j, double m) { return std::sqrt(std::max(0.0, j * (j + 1.0) - m * (m + 1.0))); }

SparseMat from_triplets(long n, const Triplets& t) {
  SparseMat A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

struct Grouping {
  std::vector<std::vector<long>> blocks;
  std::vector<double> values;
};

// Groups sorted eigenvalues by gap; gaps in the grey zone are ambiguous.
Grouping group_values(const std::vector<std::pair<double, long>>& sorted, const SpectrumOptions& opt) {
  Grouping g;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double gap = i == 0 ? std::numeric_limits<double>::infinity() : sorted[i].first - sorted[i - 1].first;
    if (gap >= opt.block_gap && gap < opt.ambiguity_gap) {
      std::ostringstream os;
      os << "J eigenvalue gap " << gap << " near " << sorted[i].first << " lies between the block threshold "
         << opt.block_gap << " and " << opt.ambiguity_gap;
      fail(ErrorKind::BlockAmbiguity, os.str());
    }
    if (gap >= opt.block_gap) {
      g.blocks.emplace_back();
      g.values.push_back(0.0);
    }
    g.blocks.back().push_back(sorted[i].second);
    g.values.back() += sorted[i].first;
  }
  // Representative value: mean of the members.
  for (std::size_t b = 0; b < g.blocks.size(); ++b) g.values[b] /= static_cast<double>(g.blocks[b].size());
  return g;
}

bool is_diagonal(const SparseMat& A) {
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it)
      if (it.row() != it.col() && it.value() != 0.0) return false;
  return true;
}

void assemble(JointSpectrum& out, const OperatorPair& pair) {
  for (std::size_t b = 0; b < out.blocks.size(); ++b) {
    const SpectrumBlock& blk = out.blocks[b];
    for (Eigen::Index k = 0; k < blk.lambda2.size(); ++k) {
      if (!blk.kept[static_cast<std::size_t>(k)]) {
        ++out.excluded;
        continue;
      }
      out.points.emplace_back(blk.lambda1, blk.lambda2[k]);
      out.block.push_back(static_cast<int>(b));
    }
  }
  out.hbar = pair.hbar;
}

// Truncation filter on block-local eigenvectors.
std::vector<char> truncation_filter(const OperatorPair& pair, const std::vector<long>& idx, const Mat& V) {
  std::vector<char> kept(static_cast<std::size_t>(V.cols()), 1);
  if (!pair.truncation.active) return kept;
  for (Eigen::Index c = 0; c < V.cols(); ++c) {
    double mass = 0.0;
    for (std::size_t r = 0; r < idx.size(); ++r)
      if (pair.truncation.edge[static_cast<std::size_t>(idx[r])]) mass += V(static_cast<Eigen::Index>(r), c) * V(static_cast<Eigen::Index>(r), c);
    kept[static_cast<std::size_t>(c)] = mass <= pair.truncation.mass_limit;
  }
  return kept;
}

}  // namespace

OperatorPair build_spin_toric(double j) {
  const long n = spin_dim(j, "j");
  OperatorPair p;
  p.model = "spin_toric";
  p.hbar = 1.0 / j;
  p.dims = n;
  Triplets t;
  for (long k = 0; k < n; ++k) t.emplace_back(k, k, p.hbar * (static_cast<double>(k) - j));
  p.J = from_triplets(n, t);
  p.H = p.J;
  return p;
}

OperatorPair build_jaynes_cummings(double j, int n_max) {
  const long ns = spin_dim(j, "j");
  if (n_max < 2) fail(ErrorKind::BadParameter, "n_max must be >= 2");
  OperatorPair p;
  p.model = "jaynes_cummings";
  p.hbar = 1.0 / j;
  const double hb = p.hbar;
  const long nf = n_max + 1;
  p.dims = ns * nf;
  // Basis |n> (x) |m>, index n * ns + (m + j).
  auto index = [ns](long n, long mi) { return n * ns + mi; };
  Triplets tj, th;
  const double coupling = std::sqrt(2.0 * hb) * hb / 4.0;
  for (long n = 0; n < nf; ++n) {
    for (long mi = 0; mi < ns; ++mi) {
      const double m = static_cast<double>(mi) - j;
      tj.emplace_back(index(n, mi), index(n, mi), hb * (static_cast<double>(n) + 0.5) + hb * m);
      // a (x) S+ : |n, m> -> sqrt(n) |n-1, m+1>, plus its transpose.
      if (n > 0 && mi + 1 < ns) {
        const double v = coupling * std::sqrt(static_cast<double>(n)) * raise(j, m);
        th.emplace_back(index(n - 1, mi + 1), index(n, mi), v);
        th.emplace_back(index(n, mi), index(n - 1, mi + 1), v);
      }
    }
  }
  p.J = from_triplets(p.dims, tj);
  p.H = from_triplets(p.dims, th);
  p.truncation.active = true;
  p.truncation.n_max = n_max;
  p.truncation.edge.assign(static_cast<std::size_t>(p.dims), 0);
  for (long n = std::max<long>(0, nf - 2); n < nf; ++n)
    for (long mi = 0; mi < ns; ++mi) p.truncation.edge[static_cast<std::size_t>(index(n, mi))] = 1;
  return p;
}

OperatorPair build_coupled_spins(double j1, double j2, double R1, double R2, double t) {
  if (!(R1 > 0.0 && R2 > R1)) fail(ErrorKind::BadParameter, "coupled spins require R2 > R1 > 0");
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::BadParameter, "coupled spins require t in [0,1]");
  const long n1 = spin_dim(j1, "j1"), n2 = spin_dim(j2, "j2");
  if (std::abs(j1 / R1 - j2 / R2) > 1e-12 * (j1 / R1))
    fail(ErrorKind::BadParameter, "coupled spins require j1/R1 == j2/R2 so that J commutes with H");
  OperatorPair p;
  p.model = "coupled_angular_momenta";
  p.hbar = R1 / j1;
  p.dims = n1 * n2;
  auto index = [n2](long a, long b) { return a * n2 + b; };
  Triplets tj, th;
  for (long ai = 0; ai < n1; ++ai) {
    for (long bi = 0; bi < n2; ++bi) {
      const double a = static_cast<double>(ai) - j1, b = static_cast<double>(bi) - j2;
      const long k = index(ai, bi);
      tj.emplace_back(k, k, R1 * a / j1 + R2 * b / j2);
      th.emplace_back(k, k, (1.0 - t) * a / j1 + t * a * b / (j1 * j2));
      // (S1+ S2- + S1- S2+)/2 couples (a, b) with (a+1, b-1).
      if (ai + 1 < n1 && bi > 0) {
        const double v = t * raise(j1, a) * raise(j2, b - 1.0) / (2.0 * j1 * j2);
        th.emplace_back(index(ai + 1, bi - 1), k, v);
        th.emplace_back(k, index(ai + 1, bi - 1), v);
      }
    }
  }
  p.J = from_triplets(p.dims, tj);
  p.H = from_triplets(p.dims, th);
  return p;
}

OperatorPair build_coupled_spins_for(double j, double R1, double R2, double t) {
  return build_coupled_spins(R1 * j, R2 * j, R1, R2, t);
}

double hermiticity_defect(const SparseMat& A) {
  const SparseMat D = A - SparseMat(A.transpose());
  return D.norm();
}

double relative_commutator(const OperatorPair& pair) {
  const SparseMat C = pair.J * pair.H - pair.H * pair.J;
  const double scale = pair.J.norm() * pair.H.norm();
  return scale > 0 ? C.norm() / scale : C.norm();
}

JointSpectrum joint_spectrum(const OperatorPair& pair, const SpectrumOptions& options) {
  if (!is_diagonal(pair.J)) return joint_spectrum_reference(pair, options);
  const Vec d = Vec(pair.J.diagonal());
  std::vector<std::pair<double, long>> sorted;
  sorted.reserve(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) sorted.emplace_back(d[i], static_cast<long>(i));
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const Grouping g = group_values(sorted, options);

  // Dense row-major copy of H restricted to rows; columns are gathered per block.
  const Eigen::SparseMatrix<double, Eigen::RowMajor> Hr = pair.H;
  JointSpectrum out;
  out.blocks.resize(g.blocks.size());
  for_each_index(g.blocks.size(), options.exec, [&](std::size_t b) {
    SpectrumBlock& blk = out.blocks[b];
    blk.lambda1 = g.values[b];
    blk.indices = g.blocks[b];
    std::sort(blk.indices.begin(), blk.indices.end());
    const Eigen::Index n = static_cast<Eigen::Index>(blk.indices.size());
    Mat Hb = Mat::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (decltype(Hr)::InnerIterator it(Hr, blk.indices[static_cast<std::size_t>(r)]); it; ++it) {
        const auto pos = std::lower_bound(blk.indices.begin(), blk.indices.end(), static_cast<long>(it.col()));
        if (pos != blk.indices.end() && *pos == it.col()) Hb(r, pos - blk.indices.begin()) = it.value();
      }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(Hb);
    blk.lambda2 = es.eigenvalues();
    blk.kept = truncation_filter(pair, blk.indices, es.eigenvectors());
    if (options.keep_vectors) blk.vectors = es.eigenvectors();
  });
  assemble(out, pair);
  return out;
}

JointSpectrum joint_spectrum_reference(const OperatorPair& pair, const SpectrumOptions& options) {
  const Mat Jd = Mat(pair.J), Hd = Mat(pair.H);
  Eigen::SelfAdjointEigenSolver<Mat> ej(Jd);
  const Vec ev = ej.eigenvalues();
  std::vector<std::pair<double, long>> sorted;
  for (Eigen::Index i = 0; i < ev.size(); ++i) sorted.emplace_back(ev[i], static_cast<long>(i));
  const Grouping g = group_values(sorted, options);
  JointSpectrum out;
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    SpectrumBlock blk;
    blk.lambda1 = g.values[b];
    const Eigen::Index n = static_cast<Eigen::Index>(g.blocks[b].size());
    Mat V(Jd.rows(), n);
    for (Eigen::Index c = 0; c < n; ++c) V.col(c) = ej.eigenvectors().col(g.blocks[b][static_cast<std::size_t>(c)]);
    Eigen::SelfAdjointEigenSolver<Mat> eh(V.transpose() * Hd * V);
    blk.lambda2 = eh.eigenvalues();
    // Full-space eigenvectors; indices then enumerate every basis state.
    const Mat W = V * eh.eigenvectors();
    blk.indices.resize(static_cast<std::size_t>(Jd.rows()));
    std::iota(blk.indices.begin(), blk.indices.end(), 0L);
    blk.kept = truncation_filter(pair, blk.indices, W);
    if (options.keep_vectors) blk.vectors = W;
    out.blocks.push_back(std::move(blk));
  }
  assemble(out, pair);
  return out;
}

double max_joint_residual(const OperatorPair& pair, const JointSpectrum& spec) {
  double worst = 0.0;
  for (const auto& blk : spec.blocks) {
    if (blk.vectors.size() == 0) fail(ErrorKind::BadParameter, "spectrum was computed without eigenvectors");
    const Eigen::Index n = static_cast<Eigen::Index>(blk.indices.size());
    // Gather the columns of J and H touched by the block.
    SparseMat P(pair.dims, n);
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index r = 0; r < n; ++r) t.emplace_back(blk.indices[static_cast<std::size_t>(r)], r, 1.0);
    P.setFromTriplets(t.begin(), t.end());
    const Mat Jv = (pair.J * P) * blk.vectors;
    const Mat Hv = (pair.H * P) * blk.vectors;
    const Mat V = P * blk.vectors;
    for (Eigen::Index c = 0; c < blk.vectors.cols(); ++c) {
      if (!blk.kept[static_cast<std::size_t>(c)]) continue;
      const double r = (Jv.col(c) - blk.lambda1 * V.col(c)).norm() + (Hv.col(c) - blk.lambda2[c] * V.col(c)).norm();
      worst = std::max(worst, r);
    }
  }
  return worst;
}

}  // namespace semitoric
