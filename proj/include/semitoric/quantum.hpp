#pragma once

#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "semitoric/execution.hpp"
#include "semitoric/planar.hpp"

namespace semitoric {

using SparseMat = Eigen::SparseMatrix<double>;

struct Truncation {
  bool active = false;
  int n_max = 0;
  // Basis states whose weight in an eigenvector flags truncation damage.
  std::vector<char> edge;
  double mass_limit = 1e-10;
};

// Commuting real symmetric operators on a finite basis.
struct OperatorPair {
  std::string model;
  double hbar = 1.0;
  long dims = 0;
  SparseMat J, H;
  Truncation truncation;
};

OperatorPair build_spin_toric(double j);
OperatorPair build_jaynes_cummings(double j, int n_max);
// Spins are sized j_k = R_k / hbar so that J commutes exactly with s1.s2;
// requires j1 / R1 == j2 / R2.
OperatorPair build_coupled_spins(double j1, double j2, double R1, double R2, double t);
// Convenience form: hbar = 1/j, j1 = R1 j, j2 = R2 j.
OperatorPair build_coupled_spins_for(double j, double R1, double R2, double t);

double hermiticity_defect(const SparseMat& A);
// ||JH - HJ||_F / (||J||_F ||H||_F).
double relative_commutator(const OperatorPair& pair);

struct SpectrumBlock {
  double lambda1 = 0.0;
  std::vector<long> indices;  // basis states of the J-eigenspace
  Mat vectors;                // block-local eigenvectors (kept on request)
  Vec lambda2;
  std::vector<char> kept;     // survived truncation filtering
};

struct JointSpectrum {
  double hbar = 1.0;
  PointSet points;
  std::vector<int> block;  // block label per point
  std::vector<SpectrumBlock> blocks;
  long excluded = 0;       // truncation-contaminated points
};

struct SpectrumOptions {
  double block_gap = 1e-9;
  double ambiguity_gap = 1e-7;
  bool keep_vectors = false;
  Execution exec;
};

// J diagonal: blocks come straight from its diagonal. Each block of H is
// diagonalized independently (in parallel when exec allows).
JointSpectrum joint_spectrum(const OperatorPair& pair, const SpectrumOptions& options = {});

// Serial dense reference: full eigendecomposition of J, then H compressed
// to each eigenspace. Only for small dimensions.
JointSpectrum joint_spectrum_reference(const OperatorPair& pair, const SpectrumOptions& options = {});

// max over kept points of ||J v - l1 v|| + ||H v - l2 v||; requires vectors.
double max_joint_residual(const OperatorPair& pair, const JointSpectrum& spec);

}  // namespace semitoric
