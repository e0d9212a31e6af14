#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "fairdim/dataio.hpp"
#include "fairdim/spectra.hpp"

namespace fairdim {

/// Family of K symmetric matrices sharing a planted eigenvector basis.
/// Identifiable (up to permutation/sign) only when for every column pair
/// (m, n) some group's spectrum separates them.
struct CommutingFamilySpec {
  int dimension = 0;
  std::vector<Vector> spectra;  // one length-d vector per group
  double noise_level = 0.0;
  std::uint64_t seed = 0;
};

/// Throws when some pair (m, n) has identical values across every spectrum.
void check_uniqueness(const std::vector<Vector>& spectra);

/// Returns the K matrices Q diag(spectrum_s) Q^T (+ scaled symmetric noise)
/// and the planted basis Q.
std::pair<std::vector<TargetMatrix>, Matrix> make_commuting_family(
    const CommutingFamilySpec& spec);

/// Seeded Haar-like orthonormal matrix: QR of a Gaussian draw with the
/// R diagonal sign fixed.
Matrix random_orthonormal(int d, std::mt19937_64& rng);

/// Zero-mean Gaussian rows per group with covariance Q_s diag(spectrum_s) Q_s^T.
/// shared_basis forces Q_A = Q_B = ... (the exactly-fair regime).
GroupedDataset make_grouped_gaussian(int d, const std::vector<Vector>& group_spectra,
                                     bool shared_basis, int n_per_group,
                                     std::uint64_t seed, bool standardize = false);

/// Raw (uncentered) sample matrix + labels behind make_grouped_gaussian;
/// exposed so fixtures can be written to CSV before dataio preprocessing.
std::pair<Matrix, std::vector<int>> sample_grouped_gaussian(
    int d, const std::vector<Vector>& group_spectra, bool shared_basis,
    int n_per_group, std::uint64_t seed);

/// Deterministic dataset whose per-group Gram matrix (1/n_s) X_s^T X_s equals
/// Q diag(spectrum_s) Q^T exactly and whose columns have exactly zero mean.
/// Spectra must be nonnegative. Used to realize commuting target families as
/// CSV fixtures.
std::pair<Matrix, std::vector<int>> realize_commuting_dataset(
    const CommutingFamilySpec& spec);

/// Full symmetric eigendecomposition by cyclic Jacobi rotations, independent
/// of both the Eigen solvers and the JEVD path. Test oracle only.
/// Eigenvalues nonincreasing; columns of the returned matrix are eigenvectors.
std::pair<Vector, Matrix> eig_oracle(const Matrix& M);

}  // namespace fairdim
