#include "fairdim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace fairdim {

void check_uniqueness(const std::vector<Vector>& spectra) {
  if (spectra.empty()) throw std::invalid_argument("need at least one spectrum");
  const auto d = spectra.front().size();
  for (const auto& s : spectra)
    if (s.size() != d) throw std::invalid_argument("spectra lengths differ");
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = m + 1; n < d; ++n) {
      bool separated = false;
      for (const auto& s : spectra) {
        if (s[m] != s[n]) {
          separated = true;
          break;
        }
      }
      if (!separated)
        throw std::invalid_argument(
            "uniqueness condition violated: diagonal rows for columns " +
            std::to_string(m) + " and " + std::to_string(n) +
            " are identical across all groups");
    }
  }
}

Matrix random_orthonormal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return Q;
}

std::pair<std::vector<TargetMatrix>, Matrix> make_commuting_family(
    const CommutingFamilySpec& spec) {
  const int d = spec.dimension;
  if (d < 2) throw std::invalid_argument("dimension must be >= 2");
  for (const auto& s : spec.spectra)
    if (s.size() != d) throw std::invalid_argument("spectrum length must equal dimension");
  if (spec.noise_level == 0.0) check_uniqueness(spec.spectra);
  if (spec.noise_level < 0.0) throw std::invalid_argument("noise_level must be >= 0");

  std::mt19937_64 rng(spec.seed);
  const Matrix Q = random_orthonormal(d, rng);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<TargetMatrix> family;
  family.reserve(spec.spectra.size());
  for (std::size_t s = 0; s < spec.spectra.size(); ++s) {
    TargetMatrix t;
    t.m = Q * spec.spectra[s].asDiagonal() * Q.transpose();
    if (spec.noise_level > 0.0) {
      Matrix G(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) G(i, j) = gauss(rng);
      Matrix sym = 0.5 * (G + G.transpose());
      sym /= sym.norm();
      t.m += spec.noise_level * sym;
    }
    t.group_label = static_cast<int>(s);
    t.rank_used = 0;
    family.push_back(std::move(t));
  }
  return {std::move(family), Q};
}

std::pair<Matrix, std::vector<int>> sample_grouped_gaussian(
    int d, const std::vector<Vector>& group_spectra, bool shared_basis,
    int n_per_group, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (n_per_group < 2) throw std::invalid_argument("need at least 2 rows per group");
  const int K = static_cast<int>(group_spectra.size());
  if (K < 2) throw std::invalid_argument("need at least 2 groups");
  for (const auto& s : group_spectra) {
    if (s.size() != d) throw std::invalid_argument("spectrum length must equal dimension");
    if (s.minCoeff() < 0.0) throw std::invalid_argument("spectra must be nonnegative");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Matrix shared = random_orthonormal(d, rng);

  Matrix raw(static_cast<Eigen::Index>(K) * n_per_group, d);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(K) * static_cast<std::size_t>(n_per_group));
  Eigen::Index row = 0;
  for (int s = 0; s < K; ++s) {
    const Matrix Qs = shared_basis ? shared : random_orthonormal(d, rng);
    const Matrix root =
        Qs * group_spectra[static_cast<std::size_t>(s)].cwiseSqrt().asDiagonal();
    for (int i = 0; i < n_per_group; ++i, ++row) {
      Vector z(d);
      for (int j = 0; j < d; ++j) z[j] = gauss(rng);
      raw.row(row) = (root * z).transpose();
      labels.push_back(s);
    }
  }
  return {std::move(raw), std::move(labels)};
}

GroupedDataset make_grouped_gaussian(int d, const std::vector<Vector>& group_spectra,
                                     bool shared_basis, int n_per_group,
                                     std::uint64_t seed, bool standardize) {
  auto [raw, labels] = sample_grouped_gaussian(d, group_spectra, shared_basis,
                                               n_per_group, seed);
  return make_grouped(raw, labels, standardize);
}

std::pair<Matrix, std::vector<int>> realize_commuting_dataset(
    const CommutingFamilySpec& spec) {
  const int d = spec.dimension;
  if (d < 2) throw std::invalid_argument("dimension must be >= 2");
  check_uniqueness(spec.spectra);
  for (const auto& s : spec.spectra)
    if (s.size() != d || s.minCoeff() < 0.0)
      throw std::invalid_argument("spectra must be nonnegative, length d");

  std::mt19937_64 rng(spec.seed);
  const Matrix Q = random_orthonormal(d, rng);

  const int K = static_cast<int>(spec.spectra.size());
  // Each group contributes rows [A; -A] with A = sqrt(d) diag(sqrt(lambda)) Q^T,
  // so (1/n_s) X_s^T X_s = Q diag(lambda) Q^T exactly and all column sums vanish.
  Matrix raw(static_cast<Eigen::Index>(K) * 2 * d, d);
  std::vector<int> labels;
  Eigen::Index row = 0;
  for (int s = 0; s < K; ++s) {
    const Matrix A = std::sqrt(static_cast<double>(d)) *
                     (spec.spectra[static_cast<std::size_t>(s)].cwiseSqrt().asDiagonal() *
                      Q.transpose());
    for (int i = 0; i < d; ++i, ++row) {
      raw.row(row) = A.row(i);
      labels.push_back(s);
    }
    for (int i = 0; i < d; ++i, ++row) {
      raw.row(row) = -A.row(i);
      labels.push_back(s);
    }
  }
  return {std::move(raw), std::move(labels)};
}

std::pair<Vector, Matrix> eig_oracle(const Matrix& M) {
  const auto d = M.rows();
  if (M.cols() != d) throw std::invalid_argument("expected a square matrix");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, M.norm()))
    throw std::invalid_argument("expected a symmetric matrix");

  Matrix A = 0.5 * (M + M.transpose());
  Matrix V = Matrix::Identity(d, d);
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < d; ++p)
      for (Eigen::Index q = p + 1; q < d; ++q) off += A(p, q) * A(p, q);
    if (off <= 1e-30 * std::max(1.0, A.squaredNorm())) break;
    for (Eigen::Index p = 0; p < d; ++p) {
      for (Eigen::Index q = p + 1; q < d; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < d; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < d; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < d; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return A(a, a) > A(b, b);
  });
  Vector values(d);
  Matrix vectors(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    values[k] = A(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    vectors.col(k) = V.col(order[static_cast<std::size_t>(k)]);
  }
  return {std::move(values), std::move(vectors)};
}

}  // namespace fairdim
