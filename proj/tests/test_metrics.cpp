#include <doctest.h>

#include <random>

#include "fairdim/fairpca.hpp"
#include "fairdim/metrics.hpp"
#include "test_helpers.hpp"

using namespace fairdim;
using namespace fairdim::testing;

namespace {

GroupedDataset random_grouped(std::uint64_t seed, int n = 40, int d = 5) {
  std::mt19937_64 rng(seed);
  Matrix raw = random_matrix(n, d, rng);
  std::vector<int> labels;
  for (int i = 0; i < n; ++i) labels.push_back(i % 2);
  return make_grouped(raw, labels, false);
}

}  // namespace

TEST_CASE("variance_explained examples") {
  Matrix X(3, 2);
  X << 2, 0, 0, 1, 0, 0;

  ProjectionMatrix e1{Matrix::Zero(2, 1), 1};
  e1.columns(0, 0) = 1.0;
  CHECK(variance_explained(X, e1) == doctest::Approx(0.8));

  ProjectionMatrix full{Matrix::Identity(2, 2), 2};
  CHECK(variance_explained(X, full) == doctest::Approx(1.0).epsilon(1e-10));

  // direction orthogonal to all rows
  Matrix Y(4, 2);
  Y << 1, 0, -1, 0, 2, 0, -2, 0;
  ProjectionMatrix e2{Matrix::Zero(2, 1), 1};
  e2.columns(1, 0) = 1.0;
  CHECK(variance_explained(Y, e2) == doctest::Approx(0.0));

  CHECK_THROWS(variance_explained(Matrix::Zero(3, 2), e2));
}

TEST_CASE("mmd_squared examples") {
  // identical groups
  Matrix X(4, 2);
  X << 1, 2, 3, 4, 1, 2, 3, 4;
  ProjectionMatrix full{Matrix::Identity(2, 2), 2};
  CHECK(mmd_squared(X, {0, 0, 1, 1}, full) == doctest::Approx(0.0));

  // projected means (1,0) and (0,1)
  Matrix Y(2, 2);
  Y << 1, 0, 0, 1;
  CHECK(mmd_squared(Y, {0, 1}, full) == doctest::Approx(2.0));

  // permutation within a group leaves the mean unchanged bit-for-bit when the
  // summation visits rows in the same order
  Matrix Z(4, 2);
  Z << 1, 5, 2, 6, 3, 7, 4, 8;
  const double a = mmd_squared(Z, {0, 0, 1, 1}, full);
  Matrix Zp = Z;
  Zp.row(0).swap(Zp.row(1));
  const double b = mmd_squared(Zp, {0, 0, 1, 1}, full);
  CHECK(a == doctest::Approx(b).epsilon(1e-15));
}

TEST_CASE("evaluate fills the report consistently") {
  auto data = random_grouped(51);
  auto pca = fit_standard_pca(data, 2);
  auto report = evaluate(data, pca.projection, "pca");

  CHECK(report.rank == 2);
  CHECK(report.method_name == "pca");
  CHECK(report.mmd_squared >= 0.0);
  CHECK(report.loss_gap >= 0.0);
  REQUIRE(report.per_group_errors.size() == 2);

  // total error is the n-weighted combination of group errors
  const double n0 = data.group_sizes[0], n1 = data.group_sizes[1];
  const double combined =
      (n0 * report.per_group_errors[0] + n1 * report.per_group_errors[1]) /
      (n0 + n1);
  CHECK(report.reconstruction_error_total ==
        doctest::Approx(combined).epsilon(1e-9));

  // and equals the direct residual computation
  const Matrix resid = data.features - (data.features * pca.projection.columns) *
                                           pca.projection.columns.transpose();
  CHECK(report.reconstruction_error_total ==
        doctest::Approx(resid.squaredNorm() / data.n()).epsilon(1e-9));

  CHECK_THROWS(evaluate(random_grouped(52, 40, 4), pca.projection, "pca"));
}

TEST_CASE("identical groups score zero gap and zero mmd") {
  std::mt19937_64 rng(53);
  Matrix half = random_matrix(30, 4, rng);
  Matrix raw(60, 4);
  raw << half, half;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(0);
  for (int i = 0; i < 30; ++i) labels.push_back(1);
  auto data = make_grouped(raw, labels, false);
  auto pca = fit_standard_pca(data, 2);
  auto report = evaluate(data, pca.projection, "pca");
  CHECK(report.loss_gap <= 1e-8);
  CHECK(report.mmd_squared <= 1e-10);
}

TEST_CASE("nested selections never increase reconstruction error") {
  auto data = random_grouped(54, 50, 6);
  std::mt19937_64 rng(55);
  Matrix basis = random_orthonormal_cols(6, 6, rng);
  double prev = 1e300;
  for (int r = 1; r <= 6; ++r) {
    ProjectionMatrix U{basis.leftCols(r), r};
    const double err = reconstruction_error(data.features, U);
    CHECK(err <= prev + 1e-10);
    prev = err;
  }
}

TEST_CASE("scale behavior of the three metrics") {
  auto data = random_grouped(56);
  auto pca = fit_standard_pca(data, 2);
  auto base = evaluate(data, pca.projection, "pca");

  const double c = 3.5;
  GroupedDataset scaled = data;
  scaled.features *= c;
  auto moved = evaluate(scaled, pca.projection, "pca");

  CHECK(moved.reconstruction_error_total ==
        doctest::Approx(c * c * base.reconstruction_error_total).epsilon(1e-9));
  CHECK(moved.mmd_squared == doctest::Approx(c * c * base.mmd_squared).epsilon(1e-9));
  CHECK(moved.variance_explained ==
        doctest::Approx(base.variance_explained).epsilon(1e-10));
}

TEST_CASE("report serialization shapes") {
  auto data = random_grouped(57);
  auto pca = fit_standard_pca(data, 1);
  auto report = evaluate(data, pca.projection, "pca");

  const std::string json = report_to_json(report);
  CHECK(json.find("\"method\":\"pca\"") != std::string::npos);
  CHECK(json.find("\"per_group_losses\"") != std::string::npos);

  const std::string header = report_csv_header(2);
  CHECK(header == "method,rank,re_total,ve,mmd2,loss_gap,err_g0,err_g1,loss_g0,loss_g1");
  const std::string row = report_csv_row(report);
  CHECK(std::count(row.begin(), row.end(), ',') ==
        std::count(header.begin(), header.end(), ','));
}
