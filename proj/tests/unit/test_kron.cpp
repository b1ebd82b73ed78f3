#include <Eigen/Dense>
#include <vector>

#include "doctest.h"
#include "kronopt/dcpf.hpp"
#include "kronopt/errors.hpp"
#include "kronopt/kron.hpp"
#include "kronopt/network.hpp"
#include "support/testnets.hpp"

using namespace kronopt;

TEST_CASE("keeping everything returns the matrix unchanged") {
  Network net = testing::star4();
  Eigen::MatrixXd B = build_susceptance(net);
  Eigen::MatrixXd R = kron_reduce(B, {0, 1, 2, 3});
  CHECK((R - B).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("eliminating the middle of a path puts the reactances in series") {
  Network net = testing::path3();
  Eigen::MatrixXd B = build_susceptance(net);
  Eigen::MatrixXd R = kron_reduce(B, {0, 2});
  CHECK(R(0, 0) == doctest::Approx(0.5));
  CHECK(R(0, 1) == doctest::Approx(-0.5));
  CHECK(R(1, 0) == doctest::Approx(-0.5));
  CHECK(R(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("reduction preserves kept angles when eliminated injections are zero") {
  for (uint64_t seed : {3u, 11u, 42u}) {
    Network net = testing::random_connected(20, seed);
    int ref = net.slack_index();
    Eigen::MatrixXd B = build_susceptance(net);
    Eigen::VectorXd P = Eigen::VectorXd::Zero(20);
    // injections only on the kept set
    std::vector<int> keep;
    for (int i = 0; i < 20; i += 2) keep.push_back(i);
    if (std::find(keep.begin(), keep.end(), ref) == keep.end()) keep.push_back(ref);
    std::sort(keep.begin(), keep.end());
    double s = 0.0;
    for (size_t k = 0; k + 1 < keep.size(); ++k) {
      P(keep[k]) = 0.1 * static_cast<double>(k % 3) - 0.1;
      s += P(keep[k]);
    }
    P(keep.back()) = -s;

    Eigen::VectorXd th_full = solve_dc(B, P, ref);
    Eigen::MatrixXd R = kron_reduce(B, keep);
    Eigen::VectorXd Pk(keep.size());
    int ref_pos = 0;
    for (size_t k = 0; k < keep.size(); ++k) {
      Pk(static_cast<int>(k)) = P(keep[k]);
      if (keep[k] == ref) ref_pos = static_cast<int>(k);
    }
    Eigen::VectorXd th_red = solve_dc(R, Pk, ref_pos);
    double err = 0.0;
    for (size_t k = 0; k < keep.size(); ++k)
      err = std::max(err, std::abs(th_red(static_cast<int>(k)) - th_full(keep[k])));
    CHECK(err < 1e-9);
  }
}

TEST_CASE("impedance-shortcut reduction matches the Schur complement") {
  for (uint64_t seed : {5u, 19u}) {
    Network net = testing::random_connected(15, seed);
    Eigen::MatrixXd B = build_susceptance(net);
    int ref = net.slack_index();
    std::vector<int> keep{ref};
    for (int i = 0; i < 15; i += 3)
      if (i != ref) keep.push_back(i);
    std::sort(keep.begin(), keep.end());
    Eigen::MatrixXd a = kron_reduce(B, keep);
    Eigen::MatrixXd b = kron_reduce_via_impedance(B, keep, ref);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("kron_reduce validates the keep set") {
  Eigen::MatrixXd B(2, 2);
  B << 1, -1, -1, 1;
  CHECK_THROWS_AS(kron_reduce(B, {}), ValidationError);
  CHECK_THROWS_AS(kron_reduce(B, {1, 0}), ValidationError);   // not ascending
  CHECK_THROWS_AS(kron_reduce(B, {0, 2}), ValidationError);   // out of range
}

TEST_CASE("aggregate_injections sums clusters onto their keepers") {
  Network net = testing::path3();
  Eigen::VectorXd P = net.injections();
  ClusterMap cmap{0, 0, 2};  // middle node folds into the first
  Eigen::VectorXd Pa = aggregate_injections(P, cmap, {0, 2});
  CHECK(Pa(0) == doctest::Approx(1.0));
  CHECK(Pa(1) == doctest::Approx(-1.0));
  CHECK(Pa.sum() == doctest::Approx(P.sum()));
}

TEST_CASE("ward injections preserve the total and reproduce kept angles") {
  Network net = testing::random_connected(12, 9);
  Eigen::MatrixXd B = build_susceptance(net);
  Eigen::VectorXd P = net.injections();
  int ref = net.slack_index();
  std::vector<int> keep{ref};
  for (int i = 0; i < 12; i += 2)
    if (i != ref) keep.push_back(i);
  std::sort(keep.begin(), keep.end());

  Eigen::VectorXd Pw = ward_injections(B, P, keep);
  CHECK(Pw.sum() == doctest::Approx(P.sum()).epsilon(1e-10));

  // Ward + Kron reproduces the original kept angles even with nonzero
  // eliminated injections
  Eigen::VectorXd th_full = solve_dc(B, P, ref);
  Eigen::MatrixXd R = kron_reduce(B, keep);
  int ref_pos = 0;
  for (size_t k = 0; k < keep.size(); ++k)
    if (keep[k] == ref) ref_pos = static_cast<int>(k);
  Eigen::VectorXd th_red = solve_dc(R, Pw, ref_pos);
  double err = 0.0;
  for (size_t k = 0; k < keep.size(); ++k)
    err = std::max(err, std::abs(th_red(static_cast<int>(k)) - th_full(keep[k])));
  CHECK(err < 1e-9);
}

TEST_CASE("reduced_network keeps ids, slack and fill branches") {
  Network net = testing::path3();  // slack is the middle bus
  Eigen::MatrixXd B = build_susceptance(net);
  std::vector<int> keep{0, 1};  // drop the far end
  Eigen::MatrixXd R = kron_reduce(B, keep);
  Eigen::VectorXd Pr(2);
  Pr << 1.0, -1.0;
  Network red = reduced_network(net, keep, R, Pr, 1);
  CHECK(red.n() == 2);
  CHECK(red.id_of(0) == 1);
  CHECK(red.id_of(1) == 2);
  CHECK(red.slack_index() == 1);
  REQUIRE(red.branches().size() == 1);
  CHECK(red.branches()[0].x == doctest::Approx(1.0));
  CHECK(red.injections()(0) == doctest::Approx(1.0));
}
