#include <Eigen/Dense>
#include <vector>

#include "doctest.h"
#include "kronopt/dcpf.hpp"
#include "kronopt/errors.hpp"
#include "kronopt/network.hpp"
#include "support/testnets.hpp"

using namespace kronopt;

TEST_CASE("path3 solves to [1, 0, -1]") {
  Network net = testing::path3();
  Eigen::VectorXd th = solve_dc(net);
  CHECK(th(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(th(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(th(2) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("slack position shifts the profile, not the differences") {
  Network net = testing::path3_slack_end();
  Eigen::VectorXd th = solve_dc(net);
  CHECK(th(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(th(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(th(2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("theta_ref offsets every angle uniformly") {
  Network net = testing::path3();
  Eigen::MatrixXd B = build_susceptance(net);
  Eigen::VectorXd P = net.injections();
  Eigen::VectorXd a = solve_dc(B, P, 1, 0.0);
  Eigen::VectorXd b = solve_dc(B, P, 1, 0.25);
  CHECK(((b - a).array() - 0.25).abs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("solution satisfies the flow equations on a random network") {
  for (uint64_t seed : {1u, 7u, 23u}) {
    Network net = testing::random_connected(17, seed);
    Eigen::MatrixXd B = build_susceptance(net);
    Eigen::VectorXd P = net.injections();
    Eigen::VectorXd th = solve_dc(net);
    Eigen::VectorXd res = B * th - P;
    CHECK(res.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(th(net.slack_index()) == doctest::Approx(0.0));
  }
}

TEST_CASE("injection imbalance is absorbed at the reference") {
  Network net = testing::path3();
  Eigen::MatrixXd B = build_susceptance(net);
  Eigen::VectorXd P = net.injections();
  P(0) += 5e-7;  // below the warn threshold
  Eigen::VectorXd th = solve_dc(B, P, 1);
  CHECK((B * th - P).cwiseAbs().maxCoeff() < 1e-6);

  P(0) += 0.5;  // far beyond the reject threshold
  CHECK_THROWS_AS(solve_dc(B, P, 1), ValidationError);
}

TEST_CASE("branch flows on the path are the through-flow") {
  Network net = testing::path3();
  Eigen::VectorXd th = solve_dc(net);
  std::vector<double> f = branch_flows(net, th);
  REQUIRE(f.size() == 2);
  CHECK(f[0] == doctest::Approx(1.0));  // 1->2 carries the injection
  CHECK(f[1] == doctest::Approx(1.0));  // 2->3 delivers it
}
