#include <Eigen/Dense>
#include <string>
#include <vector>

#include "doctest.h"
#include "kronopt/errors.hpp"
#include "kronopt/network.hpp"
#include "support/testnets.hpp"

using namespace kronopt;

TEST_CASE("from_records sorts buses by id and indexes them") {
  Network net = Network::from_records(
      100.0,
      {{7, -0.5, false}, {2, 0.0, true}, {5, 0.5, false}},
      {{2, 5, 0.1}, {5, 7, 0.2}});
  CHECK(net.n() == 3);
  CHECK(net.id_of(0) == 2);
  CHECK(net.id_of(1) == 5);
  CHECK(net.id_of(2) == 7);
  CHECK(net.index_of(5) == 1);
  CHECK(net.slack_index() == 0);
  Eigen::VectorXd P = net.injections();
  CHECK(P(0) == doctest::Approx(0.0));
  CHECK(P(1) == doctest::Approx(0.5));
  CHECK(P(2) == doctest::Approx(-0.5));
}

TEST_CASE("from_records rejects malformed inputs") {
  CHECK_THROWS_AS(Network::from_records(100.0, {{1, 0.0, true}, {1, 0.0, false}},
                                        {{1, 1, 0.1}}),
                  ValidationError);
  // no slack
  CHECK_THROWS_AS(Network::from_records(100.0, {{1, 0.0, false}, {2, 0.0, false}},
                                        {{1, 2, 0.1}}),
                  ValidationError);
  // branch endpoint not a bus
  CHECK_THROWS_AS(Network::from_records(100.0, {{1, 0.0, true}, {2, 0.0, false}},
                                        {{1, 3, 0.1}}),
                  ValidationError);
  // nonpositive reactance
  CHECK_THROWS_AS(Network::from_records(100.0, {{1, 0.0, true}, {2, 0.0, false}},
                                        {{1, 2, 0.0}}),
                  ValidationError);
}

TEST_CASE("susceptance matrix of the 3-bus path") {
  Network net = testing::path3();
  Eigen::MatrixXd B = build_susceptance(net);
  Eigen::MatrixXd want(3, 3);
  want << 1, -1, 0,
         -1, 2, -1,
          0, -1, 1;
  CHECK((B - want).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("parallel branches add their susceptances") {
  Network net = Network::from_records(
      100.0, {{1, 1.0, true}, {2, -1.0, false}}, {{1, 2, 0.5}, {1, 2, 0.5}});
  Eigen::MatrixXd B = build_susceptance(net);
  CHECK(B(0, 0) == doctest::Approx(4.0));
  CHECK(B(0, 1) == doctest::Approx(-4.0));
  // zero row sums
  CHECK(B.rowwise().sum().cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("adjacency_of reports the off-diagonal support") {
  Eigen::MatrixXd B(3, 3);
  B << 1, -1, 0,
      -1, 2, -1,
       0, -1, 1;
  Eigen::MatrixXi adj = adjacency_of(B);
  CHECK(adj(0, 1) == 1);
  CHECK(adj(1, 2) == 1);
  CHECK(adj(0, 2) == 0);
  CHECK(adj.diagonal().sum() == 0);
  CHECK(adj == adj.transpose().eval());
}

TEST_CASE("matpower case parses buses, gens and branches") {
  const std::string text = R"(function mpc = case3
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0   0 0 0 1 1 0 135 1 1.05 0.95;
  2 1 50  0 0 0 1 1 0 135 1 1.05 0.95;
  3 1 100 0 0 0 1 1 0 135 1 1.05 0.95;
];
mpc.gen = [
  1 150 0 300 -300 1 100 1 300 0;
  3 0   0 300 -300 1 100 0 300 0; % out of service
];
mpc.branch = [
  1 2 0.01 0.1  0 250 250 250 0 0 1 -360 360;
  2 3 0.01 0.2  0 250 250 250 0 0 1 -360 360;
  1 3 0.01 0.25 0 250 250 250 0 0 0 -360 360; % open
];
)";
  Network net = parse_matpower(text);
  CHECK(net.base_mva() == doctest::Approx(100.0));
  CHECK(net.n() == 3);
  CHECK(net.slack_index() == net.index_of(1));
  CHECK(net.branches().size() == 2);  // the open line is dropped
  CHECK(net.branches()[1].x == doctest::Approx(0.2));
  Eigen::VectorXd P = net.injections();
  CHECK(P(net.index_of(1)) == doctest::Approx(1.5));   // 150 MW gen
  CHECK(P(net.index_of(2)) == doctest::Approx(-0.5));  // 50 MW load
  CHECK(P(net.index_of(3)) == doctest::Approx(-1.0));  // gen is off
}

TEST_CASE("matpower parse errors carry line numbers") {
  CHECK_THROWS_AS(parse_matpower("mpc.baseMVA = 100;\nmpc.branch = [\n];\n"),
                  ParseError);
  const std::string isolated = R"(mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1 0 135 1 1.05 0.95;
  2 4 0 0 0 0 1 1 0 135 1 1.05 0.95;
];
mpc.branch = [
  1 2 0.01 0.1 0 250 250 250 0 0 1 -360 360;
];
)";
  try {
    parse_matpower(isolated);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("json round trip preserves the network") {
  Network net = testing::triangles_bridge();
  Network back = Network::from_json_text(net.to_json_text());
  CHECK(back.n() == net.n());
  CHECK(back.base_mva() == doctest::Approx(net.base_mva()));
  CHECK(back.slack_index() == net.slack_index());
  REQUIRE(back.branches().size() == net.branches().size());
  for (size_t i = 0; i < net.branches().size(); ++i) {
    CHECK(back.branches()[i].from == net.branches()[i].from);
    CHECK(back.branches()[i].to == net.branches()[i].to);
    CHECK(back.branches()[i].x == doctest::Approx(net.branches()[i].x));
  }
  Eigen::VectorXd dp = back.injections() - net.injections();
  CHECK(dp.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}
