#include "support.hpp"

#include "swibal/builtin.hpp"
#include "swibal/error.hpp"
#include "swibal/model.hpp"
#include "swibal/random_models.hpp"

#include <doctest.h>

using namespace swibal;
using testing::unit_vector;

TEST_CASE("validate_model: example1 is clean and both abscissae are -1") {
  const LssModel m = example1();
  CHECK(validate_model(m).empty());
  for (const Mode& md : m.modes) CHECK(spectral_abscissa(md.A) == doctest::Approx(-1.0));
}

TEST_CASE("validate_model: zero scalar mode is not Hurwitz") {
  const LssModel m = LssModel::from_modes({{MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1),
                                            MatrixXd::Ones(1, 1)}});
  const auto d = validate_model(m);
  REQUIRE(d.size() == 1);
  CHECK(d[0].kind == Diagnostic::Kind::NotHurwitz);
  CHECK(d[0].mode == 1);
  CHECK(d[0].message.find("mode 1 not Hurwitz") != std::string::npos);
}

TEST_CASE("validate_model: wrong B shape in mode 2 is named") {
  LssModel m = example1();
  m.modes[1].B = MatrixXd::Zero(8, 2);
  const auto d = validate_model(m);
  REQUIRE_FALSE(d.empty());
  CHECK(d[0].kind == Diagnostic::Kind::Dimension);
  CHECK(d[0].mode == 2);
  CHECK_THROWS_AS(require_consistent(m), Error);
}

TEST_CASE("bilinear_embed: example1 coupling is the chain 1 -> 2 -> 3 -> 4") {
  const BilinearEmbedding e = bilinear_embed(example1());
  REQUIRE(e.num_modes() == 2);
  CHECK(e.D[0].isZero(0.0));
  MatrixXd expect = MatrixXd::Zero(8, 8);
  expect(1, 0) = expect(2, 1) = expect(3, 2) = 1.0;
  CHECK(e.D[1] == expect);
  CHECK(e.A == -MatrixXd::Identity(8, 8));
}

TEST_CASE("bilinear_embed: single mode keeps D_1 = 0") {
  const LssModel m = LssModel::from_modes({{-MatrixXd::Identity(2, 2), MatrixXd::Ones(2, 1),
                                            MatrixXd::Ones(1, 2)}});
  const BilinearEmbedding e = bilinear_embed(m);
  REQUIRE(e.D.size() == 1);
  CHECK(e.D[0].isZero(0.0));
  CHECK(e.A == m.modes[0].A);
}

TEST_CASE("bilinear_embed: A + D_j reproduces every A_j bit for bit") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    RandomModelSpec spec;
    spec.n = 3;
    spec.modes = 3;
    const LssModel m = random_model(rng, spec);
    const BilinearEmbedding e = bilinear_embed(m);
    for (int j = 0; j < m.num_modes(); ++j) {
      CHECK((e.A + e.D[j]) == m.modes[j].A);
    }
  }
}

TEST_CASE("mode_at: example2 schedule, switching instants belong to the new mode") {
  const SwitchingSignal s = example2_scenario().signal;
  CHECK(s.mode_at(0.0) == 1);
  CHECK(s.mode_at(0.4999) == 1);
  CHECK(s.mode_at(0.5) == 2);
  CHECK(s.mode_at(2.0) == 1);
  CHECK(s.mode_at(4.2) == 1);
  CHECK(s.mode_at(5.25) == 2);
  CHECK(s.mode_at(5.5) == 1);
  CHECK(s.mode_at(6.0) == 1);
  CHECK(s.mode_at(100.0) == 1);
  CHECK_THROWS_AS(s.mode_at(-1e-12), Error);
}

TEST_CASE("SwitchingSignal rejects non-increasing boundaries and bad modes") {
  using Seg = SwitchingSignal::Segment;
  CHECK_THROWS_AS(SwitchingSignal(std::vector<Seg>{{1.0, 1}, {1.0, 2}}), Error);
  CHECK_THROWS_AS(SwitchingSignal(std::vector<Seg>{{0.0, 1}}), Error);
  CHECK_THROWS_AS(SwitchingSignal(std::vector<Seg>{{1.0, 0}}), Error);
}

TEST_CASE("extended_input: indicators") {
  const SwitchingSignal s({{1.0, 1}, {2.0, 2}});
  const VectorXd u = extended_input(ConstantInput{VectorXd::Constant(1, 3.0)}, s, 1, 2, 1.5);
  CHECK(u.size() == 3);
  CHECK(u(0) == 3.0);
  CHECK(u(1) == 0.0);
  CHECK(u(2) == 1.0);

  const VectorXd z = extended_input(ZeroInput{}, s, 2, 2, 0.2);
  CHECK(z.size() == 4);
  CHECK(z(0) == 0.0);
  CHECK(z(1) == 0.0);
  CHECK(z(2) == 1.0);
  CHECK(z(3) == 0.0);

  const Scenario ex = example2_scenario();
  const VectorXd e0 = extended_input(ex.input, ex.signal, 1, 2, 0.0);
  CHECK(e0(0) == 0.0);
  CHECK(e0(1) == 1.0);
  CHECK(e0(2) == 0.0);
}

TEST_CASE("extended_input: indicators partition unity on a grid") {
  const Scenario ex = example2_scenario();
  for (int k = 0; k <= 6000; ++k) {
    const double t = k * 1e-3;
    const VectorXd u = extended_input(ex.input, ex.signal, 1, 2, t);
    CHECK(u.tail(2).sum() == 1.0);
  }
}

TEST_CASE("input_value: sine decay, mask and sampled interpolation") {
  const SineDecayInput sd{10.0, 30.0, 1.0, {}};
  CHECK(input_value(sd, 2, 0.1)(1) ==
        doctest::Approx(10.0 * std::sin(3.0) * std::exp(-0.1)).epsilon(1e-15));
  SineDecayInput masked = sd;
  masked.mask = Eigen::Vector2d(1.0, 0.0);
  CHECK(input_value(masked, 2, 0.1)(1) == 0.0);

  SampledInput smp;
  smp.t = {0.0, 1.0, 2.0};
  smp.values = MatrixXd(1, 3);
  smp.values << 0.0, 2.0, 4.0;
  CHECK(input_value(smp, 1, 0.25)(0) == doctest::Approx(0.5));
  CHECK(input_value(smp, 1, 3.0)(0) == 4.0);
  SampledInput bad = smp;
  bad.t = {0.0, 2.0, 1.0};
  CHECK_THROWS_AS(validate_input(bad, 1), Error);
  CHECK_THROWS_AS(validate_input(ConstantInput{VectorXd::Ones(2)}, 1), Error);
}

TEST_CASE("dual_model transposes every mode") {
  const LssModel m = example1();
  const LssModel d = dual_model(m);
  CHECK(d.m == m.p);
  CHECK(d.p == m.m);
  for (int j = 0; j < 2; ++j) {
    CHECK(d.modes[j].A == m.modes[j].A.transpose());
    CHECK(d.modes[j].B == m.modes[j].C.transpose());
    CHECK(d.modes[j].C == m.modes[j].B.transpose());
  }
}

TEST_CASE("example2 generator: B/C placement and tridiagonal bands") {
  const LssModel m = example2(10);
  CHECK(m.n == 10);
  CHECK(m.modes[0].B == unit_vector(10, 0));
  CHECK(m.modes[1].B == unit_vector(10, 9));
  CHECK(m.modes[0].C == unit_vector(10, 1).transpose());
  CHECK(m.modes[1].C == unit_vector(10, 8).transpose());
  for (int i = 1; i < 10; ++i) {
    CHECK(m.modes[0].A(i, i - 1) == 0.1);
    CHECK(m.modes[0].A(i - 1, i) == 1.0);
    CHECK(m.modes[1].A(i, i - 1) == 1.0);
    CHECK(m.modes[1].A(i - 1, i) == 0.5);
  }
  CHECK(m.modes[1].A.diagonal().isConstant(-2.0));
  CHECK_THROWS_AS(example2(3), Error);
}
