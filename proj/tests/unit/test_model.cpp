#include <gtest/gtest.h>

#include "generators.hpp"
#include "phdelay/errors.hpp"
#include "phdelay/model.hpp"

namespace phdelay {
namespace {

using testing::Rng;

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

TEST(Validate, ScalarDelaySystemIsValid) {
  EXPECT_TRUE(validate(testing::scalar_system(2.0, 1.0)).empty());
}

TEST(Validate, NegativeEnergyMatrix) {
  DelayPHSystem sys = testing::scalar_system(2.0, 1.0);
  sys.H(0, 0) = -1.0;
  const auto v = validate(sys);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "H not positive definite, min eigenvalue -1");
}

TEST(Validate, SymmetricJIsNotAntisymmetric) {
  DelayPHSystem sys = testing::counterexample_system();
  sys.J << 0, 1, 1, 0;
  EXPECT_TRUE(mentions(validate(sys), "J not antisymmetric"));
}

TEST(Validate, CollectsAllViolations) {
  DelayPHSystem sys = testing::counterexample_system();
  sys.H(0, 0) = -1.0;
  sys.J << 0, 1, 1, 0;
  sys.tau = 0.0;
  sys.theta = -Matrix::Identity(2, 2);
  const auto v = validate(sys);
  EXPECT_TRUE(mentions(v, "H not positive definite"));
  EXPECT_TRUE(mentions(v, "J not antisymmetric"));
  EXPECT_TRUE(mentions(v, "tau"));
  EXPECT_TRUE(mentions(v, "theta not positive semidefinite"));
}

TEST(Validate, ShapeMismatchNamesField) {
  DelayPHSystem sys = testing::counterexample_system();
  sys.Z = Matrix::Zero(2, 3);
  EXPECT_TRUE(mentions(validate(sys), "Z has shape 2x3, expected 2x2"));
}

TEST(Validate, RMayBeIndefiniteForDelaySystems) {
  DelayPHSystem sys = testing::scalar_system(-1.0, 0.0);
  EXPECT_TRUE(validate(sys).empty());
}

TEST(Validate, StandardPHRequiresPsdR) {
  StandardPHSystem sys{Matrix::Ones(1, 1), Matrix::Zero(1, 1), -Matrix::Ones(1, 1),
                       Matrix::Ones(1, 1)};
  EXPECT_TRUE(mentions(validate(sys), "R not positive semidefinite"));
}

TEST(Validate, DoesNotMutate) {
  Rng rng(1);
  const DelayPHSystem sys = testing::random_certified(rng, 3, 2);
  const DelayPHSystem copy = sys;
  (void)validate(sys);
  EXPECT_EQ(sys.H, copy.H);
  EXPECT_EQ(sys.R, copy.R);
  EXPECT_EQ(*sys.theta, *copy.theta);
}

TEST(Validate, HistoryFunction) {
  HistoryFunction h = HistoryFunction::constant(Vector::Ones(2), 1.0);
  EXPECT_TRUE(validate(h, 2, 1.0).empty());
  EXPECT_FALSE(validate(h, 3, 1.0).empty());
  EXPECT_FALSE(validate(h, 2, 2.0).empty());
  h.grid = {-1.0, -1.0};
  EXPECT_TRUE(mentions(validate(h, 2, 1.0), "strictly increasing"));
}

TEST(HistoryFunction, LinearInterpolationAndClamp) {
  HistoryFunction h;
  h.grid = {-1.0, -0.5, 0.0};
  h.values.resize(1, 3);
  h.values << 0.0, 1.0, 3.0;
  EXPECT_DOUBLE_EQ(h(-0.75)(0), 0.5);
  EXPECT_DOUBLE_EQ(h(-0.25)(0), 2.0);
  EXPECT_DOUBLE_EQ(h(-2.0)(0), 0.0);
  EXPECT_DOUBLE_EQ(h(1.0)(0), 3.0);
}

TEST(Conversion, ScalarExample) {
  const GeneralDelaySystem g = delay_ph_to_general(testing::scalar_system(2.0, 1.0));
  EXPECT_DOUBLE_EQ(g.A0(0, 0), -2.0);
  EXPECT_DOUBLE_EQ(g.A1(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(g.B(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(g.C(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(g.tau, 1.0);
}

TEST(Conversion, DiagonalScaling) {
  DelayPHSystem sys;
  sys.H = 2 * Matrix::Identity(2, 2);
  sys.J = Matrix::Zero(2, 2);
  sys.R = 2 * Matrix::Identity(2, 2);
  sys.Z = Matrix::Zero(2, 2);
  sys.G = 2 * Matrix::Identity(2, 2);
  const GeneralDelaySystem g = delay_ph_to_general(sys);
  EXPECT_LE((g.A0 + Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LE(g.A1.norm(), 0.0);
  EXPECT_LE((g.B - Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LE((g.C - 2 * Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(Conversion, RandomResiduals) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const DelayPHSystem sys = testing::random_certified(rng, 3, 2);
    const GeneralDelaySystem g = delay_ph_to_general(sys);
    EXPECT_LE((sys.H * g.A0 - (sys.J - sys.R)).norm(), 1e-12 * (1 + sys.R.norm()));
    EXPECT_LE((sys.H * g.B - sys.G).norm(), 1e-12 * (1 + sys.G.norm()));
    EXPECT_LE((sys.H * g.A1 + sys.Z).norm(), 1e-12 * (1 + sys.Z.norm()));
  }
}

TEST(Conversion, GeneralToDelayPHScalar) {
  GeneralDelaySystem g{Matrix::Constant(1, 1, -2.0), Matrix::Constant(1, 1, -1.0),
                       Matrix::Ones(1, 1), Matrix::Ones(1, 1), 1.0};
  const DelayPHConversion c = general_to_delay_ph(g, Matrix::Ones(1, 1));
  ASSERT_TRUE(c.ok());
  EXPECT_DOUBLE_EQ(c.system->J(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(c.system->R(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(c.system->Z(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(c.system->G(0, 0), 1.0);
}

TEST(Conversion, IncompatibleOutputReportsResidual) {
  Rng rng(8);
  GeneralDelaySystem g{testing::random_matrix(rng, 2, 2), testing::random_matrix(rng, 2, 2),
                       testing::random_matrix(rng, 2, 1), Matrix(), 1.0};
  const Matrix h = testing::random_spd(rng, 2);
  g.C = 2.0 * g.B.transpose() * h;
  const DelayPHConversion c = general_to_delay_ph(g, h);
  EXPECT_FALSE(c.ok());
  EXPECT_NEAR(c.output_residual, spectral_norm(g.B.transpose() * h), 1e-12);
}

TEST(Conversion, RandomSplittingAndRoundTrip) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = testing::uniform_int(rng, 1, 5);
    const Eigen::Index m = testing::uniform_int(rng, 1, 3);
    GeneralDelaySystem g{testing::random_matrix(rng, n, n), testing::random_matrix(rng, n, n),
                         testing::random_matrix(rng, n, m), Matrix(), 0.7};
    const Matrix h = trial % 2 ? Matrix(Matrix::Identity(n, n)) : testing::random_spd(rng, n);
    g.C = g.B.transpose() * h;
    const DelayPHConversion c = general_to_delay_ph(g, h);
    ASSERT_TRUE(c.ok());
    const DelayPHSystem& d = *c.system;
    EXPECT_LE((d.J + d.J.transpose()).norm(), 1e-14 * (1 + d.J.norm()));
    EXPECT_EQ(d.R, d.R.transpose());
    if (trial % 2) {
      EXPECT_LE((d.J - d.R - g.A0).norm(), 1e-14 * (1 + g.A0.norm()));
    }
    const GeneralDelaySystem back = delay_ph_to_general(d);
    const auto rel = [](const Matrix& a, const Matrix& b) { return (a - b).norm() / (1 + b.norm()); };
    EXPECT_LE(rel(back.A0, g.A0), 1e-10);
    EXPECT_LE(rel(back.A1, g.A1), 1e-10);
    EXPECT_LE(rel(back.B, g.B), 1e-10);
    EXPECT_LE(rel(back.C, g.C), 1e-10);
    EXPECT_EQ(back.tau, g.tau);
  }
}

TEST(Conversion, RejectsIndefiniteEnergy) {
  GeneralDelaySystem g{-Matrix::Ones(1, 1), Matrix::Zero(1, 1), Matrix::Ones(1, 1),
                       Matrix::Ones(1, 1), 1.0};
  EXPECT_THROW(general_to_delay_ph(g, -Matrix::Ones(1, 1)), PreconditionError);
}

TEST(KindName, AllKinds) {
  EXPECT_EQ(kind_name(System(StandardLTISystem{})), "standard_lti");
  EXPECT_EQ(kind_name(System(StandardPHSystem{})), "standard_ph");
  EXPECT_EQ(kind_name(System(GeneralDelaySystem{})), "general_delay");
  EXPECT_EQ(kind_name(System(DelayPHSystem{})), "delay_ph");
}

}  // namespace
}  // namespace phdelay
