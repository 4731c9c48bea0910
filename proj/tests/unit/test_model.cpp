#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "v1motion/common/error.hpp"
#include "v1motion/model/field.hpp"
#include "v1motion/model/forward.hpp"
#include "v1motion/model/grid.hpp"

using namespace v1motion;
using namespace v1motion::model;
using v1motion::testing::orthonormal;
using v1motion::testing::random_image;
using v1motion::testing::random_matrix;
using v1motion::testing::randomize;

namespace {

Eigen::VectorXd loop_patch(const Image& img, Pos x, int p) {
  Eigen::VectorXd out(p * p);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < p; ++c) out(r * p + c) = img.at(x.x - p / 2 + c, x.y - p / 2 + r);
  return out;
}

// Per-position accumulation written independently of decode().
Image naive_decode(const Encoder& enc, const VectorField& f, int w, int h) {
  Image out(w, h);
  const int p = enc.patch();
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (int r = 0; r < p; ++r) {
      for (int c = 0; c < p; ++c) {
        double s = 0.0;
        for (int row = 0; row < enc.rows(); ++row) s += enc.weights()(row, r * p + c) * f.values(row, i);
        out.at(f.positions[i].x - p / 2 + c, f.positions[i].y - p / 2 + r) += s;
      }
    }
  }
  return out;
}

double sq_diff(const Image& a, const Image& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a.samples()[i] - b.samples()[i]) * (a.samples()[i] - b.samples()[i]);
  return s;
}

}  // namespace

TEST(ExtractPatch, ZeroImageGivesZeroVector) {
  const Image img(32, 32);
  const auto v = extract_patch(img, {16, 16}, 16);
  EXPECT_EQ(v.size(), 256);
  EXPECT_EQ(v.squaredNorm(), 0.0);
}

TEST(ExtractPatch, SinglePixel) {
  const Image img = random_image(8, 8, 3);
  EXPECT_EQ(extract_patch(img, {5, 2}, 1)(0), img.at(5, 2));
}

TEST(ExtractPatch, MatchesLoopCopy) {
  const Image img = random_image(8, 8, 4);
  for (int y = 2; y <= 6; ++y)
    for (int x = 2; x <= 6; ++x) EXPECT_EQ(extract_patch(img, {x, y}, 4), loop_patch(img, {x, y}, 4));
}

TEST(ExtractPatch, WindowIsMinusHalfToPlusHalfMinusOne) {
  Image img(16, 16);
  img.at(0, 0) = 1.0;
  img.at(15, 15) = 2.0;
  const auto v = extract_patch(img, {8, 8}, 16);
  EXPECT_EQ(v(0), 1.0);
  EXPECT_EQ(v(255), 2.0);
}

TEST(ExtractPatch, OutOfBoundsThrows) {
  const Image img(16, 16);
  EXPECT_THROW(extract_patch(img, {7, 8}, 16), BoundsError);
  EXPECT_THROW(extract_patch(img, {9, 8}, 16), BoundsError);
  EXPECT_THROW(extract_patch(img, {8, 8}, 0), ShapeError);
}

TEST(Encode, OneHotRowsSelectPatchEntries) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 16);
  w(0, 0) = 1;
  w(1, 5) = 1;
  w(2, 10) = 1;
  w(3, 15) = 1;
  const Encoder enc(2, 2, 4, w);
  const Image img = random_image(8, 8, 5);
  const std::vector<Pos> xs = {{3, 3}, {5, 4}};
  const auto f = encode(enc, img, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto patch = loop_patch(img, xs[i], 4);
    EXPECT_EQ(f.values(0, i), patch(0));
    EXPECT_EQ(f.values(1, i), patch(5));
    EXPECT_EQ(f.values(2, i), patch(10));
    EXPECT_EQ(f.values(3, i), patch(15));
  }
}

TEST(Encode, ZeroImageGivesZeroField) {
  const Encoder enc(3, 2, 4, random_matrix(6, 16, 1));
  const std::vector<Pos> xs = {{2, 2}, {4, 4}};
  EXPECT_EQ(encode(enc, Image(8, 8), xs).values.squaredNorm(), 0.0);
}

TEST(Encode, MatchesNaiveMatVec) {
  const Encoder enc(5, 2, 6, random_matrix(10, 36, 2));
  const Image img = random_image(20, 16, 6);
  const auto grid = GridSpec{6, 3}.positions(20, 16);
  const auto f = encode(enc, img, grid.positions);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto patch = loop_patch(img, grid.positions[i], 6);
    for (int r = 0; r < enc.rows(); ++r) {
      double s = 0.0;
      for (int c = 0; c < 36; ++c) s += enc.weights()(r, c) * patch(c);
      EXPECT_NEAR(f.values(r, i), s, 1e-12 * std::max(1.0, std::abs(s)));
    }
  }
}

TEST(Encode, ShapeMismatchThrows) {
  EXPECT_THROW(Encoder(2, 2, 4, random_matrix(4, 9, 1)), ShapeError);
}

TEST(Decode, ZeroFieldGivesZeroImage) {
  const Encoder enc(3, 2, 4, random_matrix(6, 16, 3));
  VectorField f;
  f.positions = GridSpec{4, 2}.positions(10, 10).positions;
  f.values = Eigen::MatrixXd::Zero(6, static_cast<Eigen::Index>(f.positions.size()));
  const Image out = decode(enc, f, 10, 10);
  for (double v : out.samples()) EXPECT_EQ(v, 0.0);
}

TEST(Decode, OrthonormalTilingIsIdentity) {
  const Encoder enc(8, 2, 4, orthonormal(16, 7));
  const GridSpec tiling{4, 4};
  const Image img = random_image(16, 12, 8);
  const Image rec = reconstruct(enc, tiling, img);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(rec.samples()[i], img.samples()[i], 1e-10);
}

TEST(Decode, OverlappingMatchesNaiveAccumulation) {
  const Encoder enc(4, 3, 6, random_matrix(12, 36, 9));
  const Image img = random_image(18, 18, 10);
  const auto f = encode(enc, img, GridSpec{6, 3}.positions(18, 18).positions);
  const Image a = decode(enc, f, 18, 18);
  const Image b = naive_decode(enc, f, 18, 18);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.samples()[i], b.samples()[i], 1e-12);
}

TEST(Decode, IsLinear) {
  const Encoder enc(4, 2, 4, random_matrix(8, 16, 11));
  VectorField f1;
  f1.positions = GridSpec{4, 2}.positions(12, 12).positions;
  f1.values = random_matrix(8, static_cast<int>(f1.positions.size()), 12);
  VectorField f2 = f1;
  f2.values = random_matrix(8, static_cast<int>(f1.positions.size()), 13);
  VectorField mix = f1;
  const double a = 0.7, b = -1.9;
  mix.values = a * f1.values + b * f2.values;
  const Image d1 = decode(enc, f1, 12, 12), d2 = decode(enc, f2, 12, 12), dm = decode(enc, mix, 12, 12);
  for (std::size_t i = 0; i < dm.size(); ++i) EXPECT_NEAR(dm.samples()[i], a * d1.samples()[i] + b * d2.samples()[i], 1e-10);
}

TEST(Encode, OrthonormalEncoderPreservesInnerProducts) {
  const Encoder enc(8, 2, 4, orthonormal(16, 14));
  const GridSpec tiling{4, 4};
  const Image i1 = random_image(16, 16, 15), i2 = random_image(16, 16, 16);
  const auto xs = tiling.positions(16, 16).positions;
  const auto v1 = encode(enc, i1, xs), v2 = encode(enc, i2, xs);
  double pix = 0.0;
  for (std::size_t i = 0; i < i1.size(); ++i) pix += i1.samples()[i] * i2.samples()[i];
  const double enc_ip = (v1.values.array() * v2.values.array()).sum();
  EXPECT_NEAR(enc_ip, pix, 1e-8 * std::abs(pix));
}

TEST(MotionMatrix, ParametricAtZeroIsIdentity) {
  auto m = MotionModel::zero_parametric(3, 2, DisplacementGrid(-3, 3, 0.5));
  randomize(m, 1);
  for (int k = 0; k < 3; ++k) EXPECT_TRUE(m.matrix(k, {0, 0}).isIdentity(0.0));
}

TEST(MotionMatrix, ParametricZeroCoefficientsIsIdentity) {
  const auto m = MotionModel::zero_parametric(2, 3, DisplacementGrid());
  EXPECT_TRUE(m.matrix(1, {2.3, -4.1}).isIdentity(0.0));
}

TEST(MotionMatrix, ParametricFirstOrderSubstitution) {
  auto m = MotionModel::zero_parametric(1, 2, DisplacementGrid());
  auto* b1 = m.params().data() + m.taylor_offset(0, 0);
  Eigen::Map<Eigen::Matrix2d>(b1) << 0, -1, 1, 0;
  Eigen::Matrix2d expected;
  expected << 1, -0.5, 0.5, 1;
  EXPECT_TRUE(m.matrix(0, {0.5, 0}).isApprox(expected, 1e-15));
}

TEST(MotionMatrix, NonParametricOffGridThrows) {
  const auto m = MotionModel::identity_nonparametric(2, 2, DisplacementGrid());
  EXPECT_THROW(m.matrix(0, {0.25, 0}), LookupError);
  EXPECT_THROW(m.matrix(0, {6.5, 0}), LookupError);
  EXPECT_NO_THROW(m.matrix(0, {-6, 6}));
}

TEST(ApplyMotion, IdentityAndZero) {
  const auto m = MotionModel::identity_nonparametric(3, 2, DisplacementGrid());
  const Eigen::VectorXd v = random_matrix(6, 1, 2);
  EXPECT_EQ(apply_motion(m, v, {1.5, -2}), v);
  EXPECT_EQ(apply_motion(m, Eigen::VectorXd::Zero(6), {1, 1}).squaredNorm(), 0.0);
}

TEST(ApplyMotion, MatchesPerBlockOracle) {
  for (auto kind : {MotionKind::NonParametric, MotionKind::Parametric}) {
    auto m = kind == MotionKind::Parametric ? MotionModel::zero_parametric(4, 3, DisplacementGrid(-2, 2, 0.5))
                                            : MotionModel::identity_nonparametric(4, 3, DisplacementGrid(-2, 2, 0.5));
    randomize(m, 3);
    const Eigen::VectorXd v = random_matrix(12, 1, 4);
    const Vec2 delta{1.5, -0.5};
    const auto out = apply_motion(m, v, delta);
    for (int k = 0; k < 4; ++k) {
      const Eigen::MatrixXd mk = m.matrix(k, delta);
      for (int r = 0; r < 3; ++r) {
        double s = 0.0;
        for (int c = 0; c < 3; ++c) s += mk(r, c) * v(k * 3 + c);
        EXPECT_NEAR(out(k * 3 + r), s, 1e-14);
      }
    }
  }
}

TEST(ApplyMotionMixed, SingletonSupportReducesToSingleOffset) {
  const DisplacementGrid g(-1, 1, 0.5);
  auto single = MotionModel::identity_nonparametric(3, 2, g);
  randomize(single, 5);
  const auto mixed = MotionModel::restore(MotionKind::NonParametricMixed, 3, 2, g, {{0, 0}}, single.params());
  const Encoder enc(3, 2, 4, random_matrix(6, 16, 6));
  const Image img = random_image(12, 12, 7);
  const Pos x{6, 6};
  const Vec2 delta{0.5, -1};
  const auto expected = apply_motion(single, encode(enc, img, std::vector<Pos>{x}).values.col(0), delta);
  EXPECT_EQ(apply_motion_mixed(mixed, enc, img, x, delta), expected);
}

TEST(ApplyMotionMixed, ZeroMatricesGiveZero) {
  auto m = MotionModel::identity_mixed(2, 2, DisplacementGrid(-1, 1, 1), mixing_support(2, 2));
  std::fill(m.params().begin(), m.params().end(), 0.0);
  const Encoder enc(2, 2, 4, random_matrix(4, 16, 8));
  EXPECT_EQ(apply_motion_mixed(m, enc, random_image(12, 12, 9), {6, 6}, {1, 0}).squaredNorm(), 0.0);
}

TEST(ApplyMotionMixed, MatchesTripleLoopOracle) {
  const DisplacementGrid g(-1, 1, 0.5);
  const auto support = mixing_support(2, 2);
  auto m = MotionModel::identity_mixed(3, 2, g, support);
  randomize(m, 10);
  const Encoder enc(3, 2, 4, random_matrix(6, 16, 11));
  const Image img = random_image(16, 16, 12);
  const Pos x{8, 7};
  const Vec2 delta{-0.5, 1};
  const auto out = apply_motion_mixed(m, enc, img, x, delta);
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(6);
  for (std::size_t j = 0; j < support.size(); ++j) {
    const Eigen::VectorXd v = enc.weights() * loop_patch(img, {x.x + support[j].x, x.y + support[j].y}, 4);
    for (int k = 0; k < 3; ++k) {
      const Eigen::MatrixXd mk = m.matrix(k, delta, j);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) expected(k * 2 + r) += mk(r, c) * v(k * 2 + c);
    }
  }
  EXPECT_LT((out - expected).norm(), 1e-12);
}

TEST(ApplyMotionMixed, SupportLeavingImageThrows) {
  const auto m = MotionModel::identity_mixed(2, 2, DisplacementGrid(-1, 1, 1), mixing_support(2, 2));
  const Encoder enc(2, 2, 4, random_matrix(4, 16, 8));
  EXPECT_THROW(apply_motion_mixed(m, enc, random_image(12, 12, 9), {2, 6}, {0, 0}), BoundsError);
}

TEST(RotationLoss, ZeroWhenNextEncodingIsTransformedCurrent) {
  // With an orthonormal square encoder and a tiling lattice, choose I_{t+1} so
  // that its code is exactly M(delta) v_t.
  const DisplacementGrid g(-1, 1, 1);
  auto m = MotionModel::identity_nonparametric(8, 2, g);
  randomize(m, 13);
  const Encoder enc(8, 2, 4, orthonormal(16, 14));
  const Image cur = random_image(8, 8, 15);
  const auto grid = GridSpec{4, 4}.positions(8, 8);
  const Vec2 delta{1, 0};
  const auto vt = encode(enc, cur, grid.positions);
  VectorField moved = vt;
  for (std::size_t i = 0; i < grid.size(); ++i) moved.values.col(i) = apply_motion(m, vt.values.col(i), delta);
  const Image next = decode(enc, moved, 8, 8);
  const DisplacementField field{grid, std::vector<Vec2>(grid.size(), delta)};
  EXPECT_NEAR(rotation_loss(enc, m, cur, next, field), 0.0, 1e-20);
}

TEST(RotationLoss, IdentityModelOnStaticPair) {
  const auto m = MotionModel::identity_nonparametric(4, 2, DisplacementGrid());
  const Encoder enc(4, 2, 4, random_matrix(8, 16, 16));
  const Image img = random_image(12, 12, 17);
  const auto grid = GridSpec{4, 2}.positions(12, 12);
  EXPECT_EQ(rotation_loss(enc, m, img, img, DisplacementField::zeros(grid)), 0.0);
}

TEST(RotationLoss, MatchesSummationOracle) {
  const DisplacementGrid g(-1, 1, 0.5);
  for (bool mixed : {false, true}) {
    auto m = mixed ? MotionModel::identity_mixed(3, 2, g, mixing_support(2, 2))
                   : MotionModel::identity_nonparametric(3, 2, g);
    randomize(m, 18);
    const Encoder enc(3, 2, 4, random_matrix(6, 16, 19));
    const Image cur = random_image(16, 16, 20), next = random_image(16, 16, 21);
    const auto grid = GridSpec{4, 2}.interior_positions(16, 16, mixed ? 2 : 0, 0);
    DisplacementField field = DisplacementField::zeros(grid);
    for (std::size_t i = 0; i < field.size(); ++i) field.vectors[i] = g.candidate((i * 7) % g.size());
    double expected = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Pos x = grid.positions[i];
      const Eigen::VectorXd target = enc.weights() * loop_patch(next, x, 4);
      Eigen::VectorXd pred = Eigen::VectorXd::Zero(6);
      for (std::size_t j = 0; j < m.support().size(); ++j) {
        const Pos o = m.support()[j];
        const Eigen::VectorXd v = enc.weights() * loop_patch(cur, {x.x + o.x, x.y + o.y}, 4);
        for (int k = 0; k < 3; ++k) pred.segment(k * 2, 2) += m.matrix(k, field.vectors[i], j) * v.segment(k * 2, 2);
      }
      expected += (target - pred).squaredNorm();
    }
    const double got = rotation_loss(enc, m, cur, next, field);
    EXPECT_GE(got, 0.0);
    EXPECT_NEAR(got, expected, 1e-10 * expected);
  }
}

TEST(RotationLoss, IdentityInitEqualsEncodedFrameDifference) {
  const auto m = MotionModel::identity_nonparametric(4, 2, DisplacementGrid());
  const Encoder enc(4, 2, 4, random_matrix(8, 16, 22));
  const Image cur = random_image(12, 12, 23), next = random_image(12, 12, 24);
  const auto grid = GridSpec{4, 2}.positions(12, 12);
  double expected = 0.0;
  for (const Pos& x : grid.positions) {
    expected += (enc.weights() * (loop_patch(next, x, 4) - loop_patch(cur, x, 4))).squaredNorm();
  }
  EXPECT_NEAR(rotation_loss(enc, m, cur, next, DisplacementField::zeros(grid)), expected, 1e-10 * expected);
}

TEST(ReconstructionLoss, ZeroImages) {
  const Encoder enc(4, 2, 4, random_matrix(8, 16, 25));
  EXPECT_EQ(reconstruction_loss(enc, {4, 2}, Image(12, 12), Image(12, 12)), 0.0);
}

TEST(ReconstructionLoss, OrthonormalTiling) {
  const Encoder enc(8, 2, 4, orthonormal(16, 26));
  EXPECT_NEAR(reconstruction_loss(enc, {4, 4}, random_image(12, 8, 27), random_image(12, 8, 28)), 0.0, 1e-10);
}

TEST(ReconstructionLoss, MatchesNaiveOracle) {
  const Encoder enc(4, 2, 4, random_matrix(8, 16, 29));
  const GridSpec grid{4, 2};
  const Image a = random_image(12, 10, 30), b = random_image(12, 10, 31);
  double expected = 0.0;
  for (const Image* img : {&a, &b}) {
    const auto xs = grid.positions(12, 10).positions;
    const auto rec = naive_decode(enc, encode(enc, *img, xs), 12, 10);
    expected += sq_diff(*img, rec);
  }
  EXPECT_NEAR(reconstruction_loss(enc, grid, a, b), expected, 1e-10 * expected);
}

TEST(ComplexCell, Values) {
  EXPECT_EQ(complex_cell_response(Eigen::Vector2d(0, 0)), 0.0);
  EXPECT_EQ(complex_cell_response(Eigen::Vector2d(0, 1)), 1.0);
  EXPECT_EQ(complex_cell_response(Eigen::Vector2d(3, 4)), 25.0);
}

TEST(Forward, RepeatedCallsAreBitIdentical) {
  auto m = MotionModel::identity_mixed(3, 2, DisplacementGrid(-1, 1, 0.5), mixing_support(2, 2));
  randomize(m, 32);
  const Encoder enc(3, 2, 4, random_matrix(6, 16, 33));
  const Image cur = random_image(16, 16, 34), next = random_image(16, 16, 35);
  const auto field = DisplacementField::zeros(GridSpec{4, 2}.interior_positions(16, 16, 2, 0));
  EXPECT_EQ(rotation_loss(enc, m, cur, next, field), rotation_loss(enc, m, cur, next, field));
  EXPECT_EQ(reconstruct(enc, {4, 2}, cur), reconstruct(enc, {4, 2}, cur));
}

TEST(Grid, PositionsCoverImageCorners) {
  const auto g = GridSpec{16, 8}.positions(64, 64);
  EXPECT_EQ(g.nx, 7);
  EXPECT_EQ(g.ny, 7);
  EXPECT_EQ(g.positions.front(), (Pos{8, 8}));
  EXPECT_EQ(g.positions.back(), (Pos{56, 56}));
  EXPECT_EQ(g.positions[1], (Pos{16, 8}));
}

TEST(Grid, InteriorPositionsHonourSupportAndMargin) {
  const GridSpec spec{16, 8};
  const auto g = spec.interior_positions(64, 64, 4, 8);
  for (const Pos& x : g.positions) {
    EXPECT_TRUE(spec.fits({x.x - 4, x.y - 4}, 64, 64));
    EXPECT_TRUE(spec.fits({x.x + 4, x.y + 4}, 64, 64));
    EXPECT_GE(x.x, 8);
    EXPECT_LE(x.x, 55);
  }
  EXPECT_EQ(g.nx * g.ny, static_cast<int>(g.size()));
}

TEST(DisplacementGrid, IndexAndCandidateAgree) {
  const DisplacementGrid g;
  EXPECT_EQ(g.size(), 625u);
  for (std::size_t c = 0; c < g.size(); ++c) EXPECT_EQ(g.index(g.candidate(c)), c);
  EXPECT_EQ(g.candidate(1), (Vec2{-6, -5.5}));
  EXPECT_EQ(g.round({0.3, -5.8}), (Vec2{0.5, -6}));
  EXPECT_EQ(g.round({9, -9}), (Vec2{6, -6}));
}

TEST(DisplacementGrid, SearchOrderStartsAtZeroAndIsSortedByMagnitude) {
  const DisplacementGrid g(-2, 2, 0.5);
  const auto& order = g.search_order();
  ASSERT_EQ(order.size(), g.size());
  EXPECT_EQ(g.candidate(order[0]), (Vec2{0, 0}));
  auto mag = [&](std::size_t c) { return g.candidate(c).dx * g.candidate(c).dx + g.candidate(c).dy * g.candidate(c).dy; };
  for (std::size_t i = 1; i < order.size(); ++i) {
    EXPECT_LE(mag(order[i - 1]), mag(order[i]));
    if (mag(order[i - 1]) == mag(order[i])) EXPECT_LT(order[i - 1], order[i]);
  }
}

TEST(MixingSupport, Shape) {
  const auto s = mixing_support(4, 2);
  EXPECT_EQ(s.size(), 25u);
  EXPECT_EQ(s.front(), (Pos{-4, -4}));
  EXPECT_EQ(s[1], (Pos{-2, -4}));
  EXPECT_EQ(support_radius(s), 4);
  EXPECT_EQ(mixing_support(0, 1).size(), 1u);
  EXPECT_THROW(mixing_support(3, 2), ConfigError);
}
