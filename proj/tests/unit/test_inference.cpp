#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "v1motion/common/error.hpp"
#include "v1motion/infer/alignment.hpp"
#include "v1motion/infer/animation.hpp"
#include "v1motion/infer/field_io.hpp"
#include "v1motion/infer/grid_inference.hpp"
#include "v1motion/infer/parametric_inference.hpp"
#include "v1motion/model/forward.hpp"

using namespace v1motion;
using namespace v1motion::model;
using namespace v1motion::infer;
using v1motion::testing::orthonormal;
using v1motion::testing::random_image;
using v1motion::testing::random_matrix;
using v1motion::testing::randomize;
using v1motion::testing::scratch_dir;

namespace {

double field_variance(const DisplacementField& f) {
  double mx = 0, my = 0;
  for (const auto& v : f.vectors) {
    mx += v.dx;
    my += v.dy;
  }
  mx /= static_cast<double>(f.size());
  my /= static_cast<double>(f.size());
  double s = 0;
  for (const auto& v : f.vectors) s += (v.dx - mx) * (v.dx - mx) + (v.dy - my) * (v.dy - my);
  return s / static_cast<double>(f.size());
}

MotionModel random_parametric(int K, int d, std::uint64_t seed, double scale = 0.2) {
  auto m = MotionModel::zero_parametric(K, d, DisplacementGrid(-2, 2, 0.5));
  randomize(m, seed, scale);
  return m;
}

}  // namespace

TEST(InferGrid, StaticPairWithStrictlyBestIdentityGivesZeroField) {
  auto m = MotionModel::identity_nonparametric(4, 2, DisplacementGrid(-2, 2, 0.5));
  for (std::size_t c = 0; c < m.grid().size(); ++c) {
    if (m.grid().candidate(c) == Vec2{0, 0}) continue;
    for (int k = 0; k < 4; ++k) m.block(c, 0, k) *= 0.5;
  }
  const Encoder enc(4, 2, 8, random_matrix(8, 64, 1));
  const Image img = random_image(40, 40, 2);
  InferConfig cfg;
  cfg.margin = 0;
  const auto f = infer_grid(enc, m, GridSpec{8, 4}, img, img, cfg);
  EXPECT_GT(f.size(), 0u);
  for (const auto& v : f.vectors) EXPECT_EQ(v, (Vec2{0, 0}));
}

TEST(InferGrid, ReturnsExhaustiveArgminWithSmallestDisplacementTieBreak) {
  for (bool mixing : {true, false}) {
    auto m = MotionModel::identity_mixed(3, 2, DisplacementGrid(-1, 1, 0.5), mixing_support(2, 2));
    randomize(m, 3, 0.5);
    const Encoder enc(3, 2, 8, random_matrix(6, 64, 4, 0.2));
    const Image cur = random_image(40, 40, 5), next = random_image(40, 40, 6);
    InferConfig cfg;
    cfg.margin = 4;
    cfg.mixing = mixing;
    const auto f = infer_grid(enc, m, GridSpec{8, 4}, cur, next, cfg);
    const auto nb = encode_neighborhoods(enc, cur, f.positions(), m.support(),
                                         mixing ? BoundaryMode::Strict : BoundaryMode::Clamp);
    const auto targets = encode(enc, next, f.positions());
    const auto& order = m.grid().search_order();
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::size_t chosen = m.grid().index(f.vectors[i]);
      const double r = candidate_residual(m, nb, targets.values.col(i), i, chosen, mixing);
      const auto pos = std::find(order.begin(), order.end(), chosen) - order.begin();
      for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const double other = candidate_residual(m, nb, targets.values.col(i), i, order[rank], mixing);
        if (static_cast<std::ptrdiff_t>(rank) < pos) EXPECT_GT(other, r);
        else EXPECT_GE(other, r);
      }
    }
  }
}

TEST(InferGrid, ResidualMatchesDirectPrediction) {
  auto m = MotionModel::identity_mixed(3, 2, DisplacementGrid(-1, 1, 1), mixing_support(2, 2));
  randomize(m, 7);
  const Encoder enc(3, 2, 8, random_matrix(6, 64, 8, 0.2));
  const Image cur = random_image(32, 32, 9), next = random_image(32, 32, 10);
  const std::vector<Pos> xs = {{12, 12}, {16, 20}};
  const auto nb = encode_neighborhoods(enc, cur, xs, m.support(), BoundaryMode::Strict);
  const auto targets = encode(enc, next, xs);
  for (std::size_t c = 0; c < m.grid().size(); ++c) {
    const Eigen::VectorXd pred = apply_motion_mixed(m, enc, cur, xs[1], m.grid().candidate(c));
    EXPECT_NEAR(candidate_residual(m, nb, targets.values.col(1), 1, c, true),
                (targets.values.col(1) - pred).squaredNorm(), 1e-10);
  }
}

TEST(InferGrid, IndependentOfThreadCount) {
  auto m = MotionModel::identity_mixed(3, 2, DisplacementGrid(-2, 2, 0.5), mixing_support(2, 2));
  randomize(m, 11);
  const Encoder enc(3, 2, 8, random_matrix(6, 64, 12, 0.2));
  const Image cur = random_image(48, 48, 13), next = random_image(48, 48, 14);
  InferConfig a;
  a.threads = 1;
  InferConfig b = a;
  b.threads = 4;
  const auto fa = infer_grid(enc, m, GridSpec{8, 4}, cur, next, a);
  const auto fb = infer_grid(enc, m, GridSpec{8, 4}, cur, next, b);
  EXPECT_EQ(fa.vectors, fb.vectors);
  EXPECT_EQ(fa.positions(), fb.positions());
}

TEST(InferGrid, PositionsRespectMarginAndSupport) {
  const auto m = MotionModel::identity_mixed(2, 2, DisplacementGrid(-1, 1, 1), mixing_support(4, 2));
  InferConfig cfg;
  const auto g = inference_positions(GridSpec{16, 8}, m, 64, 64, cfg);
  ASSERT_GT(g.size(), 0u);
  const GridSpec spec{16, 8};
  for (const Pos& x : g.positions) {
    EXPECT_TRUE(spec.fits({x.x - 4, x.y - 4}, 64, 64));
    EXPECT_TRUE(spec.fits({x.x + 4, x.y + 4}, 64, 64));
  }
  cfg.mixing = false;
  EXPECT_GT(inference_positions(GridSpec{16, 8}, m, 64, 64, cfg).size(), g.size());
}

TEST(InferGrid, ParametricModelIsRejected) {
  const auto m = MotionModel::zero_parametric(2, 2, DisplacementGrid());
  const Encoder enc(2, 2, 8, random_matrix(4, 64, 1));
  const Image img(32, 32);
  EXPECT_THROW(infer_grid(enc, m, GridSpec{8, 4}, img, img), ShapeError);
}

TEST(InferParametric, IdenticalFramesFromZeroStayAtZero) {
  const auto m = random_parametric(3, 2, 15);
  const Encoder enc(3, 2, 8, random_matrix(6, 64, 16, 0.2));
  const Image img = random_image(40, 40, 17);
  InferConfig cfg;
  cfg.margin = 4;
  const auto positions = inference_positions(GridSpec{8, 4}, m, 40, 40, cfg);
  const auto init = DisplacementField::zeros(positions);
  const auto r = infer_parametric_detailed(enc, m, GridSpec{8, 4}, img, img, cfg, &init);
  for (const auto& v : r.field.vectors) {
    EXPECT_NEAR(v.dx, 0.0, 1e-9);
    EXPECT_NEAR(v.dy, 0.0, 1e-9);
  }
  EXPECT_TRUE(r.converged);
}

TEST(InferParametric, ObjectiveDecreasesMonotonically) {
  const auto m = random_parametric(3, 2, 18);
  const Encoder enc(3, 2, 8, random_matrix(6, 64, 19, 0.2));
  const Image cur = random_image(40, 40, 20), next = random_image(40, 40, 21);
  InferConfig cfg;
  cfg.margin = 4;
  cfg.smoothness = 0.1;
  const auto r = infer_parametric_detailed(enc, m, GridSpec{8, 4}, cur, next, cfg);
  ASSERT_GE(r.objective.size(), 2u);
  for (std::size_t i = 1; i < r.objective.size(); ++i) EXPECT_LT(r.objective[i], r.objective[i - 1]);
  for (const auto& v : r.field.vectors) {
    EXPECT_LE(std::abs(v.dx), 2.0);
    EXPECT_LE(std::abs(v.dy), 2.0);
  }
}

TEST(InferParametric, GradientMatchesCentralDifferences) {
  const auto m = random_parametric(3, 2, 22, 0.3);
  const Encoder enc(3, 2, 8, random_matrix(6, 64, 23, 0.2));
  const Image cur = random_image(32, 32, 24), next = random_image(32, 32, 25);
  const auto positions = GridSpec{8, 4}.interior_positions(32, 32, 0, 4);
  const auto problem = make_problem(enc, cur, next, positions);
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec2> field(positions.size());
  for (auto& v : field) v = {u(rng), u(rng)};
  const double lambda = 0.7;
  const auto grad = parametric_gradient(m, problem, field, lambda);
  const double h = 1e-6;
  for (std::size_t i = 0; i < field.size(); i += 3) {
    for (int axis = 0; axis < 2; ++axis) {
      auto plus = field, minus = field;
      (axis ? plus[i].dy : plus[i].dx) += h;
      (axis ? minus[i].dy : minus[i].dx) -= h;
      const double numeric =
          (parametric_objective(m, problem, plus, lambda) - parametric_objective(m, problem, minus, lambda)) / (2 * h);
      const double analytic = axis ? grad[i].dy : grad[i].dx;
      EXPECT_NEAR(analytic, numeric, 1e-5 * std::max(1.0, std::abs(numeric)));
    }
  }
}

TEST(InferParametric, LargerSmoothnessShrinksFieldVariance) {
  const auto m = random_parametric(4, 2, 27, 0.3);
  const Encoder enc(4, 2, 8, random_matrix(8, 64, 28, 0.2));
  const Image cur = random_image(48, 48, 29), next = random_image(48, 48, 30);
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : {0.0, 1.0, 10.0, 100.0, 1000.0}) {
    InferConfig cfg;
    cfg.margin = 4;
    cfg.smoothness = lambda;
    cfg.max_iterations = 2000;
    const double var = field_variance(infer_parametric(enc, m, GridSpec{8, 4}, cur, next, cfg));
    EXPECT_LT(var, previous) << "lambda " << lambda;
    previous = var;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(InferParametric, SeededAndDeterministic) {
  const auto m = random_parametric(2, 2, 31);
  const Encoder enc(2, 2, 8, random_matrix(4, 64, 32, 0.2));
  const Image cur = random_image(32, 32, 33), next = random_image(32, 32, 34);
  InferConfig cfg;
  cfg.margin = 4;
  EXPECT_EQ(infer_parametric(enc, m, GridSpec{8, 4}, cur, next, cfg).vectors,
            infer_parametric(enc, m, GridSpec{8, 4}, cur, next, cfg).vectors);
}

TEST(Animate, EmptyFieldListGivesNoFrames) {
  const auto m = MotionModel::identity_nonparametric(2, 2, DisplacementGrid());
  const Encoder enc(2, 2, 4, random_matrix(4, 16, 35));
  EXPECT_TRUE(animate(enc, m, GridSpec{4, 2}, random_image(16, 16, 36), {}).empty());
}

TEST(Animate, ZeroFieldsIterateReconstruction) {
  const auto m = MotionModel::identity_mixed(3, 2, DisplacementGrid(-1, 1, 1), mixing_support(2, 2));
  const Encoder enc(3, 2, 4, random_matrix(6, 16, 37, 0.3));
  const GridSpec grid{4, 2};
  const Image first = random_image(16, 16, 38);
  const auto zeros = DisplacementField::zeros(grid.positions(16, 16));
  const std::vector<DisplacementField> fields(3, zeros);
  const auto frames = animate(enc, m, grid, first, fields);
  ASSERT_EQ(frames.size(), 3u);
  Image expected = first;
  for (const auto& f : frames) {
    expected = reconstruct(enc, grid, expected);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(f.samples()[i], expected.samples()[i], 1e-12);
  }
}

TEST(Animate, TightFrameDriftIsNegligible) {
  const auto m = MotionModel::identity_nonparametric(8, 2, DisplacementGrid(-1, 1, 1));
  const Encoder enc(8, 2, 4, orthonormal(16, 39));
  const GridSpec grid{4, 4};
  const Image first = random_image(16, 16, 40);
  const std::vector<DisplacementField> fields(4, DisplacementField::zeros(grid.positions(16, 16)));
  const auto frames = animate(enc, m, grid, first, fields);
  Image prev = first;
  for (const auto& f : frames) {
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_LT(std::abs(f.samples()[i] - prev.samples()[i]), 1e-10);
    prev = f;
  }
}

TEST(Animate, FieldOffTheLatticeThrows) {
  const auto m = MotionModel::identity_nonparametric(2, 2, DisplacementGrid());
  const Encoder enc(2, 2, 4, random_matrix(4, 16, 41));
  const std::vector<DisplacementField> fields = {DisplacementField::zeros(GridSpec{4, 4}.positions(16, 16))};
  EXPECT_THROW(animate(enc, m, GridSpec{4, 2}, random_image(16, 16, 42), fields), ShapeError);
}

TEST(Interpolate, IdenticalEndpointsSucceedWithoutSteps) {
  const auto m = MotionModel::identity_nonparametric(2, 2, DisplacementGrid(-1, 1, 1));
  const Encoder enc(2, 2, 4, random_matrix(4, 16, 43));
  const Image img = random_image(16, 16, 44);
  const auto r = interpolate_frames(enc, m, GridSpec{4, 2}, img, img);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.frames.size(), 1u);
  EXPECT_TRUE(r.fields.empty());
}

TEST(Interpolate, StopsAfterMaxSteps) {
  const auto m = MotionModel::identity_nonparametric(2, 2, DisplacementGrid(-1, 1, 1));
  const Encoder enc(2, 2, 4, random_matrix(4, 16, 45, 0.1));
  const auto r = interpolate_frames(enc, m, GridSpec{4, 2}, Image(16, 16, 0.0), Image(16, 16, 1.0), 3);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.fields.size(), 3u);
  EXPECT_EQ(r.frames.size(), 4u);
}

TEST(Alignment, SingleFrameReturnsItsEncoding) {
  const auto m = random_parametric(3, 2, 46);
  const std::vector<Eigen::VectorXd> v = {random_matrix(6, 1, 47)};
  EXPECT_EQ(align_recurrent(m, v, {1, -1}).u, v[0]);
}

TEST(Alignment, IdentityMotionSumsEncodings) {
  const auto m = MotionModel::identity_nonparametric(3, 2, DisplacementGrid(-1, 1, 1));
  std::vector<Eigen::VectorXd> v;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(6);
  for (int i = 0; i < 4; ++i) {
    v.push_back(random_matrix(6, 1, 48 + i));
    sum += v.back();
  }
  EXPECT_LT((align_recurrent(m, v, {1, 0}).u - sum).norm(), 1e-14);
}

TEST(Alignment, RecurrentMatchesMatrixPowerFormula) {
  const auto m = random_parametric(3, 2, 52, 0.3);
  std::vector<Eigen::VectorXd> v;
  for (int i = 0; i <= 3; ++i) v.push_back(random_matrix(6, 1, 53 + i));
  const Vec2 delta{0.5, -1.5};
  Eigen::VectorXd direct = Eigen::VectorXd::Zero(6);
  for (int k = 0; k < 3; ++k) {
    const Eigen::MatrixXd mk = m.matrix(k, delta);
    for (int i = 0; i <= 3; ++i) {
      Eigen::MatrixXd power = Eigen::MatrixXd::Identity(2, 2);
      for (int e = 0; e < 3 - i; ++e) power = power * mk;
      direct.segment(k * 2, 2) += power * v[i].segment(k * 2, 2);
    }
  }
  const auto r = align_recurrent(m, v, delta);
  EXPECT_LT((r.u - direct).norm(), 1e-10);
  EXPECT_DOUBLE_EQ(r.score, r.u.squaredNorm());
}

TEST(Alignment, HorizonIsEnforced) {
  const auto m = random_parametric(1, 2, 57);
  AlignmentState s(m, {0, 0}, 1);
  s.push(Eigen::Vector2d(1, 0));
  s.push(Eigen::Vector2d(0, 1));
  EXPECT_EQ(s.step(), 1);
  EXPECT_THROW(s.push(Eigen::Vector2d(0, 0)), ConfigError);
}

TEST(EstimateVelocity, SingleFrameTieResolvesToZero) {
  const auto m = MotionModel::identity_nonparametric(3, 2, DisplacementGrid(-2, 2, 0.5));
  const Encoder enc(3, 2, 8, random_matrix(6, 64, 58));
  const std::vector<Image> frames = {random_image(24, 24, 59)};
  EXPECT_EQ(estimate_velocity(enc, m, frames, {12, 12}), (Vec2{0, 0}));
}

TEST(EstimateVelocity, MatchesBruteForceScoring) {
  auto m = MotionModel::identity_nonparametric(3, 2, DisplacementGrid(-1, 1, 0.5));
  randomize(m, 60);
  const Encoder enc(3, 2, 8, random_matrix(6, 64, 61, 0.2));
  std::vector<Image> frames;
  for (int i = 0; i < 4; ++i) frames.push_back(random_image(24, 24, 62 + i));
  const Pos x{12, 12};
  double best = -1;
  Vec2 arg{};
  for (std::size_t c = 0; c < m.grid().size(); ++c) {
    const double s = align_recurrent(enc, m, frames, x, m.grid().candidate(c)).score;
    if (s > best) {
      best = s;
      arg = m.grid().candidate(c);
    }
  }
  EXPECT_EQ(estimate_velocity(enc, m, frames, x), arg);
}

TEST(FieldIo, BinaryRoundTripIsExact) {
  const auto lattice = GridSpec{16, 8}.interior_positions(64, 48, 4, 8);
  DisplacementField f = DisplacementField::zeros(lattice);
  for (std::size_t i = 0; i < f.size(); ++i) f.vectors[i] = {0.5 * static_cast<double>(i % 7) - 1.5, -0.25 * static_cast<double>(i)};
  const auto dir = scratch_dir("field_io");
  write_field(dir / "f.v1fd", {f, 64, 48});
  const auto back = read_field(dir / "f.v1fd");
  EXPECT_EQ(back.width, 64);
  EXPECT_EQ(back.height, 48);
  EXPECT_EQ(back.field.positions(), f.positions());
  EXPECT_EQ(back.field.vectors, f.vectors);
  EXPECT_EQ(back.field.grid.nx, f.grid.nx);
}

TEST(FieldIo, BadMagicAndTruncation) {
  const auto lattice = GridSpec{16, 8}.positions(32, 32);
  const auto dir = scratch_dir("field_io_bad");
  write_field(dir / "f.v1fd", {DisplacementField::zeros(lattice), 32, 32});
  {
    std::fstream io(dir / "f.v1fd", std::ios::in | std::ios::out | std::ios::binary);
    io.put('Z');
  }
  EXPECT_THROW(read_field(dir / "f.v1fd"), FormatError);
  write_field(dir / "g.v1fd", {DisplacementField::zeros(lattice), 32, 32});
  std::filesystem::resize_file(dir / "g.v1fd", 30);
  EXPECT_THROW(read_field(dir / "g.v1fd"), FormatError);
}

TEST(FieldIo, TextDumpHasOneLinePerPosition) {
  const auto lattice = GridSpec{16, 8}.positions(32, 32);
  DisplacementField f = DisplacementField::zeros(lattice);
  f.vectors[0] = {1.5, -2};
  const auto dir = scratch_dir("field_text");
  write_field_text(dir / "f.txt", f);
  std::ifstream in(dir / "f.txt");
  int x, y;
  double dx, dy;
  std::size_t lines = 0;
  while (in >> x >> y >> dx >> dy) {
    if (lines == 0) {
      EXPECT_EQ(x, lattice.positions[0].x);
      EXPECT_EQ(dx, 1.5);
      EXPECT_EQ(dy, -2.0);
    }
    ++lines;
  }
  EXPECT_EQ(lines, f.size());
}

TEST(InferConfig, JsonRejectsUnknownKeys) {
  InferConfig cfg;
  cfg.smoothness = 0.5;
  InferConfig back;
  update_from_json(back, to_json(cfg));
  EXPECT_EQ(back.smoothness, 0.5);
  EXPECT_THROW(update_from_json(back, nlohmann::json{{"smoothnes", 1}}), ConfigError);
  EXPECT_THROW(update_from_json(back, nlohmann::json{{"margin", -1}}), ConfigError);
}
