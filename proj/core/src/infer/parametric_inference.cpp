#include "v1motion/infer/parametric_inference.hpp"

#include <algorithm>
#include <cmath>

#include "v1motion/common/error.hpp"
#include "v1motion/common/parallel.hpp"
#include "v1motion/common/rng.hpp"
#include "v1motion/infer/grid_inference.hpp"
#include "v1motion/model/forward.hpp"

namespace v1motion::infer {

ParametricProblem make_problem(const model::Encoder& enc, const model::Image& current, const model::Image& next,
                               const model::PositionGrid& positions) {
  if (!current.same_dims(next)) throw ShapeError("frames differ in size");
  return {positions, model::encode(enc, current, positions.positions).values,
          model::encode(enc, next, positions.positions).values};
}

namespace {

void check(const model::MotionModel& motion, const ParametricProblem& problem, std::size_t n) {
  if (!motion.parametric()) throw ShapeError("parametric inference needs a parametric model");
  if (problem.source.rows() != static_cast<Eigen::Index>(motion.num_blocks()) * motion.block_dim())
    throw ShapeError("encodings do not match the motion model");
  if (n != problem.positions.size()) throw ShapeError("field and lattice sizes differ");
}

// Visits each forward-difference edge (a, b) of the lattice.
template <class F>
void for_each_edge(const model::PositionGrid& g, F&& f) {
  for (int r = 0; r < g.ny; ++r) {
    for (int c = 0; c < g.nx; ++c) {
      const std::size_t a = static_cast<std::size_t>(r) * g.nx + c;
      if (c + 1 < g.nx) f(a, a + 1);
      if (r + 1 < g.ny) f(a, a + static_cast<std::size_t>(g.nx));
    }
  }
}

// Residual t - M(delta) v at position i.
Eigen::VectorXd residual(const model::MotionModel& motion, const ParametricProblem& p, std::size_t i, model::Vec2 delta) {
  const int d = motion.block_dim();
  const auto col = static_cast<Eigen::Index>(i);
  Eigen::VectorXd r = p.target.col(col);
  for (int k = 0; k < motion.num_blocks(); ++k)
    r.segment(k * d, d).noalias() -= motion.matrix(k, delta) * p.source.col(col).segment(k * d, d);
  return r;
}

}  // namespace

double parametric_objective(const model::MotionModel& motion, const ParametricProblem& problem,
                            const std::vector<model::Vec2>& field, double smoothness) {
  check(motion, problem, field.size());
  double data = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) data += residual(motion, problem, i, field[i]).squaredNorm();
  double smooth = 0.0;
  for_each_edge(problem.positions, [&](std::size_t a, std::size_t b) {
    const double ex = field[a].dx - field[b].dx;
    const double ey = field[a].dy - field[b].dy;
    smooth += ex * ex + ey * ey;
  });
  return data + smoothness * smooth;
}

std::vector<model::Vec2> parametric_gradient(const model::MotionModel& motion, const ParametricProblem& problem,
                                             const std::vector<model::Vec2>& field, double smoothness) {
  check(motion, problem, field.size());
  const int d = motion.block_dim();
  std::vector<model::Vec2> grad(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Eigen::VectorXd r = residual(motion, problem, i, field[i]);
    const auto gx = model::taylor_basis_ddx(field[i]);
    const auto gy = model::taylor_basis_ddy(field[i]);
    double sx = 0.0;
    double sy = 0.0;
    for (int k = 0; k < motion.num_blocks(); ++k) {
      const Eigen::VectorXd v = problem.source.col(static_cast<Eigen::Index>(i)).segment(k * d, d);
      const auto rk = r.segment(k * d, d);
      for (int t = 0; t < model::kTaylorTerms; ++t) {
        if (gx[static_cast<std::size_t>(t)] == 0.0 && gy[static_cast<std::size_t>(t)] == 0.0) continue;
        const double q = rk.dot(motion.taylor(k, t) * v);
        sx += gx[static_cast<std::size_t>(t)] * q;
        sy += gy[static_cast<std::size_t>(t)] * q;
      }
    }
    grad[i] = {-2.0 * sx, -2.0 * sy};
  }
  if (smoothness > 0.0) {
    for_each_edge(problem.positions, [&](std::size_t a, std::size_t b) {
      const double ex = 2.0 * smoothness * (field[a].dx - field[b].dx);
      const double ey = 2.0 * smoothness * (field[a].dy - field[b].dy);
      grad[a].dx += ex;
      grad[a].dy += ey;
      grad[b].dx -= ex;
      grad[b].dy -= ey;
    });
  }
  return grad;
}

ParametricResult infer_parametric_detailed(const model::Encoder& enc, const model::MotionModel& motion,
                                           const model::GridSpec& grid, const model::Image& current,
                                           const model::Image& next, const InferConfig& cfg,
                                           const model::DisplacementField* init) {
  cfg.validate();
  if (!motion.parametric()) throw ShapeError("parametric inference needs a parametric model");
  InferConfig plain = cfg;
  plain.mixing = false;
  const auto positions = inference_positions(grid, motion, current.width(), current.height(), plain);
  const ParametricProblem problem = make_problem(enc, current, next, positions);
  const double lo = motion.grid().lo();
  const double hi = motion.grid().hi();

  std::vector<model::Vec2> field(positions.size());
  if (init) {
    if (init->positions() != positions.positions) throw ShapeError("initial field lattice differs from the inference lattice");
    field = init->vectors;
  } else {
    Rng rng = make_rng(cfg.seed, 0x1AF);
    for (auto& v : field) {
      v.dx = uniform(rng, -0.5, 0.5);
      v.dy = uniform(rng, -0.5, 0.5);
    }
  }
  for (auto& v : field) v = {std::clamp(v.dx, lo, hi), std::clamp(v.dy, lo, hi)};

  ParametricResult result;
  result.field.grid = positions;
  double value = parametric_objective(motion, problem, field, cfg.smoothness);
  result.objective.push_back(value);
  if (!std::isfinite(value)) {
    result.diverged = true;
    result.field.vectors = field;
    return result;
  }

  double step = cfg.step_size;
  std::vector<model::Vec2> trial(field.size());
  for (int it = 0; it < cfg.max_iterations && !field.empty(); ++it) {
    const auto grad = parametric_gradient(motion, problem, field, cfg.smoothness);
    bool accepted = false;
    double moved = 0.0;
    while (step > 1e-14) {
      moved = 0.0;
      for (std::size_t i = 0; i < field.size(); ++i) {
        trial[i] = {std::clamp(field[i].dx - step * grad[i].dx, lo, hi),
                    std::clamp(field[i].dy - step * grad[i].dy, lo, hi)};
        moved += std::hypot(trial[i].dx - field[i].dx, trial[i].dy - field[i].dy);
      }
      const double candidate = parametric_objective(motion, problem, trial, cfg.smoothness);
      if (std::isfinite(candidate) && candidate < value) {
        value = candidate;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.converged = true;
      break;
    }
    field.swap(trial);
    result.objective.push_back(value);
    result.iterations = it + 1;
    step *= 2.0;
    if (moved / static_cast<double>(field.size()) < cfg.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.field.vectors = std::move(field);
  return result;
}

model::DisplacementField infer_parametric(const model::Encoder& enc, const model::MotionModel& motion,
                                          const model::GridSpec& grid, const model::Image& current,
                                          const model::Image& next, const InferConfig& cfg,
                                          const model::DisplacementField* init) {
  return infer_parametric_detailed(enc, motion, grid, current, next, cfg, init).field;
}

}  // namespace v1motion::infer
