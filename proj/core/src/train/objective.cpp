#include "v1motion/train/objective.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "v1motion/common/error.hpp"
#include "v1motion/common/parallel.hpp"
#include "v1motion/model/forward.hpp"

namespace v1motion::train {

using model::BoundaryMode;
using model::Encoder;
using model::MotionModel;
using model::Pos;

namespace {

/// Gradient contributions of a single triplet. Motion gradients of
/// non-parametric models are kept per touched candidate.
struct PairResult {
  double rotation = 0.0;
  double reconstruction = 0.0;
  double norm = 0.0;
  Eigen::MatrixXd d_weights;
  std::map<std::size_t, std::vector<double>> d_candidates;
  std::vector<double> d_taylor;
};

void add_reconstruction(const Encoder& enc, const model::GridSpec& grid, const model::Image& image, double weight,
                        bool with_grad, PairResult& out) {
  const auto lattice = grid.positions(image.width(), image.height());
  const int p = enc.patch();
  const Eigen::MatrixXd patches = model::patch_matrix(image, lattice.positions, p);
  model::VectorField v;
  v.positions = lattice.positions;
  v.num_blocks = enc.num_blocks();
  v.block_dim = enc.block_dim();
  v.values.noalias() = enc.weights() * patches;
  const model::Image rec = model::decode(enc, v, image.width(), image.height());

  std::vector<double> residual(image.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < residual.size(); ++i) {
    residual[i] = image.samples()[i] - rec.samples()[i];
    sum += residual[i] * residual[i];
  }
  out.reconstruction += sum;
  if (!with_grad || weight == 0.0) return;

  // dL/dI_hat = -2 R; gathered per patch.
  Eigen::MatrixXd g(patches.rows(), patches.cols());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const Pos x = lattice.positions[i];
    const int x0 = x.x - p / 2;
    const int y0 = x.y - p / 2;
    double* col = g.col(static_cast<Eigen::Index>(i)).data();
    for (int r = 0; r < p; ++r) {
      for (int c = 0; c < p; ++c) {
        col[r * p + c] = -2.0 * weight * residual[static_cast<std::size_t>(y0 + r) * image.width() + x0 + c];
      }
    }
  }
  // d/dW of g^T W^T W P = (W P) g^T + (W g) P^T
  out.d_weights.noalias() += v.values * g.transpose();
  out.d_weights.noalias() += (enc.weights() * g) * patches.transpose();
}

PairResult pair_objective(const Encoder& enc, const MotionModel& motion, const model::GridSpec& grid,
                          const Triplet& t, const LossWeights& w, bool with_grad) {
  const auto& positions = t.field->positions();
  if (!t.current->same_dims(*t.next)) throw ShapeError("frames differ in size");
  const int K = motion.num_blocks();
  const int d = motion.block_dim();
  const int p = enc.patch();
  const std::size_t S = motion.support().size();
  const std::size_t dd = static_cast<std::size_t>(d) * d;

  PairResult out;
  if (with_grad) {
    out.d_weights = Eigen::MatrixXd::Zero(enc.rows(), enc.cols());
    if (motion.parametric()) out.d_taylor.assign(motion.params().size(), 0.0);
  }

  if (!positions.empty()) {
    const Eigen::MatrixXd next_patches = model::patch_matrix(*t.next, positions, p);
    const Eigen::MatrixXd target = enc.weights() * next_patches;
    const auto nb = model::encode_neighborhoods(enc, *t.current, positions, motion.support(), BoundaryMode::Strict,
                                                with_grad);
    const Eigen::MatrixXd& vt = nb.lattice.values;

    Eigen::MatrixXd g_next;
    Eigen::MatrixXd g_cur;
    if (with_grad) {
      g_next = Eigen::MatrixXd::Zero(target.rows(), target.cols());
      g_cur = Eigen::MatrixXd::Zero(vt.rows(), vt.cols());
    }

    Eigen::MatrixXd m(d, d);
    Eigen::VectorXd pred(d), r(d), gm(d);
    for (std::size_t i = 0; i < positions.size(); ++i) {
      const model::Vec2 delta = t.field->vectors[i];
      const auto vn = target.col(static_cast<Eigen::Index>(i));
      std::size_t candidate = 0;
      std::array<double, model::kTaylorTerms> phi{};
      std::vector<double>* cand_grad = nullptr;
      if (motion.parametric()) {
        phi = model::taylor_basis(delta);
      } else {
        candidate = motion.grid().index(delta);
        if (with_grad) {
          auto& slot = out.d_candidates[candidate];
          if (slot.empty()) slot.assign(motion.candidate_stride(), 0.0);
          cand_grad = &slot;
        }
      }
      const std::size_t center_col = nb.at(i, motion.parametric() ? 0 : motion.center_offset());

      for (int k = 0; k < K; ++k) {
        const auto vc = vt.col(static_cast<Eigen::Index>(center_col)).segment(k * d, d);
        if (motion.parametric()) {
          m.setIdentity();
          for (int b = 0; b < model::kTaylorTerms; ++b) m += phi[b] * motion.taylor(k, b);
          pred.noalias() = m * vc;
        } else {
          pred.setZero();
          for (std::size_t j = 0; j < S; ++j) {
            pred.noalias() += motion.block(candidate, j, k) *
                              vt.col(static_cast<Eigen::Index>(nb.at(i, j))).segment(k * d, d);
          }
        }
        r = vn.segment(k * d, d) - pred;
        out.rotation += r.squaredNorm();
        const double q = pred.squaredNorm() - vc.squaredNorm();
        out.norm += q * q;
        if (!with_grad) continue;

        // dLoss/dpred: rotation term -2 w r, norm term 4 w q pred.
        gm = -2.0 * w.rotation * r + 4.0 * w.norm * q * pred;
        g_next.col(static_cast<Eigen::Index>(i)).segment(k * d, d) += 2.0 * w.rotation * r;
        g_cur.col(static_cast<Eigen::Index>(center_col)).segment(k * d, d) -= 4.0 * w.norm * q * vc;

        if (motion.parametric()) {
          g_cur.col(static_cast<Eigen::Index>(center_col)).segment(k * d, d).noalias() += m.transpose() * gm;
          // dLoss/dM = gm vc^T, and dM/dB_b = phi_b.
          for (int b = 0; b < model::kTaylorTerms; ++b) {
            double* db = out.d_taylor.data() + motion.taylor_offset(k, b);
            for (int col = 0; col < d; ++col) {
              for (int row = 0; row < d; ++row) db[col * d + row] += phi[b] * gm(row) * vc(col);
            }
          }
        } else {
          for (std::size_t j = 0; j < S; ++j) {
            const std::size_t lc = nb.at(i, j);
            const auto vj = vt.col(static_cast<Eigen::Index>(lc)).segment(k * d, d);
            g_cur.col(static_cast<Eigen::Index>(lc)).segment(k * d, d).noalias() +=
                motion.block(candidate, j, k).transpose() * gm;
            double* db = cand_grad->data() + (j * K + k) * dd;
            for (int col = 0; col < d; ++col) {
              for (int row = 0; row < d; ++row) db[col * d + row] += gm(row) * vj(col);
            }
          }
        }
      }
    }

    if (with_grad) {
      out.d_weights.noalias() += g_next * next_patches.transpose();
      out.d_weights.noalias() += g_cur * nb.patches.transpose();
    }
  }

  add_reconstruction(enc, grid, *t.current, w.reconstruction, with_grad, out);
  add_reconstruction(enc, grid, *t.next, w.reconstruction, with_grad, out);
  return out;
}

GradientBundle run(const Encoder& enc, const MotionModel& motion, const model::GridSpec& grid,
                   std::span<const Triplet> batch, const LossWeights& weights, int threads, bool with_grad) {
  if (batch.empty()) throw ShapeError("objective needs a non-empty batch");
  if (enc.num_blocks() != motion.num_blocks() || enc.block_dim() != motion.block_dim()) {
    throw ShapeError("encoder and motion model disagree on K or d");
  }

  std::vector<PairResult> parts(batch.size());
  parallel_for(batch.size(), threads,
               [&](std::size_t b) { parts[b] = pair_objective(enc, motion, grid, batch[b], weights, with_grad); });

  GradientBundle out;
  const double scale = 1.0 / static_cast<double>(batch.size());
  if (with_grad) {
    out.d_weights = Eigen::MatrixXd::Zero(enc.rows(), enc.cols());
    out.d_motion.assign(motion.params().size(), 0.0);
  }
  // Fixed reduction order: batch index, then candidate index.
  for (const PairResult& part : parts) {
    out.rotation += part.rotation;
    out.reconstruction += part.reconstruction;
    out.norm += part.norm;
    if (!with_grad) continue;
    out.d_weights += part.d_weights;
    if (motion.parametric()) {
      for (std::size_t i = 0; i < part.d_taylor.size(); ++i) out.d_motion[i] += part.d_taylor[i];
    } else {
      for (const auto& [candidate, g] : part.d_candidates) {
        double* dst = out.d_motion.data() + candidate * motion.candidate_stride();
        for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
      }
    }
  }
  out.rotation *= scale;
  out.reconstruction *= scale;
  out.norm *= scale;
  out.loss = weights.rotation * out.rotation + weights.reconstruction * out.reconstruction + weights.norm * out.norm;
  if (with_grad) {
    out.d_weights *= scale;
    for (double& g : out.d_motion) g *= scale;
  }

  if (!std::isfinite(out.loss)) {
    std::ostringstream msg;
    msg << "objective is not finite (rotation=" << out.rotation << ", reconstruction=" << out.reconstruction
        << ", norm=" << out.norm << ")";
    throw NumericError(msg.str());
  }
  return out;
}

}  // namespace

GradientBundle grad_total(const Encoder& enc, const MotionModel& motion, const model::GridSpec& grid,
                          std::span<const Triplet> batch, const LossWeights& weights, int threads) {
  return run(enc, motion, grid, batch, weights, threads, true);
}

GradientBundle evaluate_objective(const Encoder& enc, const MotionModel& motion, const model::GridSpec& grid,
                                  std::span<const Triplet> batch, const LossWeights& weights, int threads) {
  return run(enc, motion, grid, batch, weights, threads, false);
}

}  // namespace v1motion::train
