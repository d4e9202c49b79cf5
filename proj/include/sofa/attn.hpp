#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sofa/mask.hpp"

namespace sofa {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// How fractional mask entries combine with the softmax.
//   Renormalized: softmax restricted to the mask support; rows sum to 1.
//                 Implemented as an additive log-domain bias before softmax,
//                 which is the form pretrained causal models correspond to.
//   Literal:      softmax(scores) elementwise-multiplied by the mask with no
//                 renormalization; rows may sum to less than 1.
enum class MaskSemantics { Renormalized, Literal };

struct AttentionConfig {
  int d_head = 16;
  int n_heads = 4;
  MaskSemantics semantics = MaskSemantics::Renormalized;
  bool rope_enabled_for_images = true;
  double rope_base = 10000.0;
};

// Rotary position encoding. Each consecutive dimension pair (2i, 2i+1) of row
// t is rotated by positions[t] * base^(-2i/d). Rows flagged as image tokens
// are left unrotated when rope_enabled_for_images is off (effective angle 0).
// d = x.cols() must be even and |positions| = |image_rows| = x.rows().
template <typename Scalar>
Matrix<Scalar> apply_position_encoding(const Matrix<Scalar>& x,
                                       const std::vector<int>& positions,
                                       const std::vector<bool>& image_rows,
                                       const AttentionConfig& config) {
  const Eigen::Index L = x.rows();
  const Eigen::Index d = x.cols();
  if (static_cast<Eigen::Index>(positions.size()) != L ||
      static_cast<Eigen::Index>(image_rows.size()) != L) {
    throw std::invalid_argument("apply_position_encoding: row count mismatch");
  }
  if (d % 2 != 0) {
    throw std::invalid_argument("apply_position_encoding: dimension must be even");
  }
  Matrix<Scalar> out(L, d);
  std::vector<double> theta(static_cast<std::size_t>(d / 2));
  for (Eigen::Index i = 0; i < d / 2; ++i) {
    theta[static_cast<std::size_t>(i)] =
        std::pow(config.rope_base, -2.0 * static_cast<double>(i) /
                                       static_cast<double>(d));
  }
  for (Eigen::Index t = 0; t < L; ++t) {
    const bool rotate = config.rope_enabled_for_images ||
                        !image_rows[static_cast<std::size_t>(t)];
    if (!rotate) {
      out.row(t) = x.row(t);
      continue;
    }
    const double pos = static_cast<double>(positions[static_cast<std::size_t>(t)]);
    for (Eigen::Index i = 0; i < d / 2; ++i) {
      const double angle = pos * theta[static_cast<std::size_t>(i)];
      const Scalar c = static_cast<Scalar>(std::cos(angle));
      const Scalar s = static_cast<Scalar>(std::sin(angle));
      const Scalar x0 = x(t, 2 * i);
      const Scalar x1 = x(t, 2 * i + 1);
      out(t, 2 * i) = x0 * c - x1 * s;
      out(t, 2 * i + 1) = x0 * s + x1 * c;
    }
  }
  return out;
}

// Inverse rotation; used by reverse-mode differentiation (rotations are
// orthogonal, so the adjoint is the rotation by the negated angle).
template <typename Scalar>
Matrix<Scalar> apply_position_encoding_adjoint(const Matrix<Scalar>& dy,
                                               const std::vector<int>& positions,
                                               const std::vector<bool>& image_rows,
                                               const AttentionConfig& config) {
  std::vector<int> negated(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) negated[i] = -positions[i];
  return apply_position_encoding(dy, negated, image_rows, config);
}

template <typename Scalar>
struct AttendResult {
  Matrix<Scalar> output;   // L x d
  Matrix<Scalar> weights;  // L x L, row-stochastic under Renormalized
};

// Row-wise numerically stable softmax; -inf scores produce exact zeros.
// Summation runs in fixed key order so results never depend on how callers
// split work across threads.
template <typename Scalar>
void softmax_rows_inplace(Matrix<Scalar>& scores) {
  for (Eigen::Index q = 0; q < scores.rows(); ++q) {
    Scalar row_max = -std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index k = 0; k < scores.cols(); ++k) {
      row_max = std::max(row_max, scores(q, k));
    }
    if (!(row_max > -std::numeric_limits<Scalar>::infinity())) {
      throw std::invalid_argument("softmax: row has empty support");
    }
    Scalar total = Scalar(0);
    for (Eigen::Index k = 0; k < scores.cols(); ++k) {
      const Scalar e = std::exp(scores(q, k) - row_max);
      scores(q, k) = e;
      total += e;
    }
    scores.row(q) /= total;
  }
}

// Core of the renormalized semantics: softmax over scaled scores plus a
// log-domain bias. Callers may cache the bias across calls; attend() derives
// it from the mask on the fly.
template <typename Scalar>
AttendResult<Scalar> attend_renormalized(const Matrix<Scalar>& Q,
                                         const Matrix<Scalar>& K,
                                         const Matrix<Scalar>& V,
                                         const Matrix<Scalar>& log_bias) {
  const Scalar scale = Scalar(1) / static_cast<Scalar>(
                                       std::sqrt(static_cast<double>(Q.cols())));
  AttendResult<Scalar> result;
  Matrix<Scalar> scores = (Q * K.transpose()) * scale;
  scores += log_bias;
  softmax_rows_inplace(scores);
  result.weights = std::move(scores);
  result.output = result.weights * V;
  return result;
}

// Literal semantics: softmax then elementwise mask product, no renormalizing.
// pre_mask_weights receives the plain softmax rows (needed by backward).
template <typename Scalar>
AttendResult<Scalar> attend_literal(const Matrix<Scalar>& Q,
                                    const Matrix<Scalar>& K,
                                    const Matrix<Scalar>& V,
                                    const Matrix<Scalar>& mask_entries,
                                    Matrix<Scalar>* pre_mask_weights = nullptr) {
  const Scalar scale = Scalar(1) / static_cast<Scalar>(
                                       std::sqrt(static_cast<double>(Q.cols())));
  AttendResult<Scalar> result;
  Matrix<Scalar> scores = (Q * K.transpose()) * scale;
  softmax_rows_inplace(scores);
  if (pre_mask_weights) *pre_mask_weights = scores;
  result.weights = scores.cwiseProduct(mask_entries);
  result.output = result.weights * V;
  return result;
}

// Masked scaled-dot attention over one head. Q, K, V are L x d_head with
// position encoding already applied to Q and K by the caller.
template <typename Scalar>
AttendResult<Scalar> attend(const Matrix<Scalar>& Q, const Matrix<Scalar>& K,
                            const Matrix<Scalar>& V, const AttentionMask& mask,
                            const AttentionConfig& config) {
  const Eigen::Index L = Q.rows();
  const Eigen::Index d = Q.cols();
  if (K.rows() != L || V.rows() != L || K.cols() != d || V.cols() != d) {
    throw std::invalid_argument("attend: Q/K/V shape mismatch");
  }
  if (mask.entries.rows() != L || mask.entries.cols() != L) {
    throw std::invalid_argument("attend: mask shape mismatch");
  }
  if (config.semantics == MaskSemantics::Renormalized) {
    return attend_renormalized<Scalar>(Q, K, V, mask.log_bias<Scalar>());
  }
  return attend_literal<Scalar>(Q, K, V,
                                mask.entries.template cast<Scalar>());
}

}  // namespace sofa
