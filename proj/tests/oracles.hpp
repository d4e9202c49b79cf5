#pragma once

// Independent brute-force oracles for the test suites. Everything here is
// deliberately written as plain loops over the rule tables, with no reuse of
// the library's construction paths.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "sofa/layout.hpp"
#include "sofa/mask.hpp"

namespace sofa::test {

// Classifies every (q,k) pair and applies the regime rule table directly.
inline Eigen::MatrixXd mask_rule_oracle(const SequenceLayout& layout,
                                        const MaskVariant& variant) {
  const int L = layout.length();
  Eigen::MatrixXd m(L, L);
  for (int q = 0; q < L; ++q) {
    for (int k = 0; k < L; ++k) {
      const double causal = k <= q ? 1.0 : 0.0;
      const bool both_images =
          layout.kinds[q].is_image() && layout.kinds[k].is_image();
      const bool inter_image =
          both_images && layout.kinds[q].image_index != layout.kinds[k].image_index;
      if (!inter_image) {
        m(q, k) = causal;
        continue;
      }
      switch (variant.kind) {
        case MaskVariant::Kind::Causal:
          m(q, k) = causal;
          break;
        case MaskVariant::Kind::IsolatedImages:
          m(q, k) = 0.0;
          break;
        case MaskVariant::Kind::BidirectionalImages:
          m(q, k) = 1.0;
          break;
        case MaskVariant::Kind::Soft:
          m(q, k) = k > q ? variant.sigma : causal;
          break;
      }
    }
  }
  return m;
}

// Every segment pattern over {Text, Image} blocks of length 1..max_block with
// total length <= max_len, enumerated depth-first in a stable order.
inline std::vector<std::vector<Segment>> enumerate_segment_patterns(
    int max_len, int max_block = 2) {
  std::vector<std::vector<Segment>> all;
  std::vector<Segment> current;
  auto recurse = [&](auto&& self, int remaining) -> void {
    if (!current.empty()) all.push_back(current);
    for (int len = 1; len <= std::min(max_block, remaining); ++len) {
      for (bool is_image : {false, true}) {
        current.push_back(Segment{is_image, len});
        self(self, remaining - len);
        current.pop_back();
      }
    }
  };
  recurse(recurse, max_len);
  return all;
}

// Straightforward FP64 re-implementation of masked attention with explicit
// loops: plain softmax, multiplicative masking, optional renormalization.
struct LoopAttentionResult {
  Eigen::MatrixXd output;
  Eigen::MatrixXd weights;
};

inline LoopAttentionResult loop_attention_oracle(const Eigen::MatrixXd& Q,
                                                 const Eigen::MatrixXd& K,
                                                 const Eigen::MatrixXd& V,
                                                 const Eigen::MatrixXd& mask,
                                                 bool renormalize) {
  const int L = static_cast<int>(Q.rows());
  const int d = static_cast<int>(Q.cols());
  LoopAttentionResult r;
  r.weights = Eigen::MatrixXd::Zero(L, L);
  r.output = Eigen::MatrixXd::Zero(L, d);
  for (int q = 0; q < L; ++q) {
    std::vector<double> scores(static_cast<std::size_t>(L));
    double max_score = -1e300;
    for (int k = 0; k < L; ++k) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += Q(q, i) * K(k, i);
      s /= std::sqrt(static_cast<double>(d));
      scores[static_cast<std::size_t>(k)] = s;
      max_score = std::max(max_score, s);
    }
    double denom = 0.0;
    for (int k = 0; k < L; ++k) {
      denom += std::exp(scores[static_cast<std::size_t>(k)] - max_score);
    }
    for (int k = 0; k < L; ++k) {
      r.weights(q, k) =
          std::exp(scores[static_cast<std::size_t>(k)] - max_score) / denom *
          mask(q, k);
    }
    if (renormalize) {
      double mass = 0.0;
      for (int k = 0; k < L; ++k) mass += r.weights(q, k);
      for (int k = 0; k < L; ++k) r.weights(q, k) /= mass;
    }
    for (int k = 0; k < L; ++k) {
      for (int i = 0; i < d; ++i) r.output(q, i) += r.weights(q, k) * V(k, i);
    }
  }
  return r;
}

}  // namespace sofa::test
