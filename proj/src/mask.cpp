#include "sofa/mask.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace sofa {

MaskVariant MaskVariant::soft(double sigma) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) {
    throw std::invalid_argument("MaskVariant::soft: sigma must be in [0,1]");
  }
  return {Kind::Soft, sigma};
}

LayerSchedule make_schedule(int n_layers, const ScheduleMode& mode) {
  if (n_layers < 1) {
    throw std::invalid_argument("make_schedule: n_layers must be >= 1");
  }
  LayerSchedule schedule;
  schedule.n_layers = n_layers;
  switch (mode.kind) {
    case ScheduleMode::Kind::EveryK: {
      if (mode.k < 1) {
        throw std::invalid_argument("make_schedule: every_k needs k >= 1");
      }
      for (int layer = mode.k - 1; layer < n_layers; layer += mode.k) {
        schedule.soft_layers.insert(layer);
      }
      break;
    }
    case ScheduleMode::Kind::All: {
      for (int layer = 0; layer < n_layers; ++layer) {
        schedule.soft_layers.insert(layer);
      }
      break;
    }
    case ScheduleMode::Kind::Explicit: {
      for (int layer : mode.layers) {
        if (layer < 0 || layer >= n_layers) {
          throw std::invalid_argument(
              "make_schedule: explicit layer index out of range");
        }
        schedule.soft_layers.insert(layer);
      }
      break;
    }
  }
  return schedule;
}

AttentionMask build_mask(const SequenceLayout& layout,
                         const MaskVariant& variant) {
  if (variant.kind == MaskVariant::Kind::Soft &&
      !(variant.sigma >= 0.0 && variant.sigma <= 1.0)) {
    throw std::invalid_argument("build_mask: sigma must be in [0,1]");
  }
  const int L = layout.length();
  AttentionMask mask;
  mask.entries = Eigen::MatrixXd::Zero(L, L);
  for (int q = 0; q < L; ++q) {
    for (int k = 0; k <= q; ++k) mask.entries(q, k) = 1.0;
  }
  if (variant.kind == MaskVariant::Kind::Causal) return mask;

  // Only inter-image entries ever change; assigning rule values directly (not
  // the affine expression) keeps untouched entries bitwise causal.
  for (const auto& [q, k] : image_token_pairs(layout)) {
    switch (variant.kind) {
      case MaskVariant::Kind::BidirectionalImages:
        mask.entries(q, k) = 1.0;
        break;
      case MaskVariant::Kind::IsolatedImages:
        mask.entries(q, k) = 0.0;
        break;
      case MaskVariant::Kind::Soft:
        if (k > q) mask.entries(q, k) = variant.sigma;
        break;
      case MaskVariant::Kind::Causal:
        break;
    }
  }
  return mask;
}

std::vector<AttentionMask> schedule_masks(const SequenceLayout& layout,
                                          double sigma, int n_layers,
                                          const ScheduleMode& mode) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) {
    throw std::invalid_argument("schedule_masks: sigma must be in [0,1]");
  }
  const LayerSchedule schedule = make_schedule(n_layers, mode);
  const AttentionMask causal = build_mask(layout, MaskVariant::causal());
  const AttentionMask soft = build_mask(layout, MaskVariant::soft(sigma));
  std::vector<AttentionMask> masks;
  masks.reserve(n_layers);
  for (int layer = 0; layer < n_layers; ++layer) {
    masks.push_back(schedule.soft_layers.count(layer) ? soft : causal);
  }
  return masks;
}

void validate_mask(const AttentionMask& mask, const SequenceLayout& layout) {
  const int L = layout.length();
  if (mask.entries.rows() != L || mask.entries.cols() != L) {
    throw std::invalid_argument("mask: shape does not match layout");
  }
  for (int q = 0; q < L; ++q) {
    if (mask.entries(q, q) != 1.0) {
      throw std::invalid_argument("mask: diagonal entry must be 1");
    }
    for (int k = 0; k < L; ++k) {
      const double e = mask.entries(q, k);
      if (!(e >= 0.0 && e <= 1.0)) {
        throw std::invalid_argument("mask: entry outside [0,1]");
      }
    }
  }
  Eigen::MatrixXd causal = Eigen::MatrixXd::Zero(L, L);
  for (int q = 0; q < L; ++q) {
    for (int k = 0; k <= q; ++k) causal(q, k) = 1.0;
  }
  auto is_inter_image = [&](int q, int k) {
    return layout.kinds[q].is_image() && layout.kinds[k].is_image() &&
           layout.kinds[q].image_index != layout.kinds[k].image_index;
  };
  for (int q = 0; q < L; ++q) {
    for (int k = 0; k < L; ++k) {
      if (!is_inter_image(q, k) && mask.entries(q, k) != causal(q, k)) {
        throw std::invalid_argument(
            "mask: non-inter-image entry deviates from causal");
      }
    }
  }
}

void write_mask_csv(std::ostream& out, const AttentionMask& mask) {
  out << "L=" << mask.size() << "\n";
  char buf[64];
  for (Eigen::Index q = 0; q < mask.entries.rows(); ++q) {
    for (Eigen::Index k = 0; k < mask.entries.cols(); ++k) {
      // %.17g round-trips doubles; integral entries print as 0 / 1.
      std::snprintf(buf, sizeof(buf), "%.17g", mask.entries(q, k));
      out << (k ? "," : "") << buf;
    }
    out << "\n";
  }
}

}  // namespace sofa
