#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <limits>
#include <set>
#include <variant>
#include <vector>

#include "sofa/layout.hpp"

namespace sofa {

// Dense L x L attention mask; row = query position, column = key position.
// Entries live in [0,1]. Everything outside inter-image pairs is exactly the
// binary causal pattern in every variant.
struct AttentionMask {
  Eigen::MatrixXd entries;

  int size() const { return static_cast<int>(entries.rows()); }

  // Log-domain additive bias: log 1 = 0, log 0 = -inf, else log entry.
  // Zero/one entries are branched so they convert exactly at any precision.
  template <typename Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> log_bias() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> bias(entries.rows(),
                                                               entries.cols());
    for (Eigen::Index q = 0; q < entries.rows(); ++q) {
      for (Eigen::Index k = 0; k < entries.cols(); ++k) {
        const double e = entries(q, k);
        if (e == 0.0) {
          bias(q, k) = -std::numeric_limits<Scalar>::infinity();
        } else if (e == 1.0) {
          bias(q, k) = Scalar(0);
        } else {
          bias(q, k) = static_cast<Scalar>(std::log(e));
        }
      }
    }
    return bias;
  }
};

// The four inter-image attention regimes. Soft carries its interpolation
// coefficient; the other kinds ignore sigma.
struct MaskVariant {
  enum class Kind { Causal, IsolatedImages, BidirectionalImages, Soft };

  static MaskVariant causal() { return {Kind::Causal, 0.0}; }
  static MaskVariant isolated_images() { return {Kind::IsolatedImages, 0.0}; }
  static MaskVariant bidirectional_images() {
    return {Kind::BidirectionalImages, 0.0};
  }
  // Throws std::invalid_argument unless sigma is in [0,1].
  static MaskVariant soft(double sigma);

  Kind kind = Kind::Causal;
  double sigma = 0.0;
};

// Which decoder layers receive the soft mask; all others stay causal.
struct LayerSchedule {
  int n_layers = 0;
  std::set<int> soft_layers;
};

struct ScheduleMode {
  enum class Kind { EveryK, All, Explicit };

  static ScheduleMode every_k(int k) { return {Kind::EveryK, k, {}}; }
  static ScheduleMode all() { return {Kind::All, 0, {}}; }
  static ScheduleMode explicit_layers(std::set<int> layers) {
    return {Kind::Explicit, 0, std::move(layers)};
  }

  Kind kind = Kind::EveryK;
  int k = 2;
  std::set<int> layers;
};

// Realizes the schedule rule. every_k(k) marks layers k-1, 2k-1, ... so that
// layer 0 always stays causal. Throws on out-of-range explicit indices.
LayerSchedule make_schedule(int n_layers, const ScheduleMode& mode);

// Builds the mask for one variant over the given layout.
AttentionMask build_mask(const SequenceLayout& layout, const MaskVariant& variant);

// One mask per layer: Soft(sigma) on scheduled layers, Causal elsewhere.
std::vector<AttentionMask> schedule_masks(const SequenceLayout& layout,
                                          double sigma, int n_layers,
                                          const ScheduleMode& mode);

// Checks the AttentionMask invariants against a layout; throws on violation.
void validate_mask(const AttentionMask& mask, const SequenceLayout& layout);

// CSV form used by the CLI and golden-file tests: first line "L=<n>", then
// one row per line, comma-separated, shortest round-trippable formatting.
void write_mask_csv(std::ostream& out, const AttentionMask& mask);

}  // namespace sofa
