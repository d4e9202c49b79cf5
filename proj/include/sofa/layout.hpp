#pragma once

#include <string>
#include <utility>
#include <vector>

namespace sofa {

// A token is either text or belongs to one image; image_index is the 0-based
// ordinal of that image in presentation order.
struct TokenKind {
  static TokenKind text() { return TokenKind{-1}; }
  static TokenKind image(int index) { return TokenKind{index}; }

  bool is_image() const { return image_index >= 0; }
  bool is_text() const { return image_index < 0; }

  bool operator==(const TokenKind&) const = default;

  int image_index = -1;  // -1 for text
};

// One contiguous run of same-kind tokens, the unit layouts are built from.
struct Segment {
  bool is_image = false;
  int length = 0;

  bool operator==(const Segment&) const = default;
};

// Interleaved image/text token sequence. Images occupy contiguous half-open
// index ranges; positions are the absolute 0..L-1 token positions fed to the
// position encoding downstream. Immutable after construction.
struct SequenceLayout {
  std::vector<TokenKind> kinds;
  std::vector<int> positions;
  std::vector<std::pair<int, int>> image_spans;  // per image, in index order

  int length() const { return static_cast<int>(kinds.size()); }
  int n_images() const { return static_cast<int>(image_spans.size()); }
};

// Builds a layout from ordered segments. Throws std::invalid_argument on an
// empty segment list or a non-positive segment length.
SequenceLayout build_layout(const std::vector<Segment>& segments);

// Verifies all structural invariants; throws std::invalid_argument otherwise.
void validate_layout(const SequenceLayout& layout);

// Decomposes a layout back into its maximal segments (inverse of build_layout
// up to merging of adjacent text segments, which build_layout never splits).
std::vector<Segment> segments_of(const SequenceLayout& layout);

// All (query, key) index pairs whose tokens belong to two different images.
// This is the exact support the soft mask is allowed to touch. Pairs are
// returned sorted lexicographically with no duplicates.
std::vector<std::pair<int, int>> image_token_pairs(const SequenceLayout& layout);

// Segment-string form used by the CLI, e.g. "T5 I4 T2 I4 T3".
std::vector<Segment> parse_segment_string(const std::string& text);
std::string format_segment_string(const std::vector<Segment>& segments);

}  // namespace sofa
