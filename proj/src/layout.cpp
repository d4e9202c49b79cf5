#include "sofa/layout.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace sofa {

SequenceLayout build_layout(const std::vector<Segment>& segments) {
  if (segments.empty()) {
    throw std::invalid_argument("build_layout: empty segment list");
  }
  SequenceLayout layout;
  int next_image = 0;
  for (const Segment& seg : segments) {
    if (seg.length < 1) {
      throw std::invalid_argument("build_layout: segment length must be >= 1");
    }
    const int start = layout.length();
    const TokenKind kind =
        seg.is_image ? TokenKind::image(next_image) : TokenKind::text();
    for (int i = 0; i < seg.length; ++i) {
      layout.kinds.push_back(kind);
    }
    if (seg.is_image) {
      layout.image_spans.emplace_back(start, start + seg.length);
      ++next_image;
    }
  }
  layout.positions.resize(layout.kinds.size());
  for (int t = 0; t < layout.length(); ++t) layout.positions[t] = t;
  return layout;
}

void validate_layout(const SequenceLayout& layout) {
  const int L = layout.length();
  if (L == 0) throw std::invalid_argument("layout: empty");
  if (static_cast<int>(layout.positions.size()) != L) {
    throw std::invalid_argument("layout: positions length mismatch");
  }
  for (int t = 0; t < L; ++t) {
    if (layout.positions[t] != t) {
      throw std::invalid_argument("layout: positions must be 0..L-1");
    }
  }
  int covered = 0;
  for (int i = 0; i < layout.n_images(); ++i) {
    const auto [start, end] = layout.image_spans[i];
    if (start < 0 || end > L || start >= end) {
      throw std::invalid_argument("layout: image span out of range");
    }
    if (i > 0 && start < layout.image_spans[i - 1].second) {
      throw std::invalid_argument("layout: image spans overlap or unordered");
    }
    for (int t = start; t < end; ++t) {
      if (layout.kinds[t] != TokenKind::image(i)) {
        throw std::invalid_argument("layout: span token kind mismatch");
      }
    }
    covered += end - start;
  }
  int image_tokens = 0;
  for (const TokenKind& k : layout.kinds) image_tokens += k.is_image() ? 1 : 0;
  if (image_tokens != covered) {
    throw std::invalid_argument("layout: image tokens outside declared spans");
  }
}

std::vector<Segment> segments_of(const SequenceLayout& layout) {
  std::vector<Segment> segments;
  for (int t = 0; t < layout.length(); ++t) {
    const bool is_image = layout.kinds[t].is_image();
    const bool starts_image =
        is_image && (t == 0 || layout.kinds[t - 1] != layout.kinds[t]);
    const bool starts_text =
        !is_image && (segments.empty() || segments.back().is_image);
    if (starts_image || starts_text) {
      segments.push_back(Segment{is_image, 1});
    } else {
      segments.back().length += 1;
    }
  }
  return segments;
}

std::vector<std::pair<int, int>> image_token_pairs(
    const SequenceLayout& layout) {
  std::vector<std::pair<int, int>> pairs;
  const int L = layout.length();
  for (int q = 0; q < L; ++q) {
    if (!layout.kinds[q].is_image()) continue;
    for (int k = 0; k < L; ++k) {
      if (!layout.kinds[k].is_image()) continue;
      if (layout.kinds[q].image_index != layout.kinds[k].image_index) {
        pairs.emplace_back(q, k);
      }
    }
  }
  return pairs;
}

std::vector<Segment> parse_segment_string(const std::string& text) {
  std::vector<Segment> segments;
  std::istringstream in(text);
  std::string word;
  while (in >> word) {
    if (word.size() < 2 || (word[0] != 'T' && word[0] != 'I')) {
      throw std::invalid_argument("segment string: expected T<len> or I<len>, got '" +
                                  word + "'");
    }
    for (std::size_t i = 1; i < word.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(word[i]))) {
        throw std::invalid_argument("segment string: bad length in '" + word + "'");
      }
    }
    const int len = std::stoi(word.substr(1));
    if (len < 1) {
      throw std::invalid_argument("segment string: length must be >= 1 in '" +
                                  word + "'");
    }
    segments.push_back(Segment{word[0] == 'I', len});
  }
  if (segments.empty()) {
    throw std::invalid_argument("segment string: empty");
  }
  return segments;
}

std::string format_segment_string(const std::vector<Segment>& segments) {
  std::string out;
  for (const Segment& seg : segments) {
    if (!out.empty()) out += ' ';
    out += seg.is_image ? 'I' : 'T';
    out += std::to_string(seg.length);
  }
  return out;
}

}  // namespace sofa
