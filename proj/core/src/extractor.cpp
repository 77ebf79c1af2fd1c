// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/extractor.hpp"

#include <algorithm>

namespace webseq {

std::vector<PathElement> segment_path(std::string_view path) {
  std::vector<PathElement> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto end = path.find_first_of(kPathDelimiters, start);
    const std::string_view piece =
        path.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (!piece.empty()) out.push_back({std::string(piece), false});
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::string derandomize_path(std::string_view path, const CharMarkovModel& model) {
  std::string out;
  for (const auto& element : segment_path(path)) {
    out.push_back('/');
    if (is_random_element(model, element.text)) {
      out.append(kRandomPlaceholder);
    } else {
      out.append(element.text);
    }
  }
  if (out.empty()) out = "/";
  return out;
}

Event canonicalize(const RawRequest& request, const CharMarkovModel& model) {
  std::string token = request.method;
  token.push_back(' ');
  token += derandomize_path(request.path, model);
  token.push_back(' ');
  token += std::to_string(request.query_param_count);
  return Event::normal(std::move(token));
}

std::vector<std::string> training_elements(const std::vector<RawRequest>& requests) {
  std::vector<std::string> out;
  for (const auto& r : requests) {
    for (auto& element : segment_path(r.path)) {
      if (std::all_of(element.text.begin(), element.text.end(),
                      [](char c) { return c >= '0' && c <= '9'; })) {
        continue;
      }
      std::string lowered = std::move(element.text);
      std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) {
        return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
      });
      out.push_back(std::move(lowered));
    }
  }
  return out;
}

}  // namespace webseq
