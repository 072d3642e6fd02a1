#pragma once

#include <cstddef>
#include <vector>

namespace ecm {

// Maximum bipartite matching by augmenting paths (Kuhn). Graphs here have a
// few dozen vertices at most, so the O(V * E) bound is irrelevant.
class BipartiteMatcher {
 public:
  BipartiteMatcher(std::size_t left, std::size_t right) : adj_(left), match_right_(right, -1) {}

  void add_edge(std::size_t l, std::size_t r) { adj_[l].push_back(static_cast<int>(r)); }

  std::size_t solve() {
    std::size_t matched = 0;
    for (std::size_t l = 0; l < adj_.size(); ++l) {
      visited_.assign(match_right_.size(), false);
      if (augment(static_cast<int>(l))) ++matched;
    }
    return matched;
  }

  // Right vertex matched to each right slot, -1 if free. Valid after solve().
  const std::vector<int>& right_matches() const { return match_right_; }

 private:
  bool augment(int l) {
    for (int r : adj_[static_cast<std::size_t>(l)]) {
      auto ru = static_cast<std::size_t>(r);
      if (visited_[ru]) continue;
      visited_[ru] = true;
      if (match_right_[ru] < 0 || augment(match_right_[ru])) {
        match_right_[ru] = l;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<int>> adj_;
  std::vector<int> match_right_;
  std::vector<bool> visited_;
};

}  // namespace ecm
