/*
 * Copyright 2026 The icda Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// CART classification trees with Gini impurity. Used for the interpretable
// surrogates fitted on (anchor, analyst prediction) pairs and for the
// centralized and individual baselines.

#ifndef ICDA_DISTILL_HPP_
#define ICDA_DISTILL_HPP_

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "icda/core.hpp"

namespace icda {

inline constexpr int kUnlimitedDepth = std::numeric_limits<int>::max();

struct TreeParams {
  int max_depth = 10;
  int min_leaf = 5;
  double min_impurity_decrease = 1e-7;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0;
  int left = -1;
  int right = -1;
  std::vector<int> class_counts;
  int predicted_class = 0;
  double impurity_decrease = 0;  // of the split made here; 0 for leaves

  bool is_leaf() const { return feature < 0; }
};

// Nodes are stored in preorder; node 0 is the root. A sample goes left iff
// x[feature] <= threshold.
struct DecisionTree {
  std::vector<TreeNode> nodes;
  TreeParams params;
  int feature_count = 0;
  int class_count = 0;

  int depth() const {
    std::vector<int> d(nodes.size(), 0);
    int deepest = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (nodes[k].is_leaf()) continue;
      d[static_cast<std::size_t>(nodes[k].left)] = d[k] + 1;
      d[static_cast<std::size_t>(nodes[k].right)] = d[k] + 1;
      deepest = std::max(deepest, d[k] + 1);
    }
    return deepest;
  }
  std::set<int> features_used() const {
    std::set<int> f;
    for (const auto& n : nodes)
      if (!n.is_leaf()) f.insert(n.feature);
    return f;
  }
};

inline double gini(std::span<const int> counts, int total) {
  if (total <= 0) return 0.0;
  double sum_sq = 0;
  for (int c : counts) {
    const double p = static_cast<double>(c) / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

namespace detail {

inline int argmax_count(const std::vector<int>& counts) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(counts.size()); ++k)
    if (counts[static_cast<std::size_t>(k)] > counts[static_cast<std::size_t>(best)]) best = k;
  return best;
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0;
  double decrease = -std::numeric_limits<double>::infinity();
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const Labels& y, int class_count, const TreeParams& p)
      : X_(X), y_(y), classes_(class_count), params_(p) {}

  int build(std::vector<int>& rows, int depth, std::vector<TreeNode>& out) {
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<int> counts(static_cast<std::size_t>(classes_), 0);
    for (int r : rows) ++counts[static_cast<std::size_t>(y_[static_cast<std::size_t>(r)])];
    out[id].class_counts = counts;
    out[id].predicted_class = argmax_count(counts);

    const int n = static_cast<int>(rows.size());
    const double parent = gini(counts, n);
    if (depth >= params_.max_depth || parent <= 0 || n < 2 * params_.min_leaf) return id;

    const SplitChoice best = best_split(rows, counts, parent);
    if (best.feature < 0 || best.decrease < params_.min_impurity_decrease - 1e-12) return id;

    std::vector<int> left, right;
    for (int r : rows) (X_(r, best.feature) <= best.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    out[id].feature = best.feature;
    out[id].threshold = best.threshold;
    out[id].impurity_decrease = best.decrease;
    const int l = build(left, depth + 1, out);
    const int r = build(right, depth + 1, out);
    out[id].left = l;
    out[id].right = r;
    return id;
  }

 private:
  // Exhaustive search over midpoints between consecutive distinct values.
  // Strict improvement only, so ties keep the lower feature, then the lower
  // threshold.
  SplitChoice best_split(const std::vector<int>& rows, const std::vector<int>& counts, double parent) const {
    const int n = static_cast<int>(rows.size());
    SplitChoice best;
    std::vector<std::pair<double, int>> sorted(rows.size());
    std::vector<int> left(static_cast<std::size_t>(classes_));
    std::vector<int> right(static_cast<std::size_t>(classes_));
    for (int f = 0; f < static_cast<int>(X_.cols()); ++f) {
      for (std::size_t k = 0; k < rows.size(); ++k)
        sorted[k] = {X_(rows[k], f), y_[static_cast<std::size_t>(rows[k])]};
      std::sort(sorted.begin(), sorted.end());
      std::fill(left.begin(), left.end(), 0);
      right = counts;
      for (int k = 1; k < n; ++k) {
        const int moved = sorted[static_cast<std::size_t>(k - 1)].second;
        ++left[static_cast<std::size_t>(moved)];
        --right[static_cast<std::size_t>(moved)];
        const double lo = sorted[static_cast<std::size_t>(k - 1)].first;
        const double hi = sorted[static_cast<std::size_t>(k)].first;
        if (!(lo < hi)) continue;
        if (k < params_.min_leaf || n - k < params_.min_leaf) continue;
        const double decrease =
            parent - (static_cast<double>(k) / n) * gini(left, k) - (static_cast<double>(n - k) / n) * gini(right, n - k);
        if (decrease > best.decrease) {
          double t = lo + 0.5 * (hi - lo);
          if (!(t < hi)) t = lo;
          best = {f, t, decrease};
        }
      }
    }
    return best;
  }

  const Matrix& X_;
  const Labels& y_;
  int classes_;
  TreeParams params_;
};

}  // namespace detail

// Greedy CART. class_count < 0 infers max(label) + 1.
inline DecisionTree fit_tree(const Matrix& X, const Labels& labels, const TreeParams& params = {},
                             int class_count = -1) {
  if (X.rows() == 0) throw std::invalid_argument("fit_tree: empty training set");
  if (static_cast<Eigen::Index>(labels.size()) != X.rows())
    throw std::invalid_argument("fit_tree: label count does not match row count");
  if (params.max_depth < 0 || params.min_leaf < 1)
    throw std::invalid_argument("fit_tree: need max_depth >= 0 and min_leaf >= 1");
  const int inferred = *std::max_element(labels.begin(), labels.end()) + 1;
  if (class_count < 0) class_count = inferred;
  for (int y : labels)
    if (y < 0 || y >= class_count)
      throw std::invalid_argument("fit_tree: label " + std::to_string(y) + " outside [0, " +
                                  std::to_string(class_count) + ")");
  DecisionTree tree;
  tree.params = params;
  tree.feature_count = static_cast<int>(X.cols());
  tree.class_count = class_count;
  std::vector<int> rows(static_cast<std::size_t>(X.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  detail::TreeBuilder(X, labels, class_count, params).build(rows, 0, tree.nodes);
  return tree;
}

inline Labels predict_tree(const DecisionTree& tree, const Matrix& X) {
  if (X.cols() != tree.feature_count)
    throw std::invalid_argument("predict_tree: input has " + std::to_string(X.cols()) + " columns, tree expects " +
                                std::to_string(tree.feature_count));
  Labels out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    int k = 0;
    while (!tree.nodes[static_cast<std::size_t>(k)].is_leaf()) {
      const auto& node = tree.nodes[static_cast<std::size_t>(k)];
      k = X(r, node.feature) <= node.threshold ? node.left : node.right;
    }
    out[static_cast<std::size_t>(r)] = tree.nodes[static_cast<std::size_t>(k)].predicted_class;
  }
  return out;
}

enum class TreeFormat { IndentedText, Dot };

namespace detail {

inline std::string format_threshold(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

inline std::string node_label(const TreeNode& n, const std::vector<std::string>& names) {
  if (!n.is_leaf()) return names[static_cast<std::size_t>(n.feature)] + " ≤ " + format_threshold(n.threshold);
  std::string s = "leaf: class " + std::to_string(n.predicted_class) + " (";
  for (std::size_t k = 0; k < n.class_counts.size(); ++k) s += (k ? ", " : "") + std::to_string(n.class_counts[k]);
  return s + ")";
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline void render_text(const DecisionTree& t, const std::vector<std::string>& names, int id, int depth,
                        std::ostringstream& os) {
  const auto& n = t.nodes[static_cast<std::size_t>(id)];
  os << std::string(static_cast<std::size_t>(2 * depth), ' ') << node_label(n, names) << '\n';
  if (n.is_leaf()) return;
  render_text(t, names, n.left, depth + 1, os);
  render_text(t, names, n.right, depth + 1, os);
}

}  // namespace detail

// Indented text: one node per line, children two spaces deeper, the "<="
// branch first. DOT: a digraph with one box per node and yes/no edges.
inline std::string export_tree(const DecisionTree& tree, const std::vector<std::string>& feature_names,
                               TreeFormat format) {
  if (static_cast<int>(feature_names.size()) != tree.feature_count)
    throw std::invalid_argument("export_tree: expected " + std::to_string(tree.feature_count) + " feature names");
  std::ostringstream os;
  if (format == TreeFormat::IndentedText) {
    detail::render_text(tree, feature_names, 0, 0, os);
    return os.str();
  }
  os << "digraph tree {\n  node [shape=box];\n";
  for (std::size_t k = 0; k < tree.nodes.size(); ++k)
    os << "  n" << k << " [label=\"" << detail::dot_escape(detail::node_label(tree.nodes[k], feature_names))
       << "\"];\n";
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    const auto& n = tree.nodes[k];
    if (n.is_leaf()) continue;
    os << "  n" << k << " -> n" << n.left << " [label=\"yes\"];\n";
    os << "  n" << k << " -> n" << n.right << " [label=\"no\"];\n";
  }
  os << "}\n";
  return os.str();
}

inline nlohmann::json tree_to_json(const DecisionTree& t, const std::vector<std::string>& feature_names) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : t.nodes) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"counts", n.class_counts},
                     {"class", n.predicted_class},
                     {"decrease", n.impurity_decrease}});
  }
  return {{"feature_count", t.feature_count},
          {"class_count", t.class_count},
          {"feature_names", feature_names},
          {"params",
           {{"max_depth", t.params.max_depth},
            {"min_leaf", t.params.min_leaf},
            {"min_impurity_decrease", t.params.min_impurity_decrease}}},
          {"nodes", std::move(nodes)}};
}

struct NamedTree {
  DecisionTree tree;
  std::vector<std::string> feature_names;
};

inline NamedTree tree_from_json(const nlohmann::json& j) {
  NamedTree out;
  auto& t = out.tree;
  t.feature_count = j.at("feature_count").get<int>();
  t.class_count = j.at("class_count").get<int>();
  out.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  const auto& p = j.at("params");
  t.params = {p.at("max_depth").get<int>(), p.at("min_leaf").get<int>(), p.at("min_impurity_decrease").get<double>()};
  for (const auto& n : j.at("nodes")) {
    TreeNode node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.class_counts = n.at("counts").get<std::vector<int>>();
    node.predicted_class = n.at("class").get<int>();
    node.impurity_decrease = n.value("decrease", 0.0);
    t.nodes.push_back(std::move(node));
  }
  const auto count = static_cast<int>(t.nodes.size());
  for (const auto& n : t.nodes) {
    if (n.is_leaf()) continue;
    if (n.feature >= t.feature_count || n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count)
      throw Error("tree_from_json: malformed node reference");
  }
  if (t.nodes.empty()) throw Error("tree_from_json: tree has no nodes");
  return out;
}

}  // namespace icda

#endif  // ICDA_DISTILL_HPP_
