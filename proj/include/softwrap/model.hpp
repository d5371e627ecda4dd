#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "softwrap/encode.hpp"
#include "softwrap/schema.hpp"

namespace softwrap {

enum class Approach { Dt, Rf, FuzzyDt, FuzzyRf, SoftDt, BaggedSoftDt };

const char* approach_name(Approach a);           // "dt", "rf", "fuzzy-dt", ...
Approach approach_from_name(const std::string&); // throws BadArguments

// Per-cluster evidence: (possibly fractional) outcome counts, the raw
// uncertainty, and the dependable upper bound once calibrated.
struct LeafStats {
  double weight_correct = 0.0;
  double weight_incorrect = 0.0;
  double raw_u = 0.0;
  std::optional<double> calibrated_u;
  std::optional<double> calibration_n;
};

enum class NodeKind {
  Split,      // hard threshold: left iff x[feature] <= threshold
  FuzzySplit, // triangular partition (a,b,c), children [left, mid, right]
  Gate,       // sigmoid gate: weight sigma(slope*x+offset) to the right child
  Leaf,
};

struct TreeNode {
  NodeKind kind = NodeKind::Leaf;
  int feature = -1;
  double threshold = 0.0;            // Split
  double a = 0.0, b = 0.0, c = 0.0;  // FuzzySplit anchors
  double slope = 0.0, offset = 0.0;  // Gate
  std::array<int, 3> child{-1, -1, -1};
  LeafStats leaf;                    // Leaf only
};

struct Tree {
  std::vector<TreeNode> nodes;
  int root = 0;
};

struct GdParams {
  double learning_rate = 0.1;
  int max_iters = 200;
  double tol = 1e-7;
  double init_steepness = 0.0;  // 0 = automatic: 4 / feature range at the node
};

struct TreeHyperparams {
  int max_depth = 8;
  double min_leaf_weight = 50.0;
  double min_gain = 1e-6;
  int n_trees = 20;        // ensembles
  int feature_subset = 0;  // RF node-level subset size; 0 = ceil(sqrt(d))
  bool bootstrap = true;   // ensembles
  int n_bins = 32;         // fuzzy partition candidate bins
  GdParams gd;             // soft gate fitting

  void validate() const;
};

struct TraceEntry {
  int tree = 0;
  int node = 0;
  double weight = 0.0;
  double leaf_u = 0.0;
  std::string conditions;
};

struct UncertaintyEstimate {
  double value = 0.0;
  bool calibrated = false;
  std::vector<TraceEntry> trace;
};

// A trained quality impact model of any of the six approaches: one or more
// trees over the one-hot encoded feature space, averaged when predicting.
// Immutable after training; safe for concurrent reads.
struct QualityImpactModel {
  Approach approach = Approach::Dt;
  FeatureSchema schema;
  std::vector<EncodedColumn> columns;  // derived from schema
  TreeHyperparams hp;
  bool calibrated = false;
  double confidence_level = 0.0;
  std::vector<Tree> trees;
  std::vector<uint64_t> member_seeds;

  std::size_t encoded_arity() const { return columns.size(); }
  double leaf_value(const LeafStats& s) const {
    return calibrated && s.calibrated_u ? *s.calibrated_u : s.raw_u;
  }
};

// Triangular membership of x in the three child sets of a fuzzy split.
// Sum is exactly 1 for x in [a,c]; (1,0,0) below a, (0,0,1) above c.
struct Membership {
  double left, mid, right;
};
Membership fuzzy_membership(double a, double b, double c, double x);

// Numerically stable logistic.
double sigmoid(double z);

// Calls fn(node_index, path_weight) once per leaf reached with weight > 0.
// Hard splits route to one child, fuzzy splits to up to three, gates to two.
template <typename F>
void visit_leaves(const Tree& tree, std::span<const double> x, F&& fn) {
  struct Item {
    int node;
    double weight;
  };
  std::vector<Item> stack;
  stack.push_back({tree.root, 1.0});
  while (!stack.empty()) {
    Item item = stack.back();
    stack.pop_back();
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(item.node)];
    switch (n.kind) {
      case NodeKind::Leaf:
        fn(item.node, item.weight);
        break;
      case NodeKind::Split: {
        int next = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.child[0] : n.child[1];
        stack.push_back({next, item.weight});
        break;
      }
      case NodeKind::FuzzySplit: {
        Membership m = fuzzy_membership(n.a, n.b, n.c, x[static_cast<std::size_t>(n.feature)]);
        if (m.right > 0.0) stack.push_back({n.child[2], item.weight * m.right});
        if (m.mid > 0.0) stack.push_back({n.child[1], item.weight * m.mid});
        if (m.left > 0.0) stack.push_back({n.child[0], item.weight * m.left});
        break;
      }
      case NodeKind::Gate: {
        double g = sigmoid(n.slope * x[static_cast<std::size_t>(n.feature)] + n.offset);
        if (g < 1.0) stack.push_back({n.child[0], item.weight * (1.0 - g)});
        if (g > 0.0) stack.push_back({n.child[1], item.weight * g});
        break;
      }
    }
  }
}

// Fast path: the uncertainty value only.
double predict_value(const QualityImpactModel& m, std::span<const double> encoded);

// Full estimate with the per-leaf explanation trace.
UncertaintyEstimate predict(const QualityImpactModel& m, std::span<const double> encoded);

// Convenience: encode an original-space point, then predict.
UncertaintyEstimate predict_point(const QualityImpactModel& m, const DataPoint& p);
double predict_point_value(const QualityImpactModel& m, const DataPoint& p);

// Structural check used after load and by tests.
void validate_model(const QualityImpactModel& m);

}  // namespace softwrap
