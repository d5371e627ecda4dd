#include "softwrap/model.hpp"

#include <cmath>
#include <cstdio>

namespace softwrap {

const char* approach_name(Approach a) {
  switch (a) {
    case Approach::Dt: return "dt";
    case Approach::Rf: return "rf";
    case Approach::FuzzyDt: return "fuzzy-dt";
    case Approach::FuzzyRf: return "fuzzy-rf";
    case Approach::SoftDt: return "soft-dt";
    case Approach::BaggedSoftDt: return "bagged-soft-dt";
  }
  return "?";
}

Approach approach_from_name(const std::string& name) {
  for (Approach a : {Approach::Dt, Approach::Rf, Approach::FuzzyDt, Approach::FuzzyRf,
                     Approach::SoftDt, Approach::BaggedSoftDt}) {
    if (name == approach_name(a)) return a;
  }
  throw Error(ErrorKind::BadArguments, "unknown approach '" + name + "'");
}

void TreeHyperparams::validate() const {
  if (max_depth < 1) throw Error(ErrorKind::BadConfig, "max_depth must be >= 1");
  if (!(min_leaf_weight > 0)) throw Error(ErrorKind::BadConfig, "min_leaf_weight must be > 0");
  if (min_gain < 0) throw Error(ErrorKind::BadConfig, "min_gain must be >= 0");
  if (n_trees < 1) throw Error(ErrorKind::BadConfig, "n_trees must be >= 1");
  if (feature_subset < 0) throw Error(ErrorKind::BadConfig, "feature_subset must be >= 1 (0 = auto)");
  if (n_bins < 2) throw Error(ErrorKind::BadConfig, "n_bins must be >= 2");
  if (!(gd.learning_rate > 0)) throw Error(ErrorKind::BadConfig, "learning_rate must be > 0");
  if (gd.max_iters < 0) throw Error(ErrorKind::BadConfig, "max_iters must be >= 0");
  if (!(gd.tol >= 0)) throw Error(ErrorKind::BadConfig, "tol must be >= 0");
  if (gd.init_steepness < 0) throw Error(ErrorKind::BadConfig, "init_steepness must be >= 0");
}

Membership fuzzy_membership(double a, double b, double c, double x) {
  if (x <= a) return {1.0, 0.0, 0.0};
  if (x >= c) return {0.0, 0.0, 1.0};
  if (x <= b) {
    double t = (x - a) / (b - a);  // complementary pair sums to exactly 1
    return {1.0 - t, t, 0.0};
  }
  double s = (x - b) / (c - b);
  return {0.0, 1.0 - s, s};
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

void check_arity(const QualityImpactModel& m, std::span<const double> x) {
  if (x.size() != m.encoded_arity())
    throw Error(ErrorKind::ArityMismatch, "encoded point has arity " + std::to_string(x.size()) +
                                              ", model expects " +
                                              std::to_string(m.encoded_arity()));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Human-readable branch condition for explanation traces.
std::string branch_condition(const QualityImpactModel& m, const TreeNode& n, int branch,
                             std::span<const double> x) {
  const EncodedColumn& col = m.columns[static_cast<std::size_t>(n.feature)];
  switch (n.kind) {
    case NodeKind::Split:
      if (col.onehot) return branch == 0 ? "!" + col.name : col.name;
      return col.name + (branch == 0 ? "<=" : ">") + fmt(n.threshold);
    case NodeKind::FuzzySplit: {
      Membership mu = fuzzy_membership(n.a, n.b, n.c, x[static_cast<std::size_t>(n.feature)]);
      double w = branch == 0 ? mu.left : branch == 1 ? mu.mid : mu.right;
      const char* set = branch == 0 ? "low" : branch == 1 ? "mid" : "high";
      return col.name + "~" + set + "(" + fmt(n.a) + "," + fmt(n.b) + "," + fmt(n.c) +
             "):mu=" + fmt(w);
    }
    case NodeKind::Gate: {
      double g = sigmoid(n.slope * x[static_cast<std::size_t>(n.feature)] + n.offset);
      double w = branch == 0 ? 1.0 - g : g;
      return col.name + (branch == 0 ? "<~" : ">~") + fmt(-n.offset / n.slope) + ":g=" + fmt(w);
    }
    case NodeKind::Leaf: break;
  }
  return "";
}

// Trace-building traversal of one tree; weights multiply along the path.
void trace_tree(const QualityImpactModel& m, int tree_index, std::span<const double> x,
                std::vector<TraceEntry>& out, double top_weight) {
  const Tree& tree = m.trees[static_cast<std::size_t>(tree_index)];
  struct Item {
    int node;
    double weight;
    std::string conditions;
  };
  std::vector<Item> stack;
  stack.push_back({tree.root, top_weight, ""});
  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(item.node)];
    if (n.kind == NodeKind::Leaf) {
      out.push_back({tree_index, item.node, item.weight, m.leaf_value(n.leaf),
                     item.conditions.empty() ? "(root)" : item.conditions});
      continue;
    }
    auto push = [&](int branch, double w) {
      if (w <= 0.0) return;
      std::string cond = item.conditions;
      if (!cond.empty()) cond += " & ";
      cond += branch_condition(m, n, branch, x);
      stack.push_back({n.child[static_cast<std::size_t>(branch)], item.weight * w, std::move(cond)});
    };
    switch (n.kind) {
      case NodeKind::Split: {
        bool left = x[static_cast<std::size_t>(n.feature)] <= n.threshold;
        push(left ? 0 : 1, 1.0);
        break;
      }
      case NodeKind::FuzzySplit: {
        Membership mu = fuzzy_membership(n.a, n.b, n.c, x[static_cast<std::size_t>(n.feature)]);
        push(2, mu.right);
        push(1, mu.mid);
        push(0, mu.left);
        break;
      }
      case NodeKind::Gate: {
        double g = sigmoid(n.slope * x[static_cast<std::size_t>(n.feature)] + n.offset);
        push(1, g);
        push(0, 1.0 - g);
        break;
      }
      case NodeKind::Leaf: break;
    }
  }
}

}  // namespace

double predict_value(const QualityImpactModel& m, std::span<const double> encoded) {
  check_arity(m, encoded);
  double sum = 0.0;
  for (const Tree& tree : m.trees) {
    double tree_value = 0.0;
    visit_leaves(tree, encoded, [&](int node, double w) {
      tree_value += w * m.leaf_value(tree.nodes[static_cast<std::size_t>(node)].leaf);
    });
    sum += tree_value;
  }
  return sum / static_cast<double>(m.trees.size());
}

UncertaintyEstimate predict(const QualityImpactModel& m, std::span<const double> encoded) {
  check_arity(m, encoded);
  UncertaintyEstimate est;
  est.calibrated = m.calibrated;
  double inv = 1.0 / static_cast<double>(m.trees.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < m.trees.size(); ++t) {
    std::size_t first = est.trace.size();
    trace_tree(m, static_cast<int>(t), encoded, est.trace, inv);
    double tree_value = 0.0;
    for (std::size_t i = first; i < est.trace.size(); ++i)
      tree_value += est.trace[i].weight * est.trace[i].leaf_u;
    sum += tree_value;
  }
  est.value = sum;
  return est;
}

UncertaintyEstimate predict_point(const QualityImpactModel& m, const DataPoint& p) {
  return predict(m, encode_point(m.schema, m.columns, p));
}

double predict_point_value(const QualityImpactModel& m, const DataPoint& p) {
  return predict_value(m, encode_point(m.schema, m.columns, p));
}

void validate_model(const QualityImpactModel& m) {
  m.schema.validate();
  m.hp.validate();
  if (m.trees.empty()) throw Error(ErrorKind::CorruptModel, "model has no trees");
  if (m.columns.size() != encoding_for(m.schema).size())
    throw Error(ErrorKind::CorruptModel, "encoded column count does not match schema");
  const int arity = static_cast<int>(m.encoded_arity());
  for (const Tree& tree : m.trees) {
    const int n = static_cast<int>(tree.nodes.size());
    if (n == 0 || tree.root < 0 || tree.root >= n)
      throw Error(ErrorKind::CorruptModel, "bad tree root");
    for (const TreeNode& node : tree.nodes) {
      int expected_children = node.kind == NodeKind::Leaf ? 0
                              : node.kind == NodeKind::FuzzySplit ? 3
                                                                  : 2;
      for (int i = 0; i < expected_children; ++i) {
        int ch = node.child[static_cast<std::size_t>(i)];
        if (ch < 0 || ch >= n) throw Error(ErrorKind::CorruptModel, "child index out of range");
      }
      if (node.kind != NodeKind::Leaf && (node.feature < 0 || node.feature >= arity))
        throw Error(ErrorKind::CorruptModel, "feature index out of range");
      if (node.kind == NodeKind::FuzzySplit && !(node.a < node.b && node.b < node.c))
        throw Error(ErrorKind::CorruptModel, "fuzzy anchors not ascending");
      if (node.kind == NodeKind::Leaf) {
        const LeafStats& s = node.leaf;
        if (s.weight_correct < 0 || s.weight_incorrect < 0 || s.raw_u < 0 || s.raw_u > 1)
          throw Error(ErrorKind::CorruptModel, "bad leaf stats");
        if (s.calibrated_u && (*s.calibrated_u < 0 || *s.calibrated_u > 1))
          throw Error(ErrorKind::CorruptModel, "calibrated_u out of [0,1]");
      }
    }
  }
}

}  // namespace softwrap
