#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qrc/types.hpp"

namespace qrc {

// The two node classes of a bipartite graph. Users and authors live on the
// left, items (papers) on the right.
enum class Part { Left, Right };

constexpr Part opposite(Part p) { return p == Part::Left ? Part::Right : Part::Left; }

struct WeightedEdge {
  Index left = 0;
  Index right = 0;
  double weight = 1.0;
};

// Immutable sparse bipartite graph stored twice in CSR form, once indexed by
// left node and once by right node. Neighbor lists are sorted by ascending id
// so that every traversal (and every sum over it) has a fixed order.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  // Rejects duplicate pairs, out-of-range ids and non-positive or non-finite
  // weights.
  static BipartiteGraph from_edges(Index n_left, Index n_right,
                                   std::span<const WeightedEdge> edges);

  Index count(Part p) const { return p == Part::Left ? n_left_ : n_right_; }
  std::size_t edge_count() const { return left_.targets.size(); }
  bool empty() const { return edge_count() == 0; }

  // Unweighted degree of node `node` on part `p`.
  Index degree(Part p, Index node) const;
  std::vector<Index> degrees(Part p) const;

  std::span<const Index> neighbors(Part p, Index node) const;
  std::span<const double> weights(Part p, Index node) const;

  // Weight of the (left, right) edge, or nullopt if absent.
  std::optional<double> weight_of(Index left, Index right) const;

  // Every stored weight replaced by 1.
  BipartiteGraph unweighted() const;

  // Each edge weight divided by deg(source)^exponent, where deg is the
  // unweighted degree of the endpoint on `source`.
  BipartiteGraph normalized(Part source, double exponent = 0.5) const;

  // Edges enumerated in left-major order.
  std::vector<WeightedEdge> edges() const;

  // True when every node with at least one edge lies in a single connected
  // component. Isolated nodes are ignored.
  bool is_connected() const;

 private:
  struct Csr {
    std::vector<std::size_t> offsets;
    std::vector<Index> targets;
    std::vector<double> weights;
  };

  const Csr& csr(Part p) const { return p == Part::Left ? left_ : right_; }

  Index n_left_ = 0;
  Index n_right_ = 0;
  Csr left_;
  Csr right_;
};

// out_t = (1 / deg_t^theta) * sum_{s ~ t} w_ts (in_s - rho * shift_mean),
// computed for every node t on `toward`; `input` lives on the opposite part.
// Nodes with degree 0 produce 0.
std::vector<double> aggregate(const BipartiteGraph& graph, std::span<const double> input,
                              Part toward, double theta, double rho, double shift_mean);

// Label <-> dense index map retained for reporting.
class LabelIndex {
 public:
  LabelIndex() = default;
  explicit LabelIndex(std::vector<std::string> labels);

  // Index of `label`, inserting it if new.
  Index intern(const std::string& label);
  std::optional<Index> find(const std::string& label) const;
  const std::string& label(Index i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

  // Labels "0", "1", ..., "n-1".
  static LabelIndex dense(std::size_t n);

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Index> index_;
};

struct UserItemEdge {
  Index user = 0;
  Index item = 0;
  double weight = 1.0;
};

// Weighted user-item network W. Users are the left part, items the right.
class UserItemNetwork {
 public:
  UserItemNetwork() = default;
  UserItemNetwork(BipartiteGraph graph, LabelIndex users, LabelIndex items);

  const BipartiteGraph& graph() const { return graph_; }
  Index n_users() const { return graph_.count(Part::Left); }
  Index n_items() const { return graph_.count(Part::Right); }
  std::size_t edge_count() const { return graph_.edge_count(); }
  Index user_degree(Index u) const { return graph_.degree(Part::Left, u); }
  Index item_degree(Index a) const { return graph_.degree(Part::Right, a); }

  const LabelIndex& user_labels() const { return users_; }
  const LabelIndex& item_labels() const { return items_; }

  // Unweighted view E.
  UserItemNetwork unweighted_view() const;
  // w_ia / k_i^exponent.
  UserItemNetwork normalized_view(double exponent = 0.5) const;
  // Every weight multiplied by `factor` > 0.
  UserItemNetwork scaled(double factor) const;

 private:
  BipartiteGraph graph_;
  LabelIndex users_;
  LabelIndex items_;
};

// Dense ids; N and M are one past the largest id seen unless given larger.
UserItemNetwork build_user_item_network(std::span<const UserItemEdge> edges,
                                        Index n_users = 0, Index n_items = 0);

// Binary author-paper network P. Authors are the left part, papers the right.
class AuthorPaperNetwork {
 public:
  AuthorPaperNetwork() = default;
  AuthorPaperNetwork(BipartiteGraph graph, LabelIndex authors, LabelIndex papers);

  const BipartiteGraph& graph() const { return graph_; }
  Index n_authors() const { return graph_.count(Part::Left); }
  Index n_papers() const { return graph_.count(Part::Right); }
  Index author_degree(Index m) const { return graph_.degree(Part::Left, m); }
  Index paper_degree(Index a) const { return graph_.degree(Part::Right, a); }

  const LabelIndex& author_labels() const { return authors_; }
  const LabelIndex& paper_labels() const { return papers_; }

  // p_ma / d_m^exponent.
  AuthorPaperNetwork normalized_view(double exponent = 0.5) const;

 private:
  BipartiteGraph graph_;
  LabelIndex authors_;
  LabelIndex papers_;
};

struct Authorship {
  Index author = 0;
  Index paper = 0;
};

// Every author must have at least one paper; n_papers may exceed the largest
// paper id (papers without known authors).
AuthorPaperNetwork build_author_paper_network(std::span<const Authorship> links,
                                              Index n_authors, Index n_papers);

}  // namespace qrc
