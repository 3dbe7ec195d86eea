#include "qrc/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qrc {

std::string_view to_string(Side side) {
  switch (side) {
    case Side::User:
      return "user";
    case Side::Item:
      return "item";
    case Side::Author:
      return "author";
  }
  return "unknown";
}

BipartiteGraph BipartiteGraph::from_edges(Index n_left, Index n_right,
                                          std::span<const WeightedEdge> edges) {
  for (const auto& e : edges) {
    if (e.left >= n_left || e.right >= n_right) {
      std::ostringstream msg;
      msg << "edge (" << e.left << ", " << e.right << ") out of range for " << n_left << " x "
          << n_right << " network";
      throw DataError(msg.str());
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      std::ostringstream msg;
      msg << "edge (" << e.left << ", " << e.right << ") has non-positive weight " << e.weight;
      throw DataError(msg.str());
    }
  }

  // Sorting a permutation keeps the caller's buffer untouched and gives the
  // left-major, ascending-neighbor order directly.
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = edges[a];
    const auto& eb = edges[b];
    return ea.left != eb.left ? ea.left < eb.left : ea.right < eb.right;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& prev = edges[order[k - 1]];
    const auto& cur = edges[order[k]];
    if (prev.left == cur.left && prev.right == cur.right) {
      std::ostringstream msg;
      msg << "duplicate edge (" << cur.left << ", " << cur.right << ")";
      throw DataError(msg.str());
    }
  }

  BipartiteGraph g;
  g.n_left_ = n_left;
  g.n_right_ = n_right;

  auto fill = [&](Csr& csr, Index n_rows, auto row_of, auto col_of) {
    csr.offsets.assign(static_cast<std::size_t>(n_rows) + 1, 0);
    for (const auto& e : edges) ++csr.offsets[row_of(e) + 1];
    std::partial_sum(csr.offsets.begin(), csr.offsets.end(), csr.offsets.begin());
    csr.targets.resize(edges.size());
    csr.weights.resize(edges.size());
    std::vector<std::size_t> cursor(csr.offsets.begin(), csr.offsets.end() - 1);
    // Walking edges in left-major sorted order yields sorted rows on both sides.
    for (std::size_t idx : order) {
      const auto& e = edges[idx];
      const std::size_t pos = cursor[row_of(e)]++;
      csr.targets[pos] = col_of(e);
      csr.weights[pos] = e.weight;
    }
  };
  fill(
      g.left_, n_left, [](const WeightedEdge& e) { return e.left; },
      [](const WeightedEdge& e) { return e.right; });
  fill(
      g.right_, n_right, [](const WeightedEdge& e) { return e.right; },
      [](const WeightedEdge& e) { return e.left; });
  return g;
}

Index BipartiteGraph::degree(Part p, Index node) const {
  const auto& c = csr(p);
  return static_cast<Index>(c.offsets[node + 1] - c.offsets[node]);
}

std::vector<Index> BipartiteGraph::degrees(Part p) const {
  std::vector<Index> out(count(p));
  for (Index i = 0; i < count(p); ++i) out[i] = degree(p, i);
  return out;
}

std::span<const Index> BipartiteGraph::neighbors(Part p, Index node) const {
  const auto& c = csr(p);
  return {c.targets.data() + c.offsets[node], c.offsets[node + 1] - c.offsets[node]};
}

std::span<const double> BipartiteGraph::weights(Part p, Index node) const {
  const auto& c = csr(p);
  return {c.weights.data() + c.offsets[node], c.offsets[node + 1] - c.offsets[node]};
}

std::optional<double> BipartiteGraph::weight_of(Index left, Index right) const {
  if (left >= n_left_ || right >= n_right_) return std::nullopt;
  const auto nb = neighbors(Part::Left, left);
  const auto it = std::lower_bound(nb.begin(), nb.end(), right);
  if (it == nb.end() || *it != right) return std::nullopt;
  return weights(Part::Left, left)[static_cast<std::size_t>(it - nb.begin())];
}

BipartiteGraph BipartiteGraph::unweighted() const {
  BipartiteGraph g = *this;
  std::fill(g.left_.weights.begin(), g.left_.weights.end(), 1.0);
  std::fill(g.right_.weights.begin(), g.right_.weights.end(), 1.0);
  return g;
}

BipartiteGraph BipartiteGraph::normalized(Part source, double exponent) const {
  BipartiteGraph g = *this;
  if (exponent == 0.0) return g;
  // Scale factor per source node; both CSR copies must see the same value.
  std::vector<double> scale(count(source));
  for (Index i = 0; i < count(source); ++i) {
    const Index d = degree(source, i);
    scale[i] = d == 0 ? 1.0 : 1.0 / std::pow(static_cast<double>(d), exponent);
  }
  Csr& own = source == Part::Left ? g.left_ : g.right_;
  Csr& other = source == Part::Left ? g.right_ : g.left_;
  for (Index i = 0; i < count(source); ++i) {
    for (std::size_t k = own.offsets[i]; k < own.offsets[i + 1]; ++k) own.weights[k] *= scale[i];
  }
  for (std::size_t k = 0; k < other.targets.size(); ++k) other.weights[k] *= scale[other.targets[k]];
  return g;
}

std::vector<WeightedEdge> BipartiteGraph::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(edge_count());
  for (Index i = 0; i < n_left_; ++i) {
    const auto nb = neighbors(Part::Left, i);
    const auto w = weights(Part::Left, i);
    for (std::size_t k = 0; k < nb.size(); ++k) out.push_back({i, nb[k], w[k]});
  }
  return out;
}

bool BipartiteGraph::is_connected() const {
  if (empty()) return true;
  // Union-find over left nodes followed by right nodes.
  std::vector<Index> parent(static_cast<std::size_t>(n_left_) + n_right_);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (Index i = 0; i < n_left_; ++i) {
    for (Index a : neighbors(Part::Left, i)) {
      const Index ra = find(i);
      const Index rb = find(n_left_ + a);
      if (ra != rb) parent[ra] = rb;
    }
  }
  std::optional<Index> root;
  for (Index x = 0; x < parent.size(); ++x) {
    const bool isolated = x < n_left_ ? degree(Part::Left, x) == 0
                                      : degree(Part::Right, x - n_left_) == 0;
    if (isolated) continue;
    const Index r = find(x);
    if (!root) {
      root = r;
    } else if (*root != r) {
      return false;
    }
  }
  return true;
}

std::vector<double> aggregate(const BipartiteGraph& graph, std::span<const double> input,
                              Part toward, double theta, double rho, double shift_mean) {
  const Part from = opposite(toward);
  if (input.size() != graph.count(from)) {
    std::ostringstream msg;
    msg << "aggregate: input has " << input.size() << " entries, expected " << graph.count(from);
    throw DataError(msg.str());
  }
  const double shift = rho * shift_mean;
  std::vector<double> out(graph.count(toward), 0.0);
  for (Index t = 0; t < graph.count(toward); ++t) {
    const auto nb = graph.neighbors(toward, t);
    if (nb.empty()) continue;
    const auto w = graph.weights(toward, t);
    double sum = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) sum += w[k] * (input[nb[k]] - shift);
    if (theta != 0.0) sum /= std::pow(static_cast<double>(nb.size()), theta);
    out[t] = sum;
  }
  return out;
}

LabelIndex::LabelIndex(std::vector<std::string> labels) {
  for (auto& l : labels) {
    if (find(l)) throw DataError("duplicate label '" + l + "'");
    intern(l);
  }
}

Index LabelIndex::intern(const std::string& label) {
  const auto [it, inserted] = index_.try_emplace(label, static_cast<Index>(labels_.size()));
  if (inserted) labels_.push_back(label);
  return it->second;
}

std::optional<Index> LabelIndex::find(const std::string& label) const {
  const auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LabelIndex LabelIndex::dense(std::size_t n) {
  LabelIndex idx;
  idx.labels_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) idx.intern(std::to_string(i));
  return idx;
}

namespace {

LabelIndex labels_or_dense(LabelIndex labels, Index n, const char* what) {
  if (labels.size() == 0 && n > 0) return LabelIndex::dense(n);
  if (labels.size() != n) {
    std::ostringstream msg;
    msg << what << " label count " << labels.size() << " does not match node count " << n;
    throw DataError(msg.str());
  }
  return labels;
}

}  // namespace

UserItemNetwork::UserItemNetwork(BipartiteGraph graph, LabelIndex users, LabelIndex items)
    : graph_(std::move(graph)),
      users_(labels_or_dense(std::move(users), graph_.count(Part::Left), "user")),
      items_(labels_or_dense(std::move(items), graph_.count(Part::Right), "item")) {}

UserItemNetwork UserItemNetwork::unweighted_view() const {
  return UserItemNetwork(graph_.unweighted(), users_, items_);
}

UserItemNetwork UserItemNetwork::normalized_view(double exponent) const {
  return UserItemNetwork(graph_.normalized(Part::Left, exponent), users_, items_);
}

UserItemNetwork UserItemNetwork::scaled(double factor) const {
  if (!(factor > 0.0)) throw DataError("scale factor must be positive");
  auto edges = graph_.edges();
  for (auto& e : edges) e.weight *= factor;
  return UserItemNetwork(BipartiteGraph::from_edges(n_users(), n_items(), edges), users_, items_);
}

UserItemNetwork build_user_item_network(std::span<const UserItemEdge> edges, Index n_users,
                                        Index n_items) {
  std::vector<WeightedEdge> converted;
  converted.reserve(edges.size());
  for (const auto& e : edges) {
    n_users = std::max(n_users, e.user + 1);
    n_items = std::max(n_items, e.item + 1);
    converted.push_back({e.user, e.item, e.weight});
  }
  return UserItemNetwork(BipartiteGraph::from_edges(n_users, n_items, converted), {}, {});
}

AuthorPaperNetwork::AuthorPaperNetwork(BipartiteGraph graph, LabelIndex authors,
                                       LabelIndex papers)
    : graph_(std::move(graph)),
      authors_(labels_or_dense(std::move(authors), graph_.count(Part::Left), "author")),
      papers_(labels_or_dense(std::move(papers), graph_.count(Part::Right), "paper")) {}

AuthorPaperNetwork AuthorPaperNetwork::normalized_view(double exponent) const {
  return AuthorPaperNetwork(graph_.normalized(Part::Left, exponent), authors_, papers_);
}

AuthorPaperNetwork build_author_paper_network(std::span<const Authorship> links,
                                              Index n_authors, Index n_papers) {
  std::vector<WeightedEdge> converted;
  converted.reserve(links.size());
  for (const auto& l : links) converted.push_back({l.author, l.paper, 1.0});
  auto graph = BipartiteGraph::from_edges(n_authors, n_papers, converted);
  for (Index m = 0; m < n_authors; ++m) {
    if (graph.degree(Part::Left, m) == 0) {
      throw DataError("author " + std::to_string(m) + " has no papers");
    }
  }
  return AuthorPaperNetwork(std::move(graph), {}, {});
}

}  // namespace qrc
