#include "graphiht/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace graphiht {

Graph::Graph(int num_vertices, std::vector<Edge> edges)
    : p_(num_vertices), edges_(std::move(edges)) {
  if (p_ <= 0) throw std::invalid_argument("Graph: num_vertices must be positive");
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges_) {
    if (e.u < 0 || e.u >= p_ || e.v < 0 || e.v >= p_)
      throw std::invalid_argument("Graph: edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("Graph: self loops are not allowed");
    if (e.w < 0.0) throw std::invalid_argument("Graph: negative edge weight");
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second)
      throw std::invalid_argument("Graph: duplicate undirected edge");
  }
  std::vector<int> degree(p_, 0);
  for (const Edge& e : edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  adj_start_.assign(p_ + 1, 0);
  for (int v = 0; v < p_; ++v) adj_start_[v + 1] = adj_start_[v] + degree[v];
  adj_flat_.resize(edges_.size() * 2);
  std::vector<int> cursor(adj_start_.begin(), adj_start_.end() - 1);
  for (int idx = 0; idx < static_cast<int>(edges_.size()); ++idx) {
    const Edge& e = edges_[idx];
    adj_flat_[cursor[e.u]++] = {e.v, idx};
    adj_flat_[cursor[e.v]++] = {e.u, idx};
  }
}

Graph Graph::grid(int rows, int cols) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("grid: rows and cols must be positive");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(rows) * (cols - 1) +
                static_cast<std::size_t>(cols) * (rows - 1));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) edges.push_back({v, v + 1, 1.0});
      if (r + 1 < rows) edges.push_back({v, v + cols, 1.0});
    }
  }
  return Graph(rows * cols, std::move(edges));
}

std::span<const std::pair<int, int>> Graph::neighbors(int v) const {
  return {adj_flat_.data() + adj_start_[v],
          static_cast<std::size_t>(adj_start_[v + 1] - adj_start_[v])};
}

void WgmModel::validate(int p) const {
  if (components < 1 || sparsity < components || sparsity > p)
    throw std::invalid_argument("WgmModel: need 1 <= g <= s <= p");
  if (cost_budget < 0.0) throw std::invalid_argument("WgmModel: negative cost budget");
  if (head_slack < 1.0 || tail_slack < 1.0)
    throw std::invalid_argument("WgmModel: slack factors must be >= 1");
}

int WgmModel::head_limit() const {
  return static_cast<int>(std::ceil(head_slack * sparsity));
}

int WgmModel::tail_limit() const {
  return static_cast<int>(std::ceil(tail_slack * sparsity));
}

WgmModel slack_model(const WgmModel& model, int size_limit) {
  WgmModel out = model;
  out.sparsity = std::max(model.sparsity, size_limit);
  out.cost_budget = model.cost_budget + (out.sparsity - model.sparsity);
  return out;
}

namespace {

// Any listing order is accepted; duplicates are rejected.
void check_support(const Graph& graph, const Support& support) {
  std::vector<char> seen(graph.num_vertices(), 0);
  for (int v : support) {
    if (v < 0 || v >= graph.num_vertices())
      throw std::invalid_argument("support index out of range");
    if (seen[v]) throw std::invalid_argument("support indices must be unique");
    seen[v] = 1;
  }
}

}  // namespace

int connected_components(const Graph& graph, const Support& support) {
  check_support(graph, support);
  if (support.empty()) return 0;
  std::vector<int> mark(graph.num_vertices(), -1);
  for (std::size_t i = 0; i < support.size(); ++i) mark[support[i]] = 0;
  int count = 0;
  std::vector<int> stack;
  for (int root : support) {
    if (mark[root] != 0) continue;
    ++count;
    mark[root] = 1;
    stack.push_back(root);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (auto [u, eidx] : graph.neighbors(v)) {
        (void)eidx;
        if (mark[u] == 0) {
          mark[u] = 1;
          stack.push_back(u);
        }
      }
    }
  }
  return count;
}

double msf_weight(const Graph& graph, const Support& support) {
  check_support(graph, support);
  if (support.size() <= 1) return 0.0;
  std::vector<int> in(graph.num_vertices(), 0);
  for (int v : support) in[v] = 1;
  struct Cand {
    double w;
    int idx;
  };
  std::vector<Cand> cands;
  for (int idx = 0; idx < static_cast<int>(graph.edges().size()); ++idx) {
    const Edge& e = graph.edges()[idx];
    if (in[e.u] && in[e.v]) cands.push_back({e.w, idx});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return a.w != b.w ? a.w < b.w : a.idx < b.idx;
  });
  std::vector<int> parent(graph.num_vertices());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  double total = 0.0;
  for (const Cand& c : cands) {
    const Edge& e = graph.edges()[c.idx];
    const int ru = find(e.u), rv = find(e.v);
    if (ru != rv) {
      parent[ru] = rv;
      total += e.w;
    }
  }
  return total;
}

bool is_in_model(const Graph& graph, const Support& support, const WgmModel& model) {
  check_support(graph, support);
  if (support.empty()) return true;
  if (static_cast<int>(support.size()) > model.sparsity) return false;
  if (connected_components(graph, support) > model.components) return false;
  const double w = msf_weight(graph, support);
  return w <= model.cost_budget + 1e-9 * std::max(1.0, std::abs(model.cost_budget));
}

Support random_connected_support(const Graph& graph, int s, int g, Rng& rng,
                                 int retries) {
  if (g < 1 || s < g || s > graph.num_vertices())
    throw std::invalid_argument("random_connected_support: need 1 <= g <= s <= p");
  const int p = graph.num_vertices();

  // Component sizes: as even as possible, deterministic.
  std::vector<int> sizes(g, s / g);
  for (int i = 0; i < s % g; ++i) ++sizes[i];

  for (int attempt = 0; attempt < retries; ++attempt) {
    // forbidden: in a chosen component or adjacent to one. Keeping walks off
    // each other's neighborhoods is what pins the component count exactly.
    std::vector<char> forbidden(p, 0);
    std::vector<char> in_support(p, 0);
    Support support;
    bool failed = false;
    for (int comp = 0; comp < g && !failed; ++comp) {
      const int want = sizes[comp];
      std::vector<int> starts;
      for (int v = 0; v < p; ++v)
        if (!forbidden[v]) starts.push_back(v);
      if (starts.empty()) {
        failed = true;
        break;
      }
      int cur = starts[rng.bounded(starts.size())];
      std::vector<int> members{cur};
      in_support[cur] = 1;
      int guard = 0;
      while (static_cast<int>(members.size()) < want) {
        if (++guard > 50 * want + 200) {
          failed = true;
          break;
        }
        auto nbrs = graph.neighbors(cur);
        if (nbrs.empty()) {
          failed = true;
          break;
        }
        const int nxt = nbrs[rng.bounded(nbrs.size())].first;
        if (forbidden[nxt]) {
          // Walk may not cross into another component's halo; restart the
          // walk position somewhere inside the current component.
          cur = members[rng.bounded(members.size())];
          continue;
        }
        if (!in_support[nxt]) {
          in_support[nxt] = 1;
          members.push_back(nxt);
        }
        cur = nxt;
      }
      if (failed) {
        for (int v : support) in_support[v] = 0;
        for (int v : members) in_support[v] = 0;
        break;
      }
      for (int v : members) {
        support.push_back(v);
        forbidden[v] = 1;
        for (auto [u, eidx] : graph.neighbors(v)) {
          (void)eidx;
          forbidden[u] = 1;
        }
      }
    }
    if (!failed) {
      std::sort(support.begin(), support.end());
      return support;
    }
  }
  throw GenerationError("random_connected_support: could not place " +
                        std::to_string(g) + " components of total size " +
                        std::to_string(s));
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  std::string tag;
  int p = 0;
  std::size_t m = 0;
  if (!(in >> tag >> p >> m) || tag != "p")
    throw std::runtime_error("bad graph header in " + path);
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Edge e;
    if (!(in >> tag >> e.u >> e.v >> e.w) || tag != "e")
      throw std::runtime_error("bad edge line in " + path);
    edges.push_back(e);
  }
  return Graph(p, std::move(edges));
}

void save_edge_list(const Graph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file: " + path);
  out << "p " << graph.num_vertices() << " " << graph.edges().size() << "\n";
  out.precision(17);
  for (const Edge& e : graph.edges())
    out << "e " << e.u << " " << e.v << " " << e.w << "\n";
}

}  // namespace graphiht
