#include "graphiht/pcsf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace graphiht {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Event {
  double time;
  int kind;   // 0 = edge, 1 = deactivation; edges fire first on ties
  int index;  // edge index or cluster root vertex
  bool operator<(const Event& o) const {
    if (time != o.time) return time > o.time;  // min-heap via std::*_heap
    if (kind != o.kind) return kind > o.kind;
    return index > o.index;
  }
};

// All growth and pruning state, reused across solves to keep the inner
// binary searches of the projections allocation-free.
struct Workspace {
  int p = -1;
  std::size_t m = 0;

  // growth
  std::vector<int> parent;
  std::vector<double> cl_prize, cl_dual, cl_last;
  std::vector<char> cl_active;
  std::vector<int> mem_head, mem_tail, mem_next;
  std::vector<double> moat;
  std::vector<double> queued_time;  // earliest queued event per edge
  std::vector<Event> heap;
  std::vector<int> revive;

  // pruning
  std::vector<int> slot, deg, leaf_edge, adj_head;
  std::vector<char> mark;
  std::vector<char> seen;
  std::vector<double> sub_prize, sub_cost;
  std::vector<std::array<int, 3>> arcs;  // (to, edge, next)

  void ensure(int p_new, std::size_t m_new) {
    if (p_new != p) {
      p = p_new;
      parent.resize(p);
      cl_prize.resize(p);
      cl_dual.resize(p);
      cl_last.resize(p);
      cl_active.resize(p);
      mem_head.resize(p);
      mem_tail.resize(p);
      mem_next.resize(p);
      moat.resize(p);
      slot.assign(p, -1);
      deg.assign(p, 0);
      leaf_edge.resize(p);
      adj_head.resize(p);
      mark.assign(p, 0);
      seen.assign(p, 0);
      sub_prize.resize(p);
      sub_cost.resize(p);
      revive.reserve(p);
    }
    if (m_new != m) {
      m = m_new;
      queued_time.resize(m);
    }
  }

  int find(int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void reset_parent(const std::vector<int>& verts) {
    for (int v : verts) parent[v] = v;
  }
};

Workspace& workspace() {
  thread_local Workspace ws;
  return ws;
}

// Goemans-Williamson moat growing over the reusable workspace.
class Growth {
 public:
  Growth(const PcsfInstance& inst, Workspace& ws) : inst_(inst), ws_(ws) {
    const int p = inst.graph->num_vertices();
    ws.ensure(p, inst.graph->edges().size());
    ws.heap.clear();
    for (int v = 0; v < p; ++v) {
      ws.parent[v] = v;
      ws.cl_prize[v] = inst.prizes[v];
      ws.cl_dual[v] = 0.0;
      ws.cl_last[v] = 0.0;
      ws.cl_active[v] = inst.prizes[v] > 0.0;
      ws.mem_head[v] = v;
      ws.mem_tail[v] = v;
      ws.mem_next[v] = -1;
      ws.moat[v] = 0.0;
      if (ws.cl_active[v]) ws.heap.push_back({inst.prizes[v], 1, v});
    }
    std::fill(ws.queued_time.begin(), ws.queued_time.end(), kInf);
    std::make_heap(ws.heap.begin(), ws.heap.end());
    merge_edges_.reserve(p);
    for (int e = 0; e < static_cast<int>(inst.graph->edges().size()); ++e)
      push_edge_event(e, 0.0);
  }

  const std::vector<int>& run() {
    auto& heap = ws_.heap;
    while (!heap.empty()) {
      std::pop_heap(heap.begin(), heap.end());
      const Event ev = heap.back();
      heap.pop_back();
      if (ev.kind == 0) {
        if (ws_.queued_time[ev.index] == ev.time) ws_.queued_time[ev.index] = kInf;
        handle_edge(ev);
      } else {
        handle_deactivation(ev);
      }
    }
    return merge_edges_;
  }

 private:
  void push(const Event& ev) {
    ws_.heap.push_back(ev);
    std::push_heap(ws_.heap.begin(), ws_.heap.end());
  }

  double moat_at(int v, int root, double t) const {
    return ws_.moat[v] + (ws_.cl_active[root] ? t - ws_.cl_last[root] : 0.0);
  }

  void push_edge_event(int e, double now) {
    const Edge& edge = inst_.graph->edges()[e];
    const int ru = ws_.find(edge.u), rv = ws_.find(edge.v);
    if (ru == rv) return;
    const int rate = (ws_.cl_active[ru] ? 1 : 0) + (ws_.cl_active[rv] ? 1 : 0);
    if (rate == 0) return;
    const double remaining =
        inst_.costs[e] - moat_at(edge.u, ru, now) - moat_at(edge.v, rv, now);
    const double when = now + std::max(0.0, remaining) / rate;
    if (ws_.queued_time[e] <= when) return;  // an earlier probe is queued
    ws_.queued_time[e] = when;
    push({when, 0, e});
  }

  void materialize(int root, double t) {
    if (ws_.cl_active[root]) {
      const double dt = t - ws_.cl_last[root];
      ws_.cl_dual[root] += dt;
      for (int v = ws_.mem_head[root]; v >= 0; v = ws_.mem_next[v]) ws_.moat[v] += dt;
    }
    ws_.cl_last[root] = t;
  }

  void handle_edge(const Event& ev) {
    const Edge& edge = inst_.graph->edges()[ev.index];
    const int ru = ws_.find(edge.u), rv = ws_.find(edge.v);
    if (ru == rv) return;
    const int rate = (ws_.cl_active[ru] ? 1 : 0) + (ws_.cl_active[rv] ? 1 : 0);
    const double remaining = inst_.costs[ev.index] - moat_at(edge.u, ru, ev.time) -
                             moat_at(edge.v, rv, ev.time);
    if (remaining > 1e-12 * (inst_.costs[ev.index] + 1.0)) {
      // Queued under an older cluster state; correct and retry.
      if (rate > 0) {
        const double when = ev.time + remaining / rate;
        if (ws_.queued_time[ev.index] > when) {
          ws_.queued_time[ev.index] = when;
          push({when, 0, ev.index});
        }
      }
      return;
    }

    materialize(ru, ev.time);
    materialize(rv, ev.time);
    merge_edges_.push_back(ev.index);

    // A dormant side that resumes growing needs fresh events for its
    // boundary edges, or they would never fire.
    ws_.revive.clear();
    if (!ws_.cl_active[ru])
      for (int v = ws_.mem_head[ru]; v >= 0; v = ws_.mem_next[v]) ws_.revive.push_back(v);
    if (!ws_.cl_active[rv])
      for (int v = ws_.mem_head[rv]; v >= 0; v = ws_.mem_next[v]) ws_.revive.push_back(v);

    const double prize = ws_.cl_prize[ru] + ws_.cl_prize[rv];
    const double dual = ws_.cl_dual[ru] + ws_.cl_dual[rv];
    const int big = ru;  // union order is irrelevant with list splicing
    const int small = rv;
    ws_.parent[small] = big;
    ws_.mem_next[ws_.mem_tail[big]] = ws_.mem_head[small];
    ws_.mem_tail[big] = ws_.mem_tail[small];
    ws_.cl_prize[big] = prize;
    ws_.cl_dual[big] = dual;
    ws_.cl_last[big] = ev.time;
    ws_.cl_active[big] = prize - dual > 0.0;

    if (ws_.cl_active[big]) {
      push({ev.time + (prize - dual), 1, big});
      for (int v : ws_.revive)
        for (auto [u, e] : inst_.graph->neighbors(v)) {
          (void)u;
          push_edge_event(e, ev.time);
        }
    }
  }

  void handle_deactivation(const Event& ev) {
    const int r = ev.index;
    if (ws_.parent[r] != r) return;  // merged since queued
    if (!ws_.cl_active[r]) return;
    if (ws_.cl_last[r] + (ws_.cl_prize[r] - ws_.cl_dual[r]) != ev.time) return;
    materialize(r, ev.time);
    ws_.cl_active[r] = false;
  }

  const PcsfInstance& inst_;
  Workspace& ws_;
  std::vector<int> merge_edges_;
};

struct Tree {
  std::vector<int> vertices;      // sorted
  std::vector<int> edge_indices;  // sorted
  double prize = 0.0;
  double cost = 0.0;
  double score() const { return prize - cost; }
};

// Minimum spanning forest of the subgraph induced by `verts`. Kruskal
// ordered by cost; equal costs prefer edges joining more prize mass (then
// the lower index), which keeps heavy vertices adjacent in the structure
// the projections later trim.
std::vector<int> induced_msf(const PcsfInstance& inst, Workspace& ws,
                             const std::vector<int>& verts) {
  const Graph& g = *inst.graph;
  for (int v : verts) ws.mark[v] = 1;
  struct Cand {
    double w;
    double mass;
    int idx;
  };
  std::vector<Cand> cands;
  for (int v : verts)
    for (auto [u, e] : g.neighbors(v))
      if (v < u && ws.mark[u])
        cands.push_back({inst.costs[e], inst.prizes[v] + inst.prizes[u], e});
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.w != b.w) return a.w < b.w;
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.idx < b.idx;
  });
  ws.reset_parent(verts);
  std::vector<int> out;
  for (const Cand& c : cands) {
    const Edge& ed = g.edges()[c.idx];
    const int ru = ws.find(ed.u), rv = ws.find(ed.v);
    if (ru != rv) {
      ws.parent[ru] = rv;
      out.push_back(c.idx);
    }
  }
  for (int v : verts) ws.mark[v] = 0;
  std::sort(out.begin(), out.end());
  return out;
}

// Repeatedly drop the leaf whose removal gains the most (edge cost minus
// prize) until no drop gains strictly. Ties keep the leaf. Works on forests.
void prune_leaves(const PcsfInstance& inst, Workspace& ws, std::vector<int>& verts,
                  std::vector<int>& eidx) {
  const Graph& g = *inst.graph;
  for (;;) {
    for (int v : verts) ws.deg[v] = 0;
    for (int e : eidx) {
      const Edge& ed = g.edges()[e];
      ++ws.deg[ed.u];
      ++ws.deg[ed.v];
      // valid only when the vertex ends up with degree one
      ws.leaf_edge[ed.u] = e;
      ws.leaf_edge[ed.v] = e;
    }
    int drop = -1;
    double best_gain = 0.0;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const int v = verts[i];
      if (ws.deg[v] != 1) continue;
      const double gain = inst.costs[ws.leaf_edge[v]] - inst.prizes[v];
      if (gain > best_gain) {
        best_gain = gain;
        drop = static_cast<int>(i);
      }
    }
    if (drop < 0) return;
    const int gone_edge = ws.leaf_edge[verts[drop]];
    verts.erase(verts.begin() + drop);
    eidx.erase(std::find(eidx.begin(), eidx.end(), gone_edge));
  }
}

// If the positive-prize vertices are connected on their own and their
// spanning forest is no more expensive, drop the zero-prize vertices.
void tighten(const PcsfInstance& inst, Workspace& ws, std::vector<int>& verts,
             std::vector<int>& eidx) {
  std::vector<int> positives;
  for (int v : verts)
    if (inst.prizes[v] > 0.0) positives.push_back(v);
  if (positives.empty() || positives.size() == verts.size()) return;

  const std::vector<int> msf = induced_msf(inst, ws, positives);
  if (msf.size() + 1 != positives.size()) return;  // positives not connected
  double msf_cost = 0.0, cur_cost = 0.0;
  for (int e : msf) msf_cost += inst.costs[e];
  for (int e : eidx) cur_cost += inst.costs[e];
  if (msf_cost <= cur_cost) {
    verts = positives;
    eidx = msf;
  }
}

std::vector<Tree> split_components(const PcsfInstance& inst, Workspace& ws,
                                   const std::vector<int>& verts,
                                   const std::vector<int>& eidx) {
  const Graph& g = *inst.graph;
  ws.reset_parent(verts);
  for (int e : eidx) {
    const Edge& ed = g.edges()[e];
    ws.parent[ws.find(ed.u)] = ws.find(ed.v);
  }
  std::vector<Tree> out;
  for (int v : verts) {
    const int r = ws.find(v);
    if (ws.slot[r] < 0) {
      ws.slot[r] = static_cast<int>(out.size());
      out.push_back({});
    }
    Tree& t = out[ws.slot[r]];
    t.vertices.push_back(v);
    t.prize += inst.prizes[v];
  }
  for (int e : eidx) {
    Tree& t = out[ws.slot[ws.find(g.edges()[e].u)]];
    t.edge_indices.push_back(e);
    t.cost += inst.costs[e];
  }
  for (int v : verts) ws.slot[ws.find(v)] = -1;
  return out;
}

// For a self-paying tree, the edge with the worst strictly negative
// marginal: where the cheaper side's net score falls short of the edge
// cost. Returns -1 when every attachment is justified (ties stay).
int worst_marginal_edge(const PcsfInstance& inst, Workspace& ws, const Tree& t) {
  const Graph& g = *inst.graph;
  if (t.edge_indices.empty()) return -1;
  for (int v : t.vertices) ws.adj_head[v] = -1;
  ws.arcs.clear();
  for (int e : t.edge_indices) {
    const Edge& ed = g.edges()[e];
    ws.arcs.push_back({ed.v, e, ws.adj_head[ed.u]});
    ws.adj_head[ed.u] = static_cast<int>(ws.arcs.size()) - 1;
    ws.arcs.push_back({ed.u, e, ws.adj_head[ed.v]});
    ws.adj_head[ed.v] = static_cast<int>(ws.arcs.size()) - 1;
  }
  const int root = t.vertices.front();
  // (vertex, parent, parent edge) in DFS preorder
  std::vector<std::tuple<int, int, int>> order;
  order.reserve(t.vertices.size());
  std::vector<std::tuple<int, int, int>> stack{{root, -1, -1}};
  while (!stack.empty()) {
    auto [v, parent, pe] = stack.back();
    stack.pop_back();
    order.push_back({v, parent, pe});
    for (int a = ws.adj_head[v]; a >= 0; a = ws.arcs[a][2]) {
      if (ws.arcs[a][0] != parent) stack.push_back({ws.arcs[a][0], v, ws.arcs[a][1]});
    }
  }
  for (int v : t.vertices) {
    ws.sub_prize[v] = 0.0;
    ws.sub_cost[v] = 0.0;
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto [v, parent, pe] = *it;
    ws.sub_prize[v] += inst.prizes[v];
    if (parent >= 0) {
      ws.sub_prize[parent] += ws.sub_prize[v];
      ws.sub_cost[parent] += ws.sub_cost[v] + inst.costs[pe];
    }
  }
  int cut = -1;
  double worst = 0.0;
  for (auto [v, parent, pe] : order) {
    if (parent < 0) continue;
    const double child_score = ws.sub_prize[v] - ws.sub_cost[v];
    const double rest_score =
        (t.prize - ws.sub_prize[v]) - (t.cost - ws.sub_cost[v] - inst.costs[pe]);
    const double violation = inst.costs[pe] - std::min(child_score, rest_score);
    if (violation > worst || (violation == worst && worst > 0.0 && pe < cut)) {
      worst = violation;
      cut = pe;
    }
  }
  return cut;
}

}  // namespace

Forest solve_pcsf(const PcsfInstance& instance) {
  const Graph& g = *instance.graph;
  const int p = g.num_vertices();
  if (static_cast<int>(instance.prizes.size()) != p)
    throw std::invalid_argument("solve_pcsf: prizes size must equal vertex count");
  if (instance.costs.size() != g.edges().size())
    throw std::invalid_argument("solve_pcsf: costs size must equal edge count");
  if (instance.target_components < 1)
    throw std::invalid_argument("solve_pcsf: target_components must be positive");
  for (double x : instance.prizes)
    if (x < 0.0 || !std::isfinite(x))
      throw std::invalid_argument("solve_pcsf: prizes must be finite and nonnegative");
  for (double x : instance.costs)
    if (x < 0.0 || !std::isfinite(x))
      throw std::invalid_argument("solve_pcsf: costs must be finite and nonnegative");

  Workspace& ws = workspace();
  Growth growth(instance, ws);
  const std::vector<int>& merge_edges = growth.run();

  // Collect the grown trees, rewired through their cheapest spanning
  // structure.
  for (int v = 0; v < p; ++v) ws.adj_head[v] = -1;
  ws.arcs.clear();
  for (int e : merge_edges) {
    const Edge& ed = g.edges()[e];
    ws.arcs.push_back({ed.v, e, ws.adj_head[ed.u]});
    ws.adj_head[ed.u] = static_cast<int>(ws.arcs.size()) - 1;
    ws.arcs.push_back({ed.u, e, ws.adj_head[ed.v]});
    ws.adj_head[ed.v] = static_cast<int>(ws.arcs.size()) - 1;
  }
  std::vector<Tree> work;
  {
    std::vector<char>& seen = ws.seen;  // cleared below
    std::vector<int> stack;
    for (int root = 0; root < p; ++root) {
      if (seen[root]) continue;
      std::vector<int> verts;
      stack.push_back(root);
      seen[root] = 1;
      while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        verts.push_back(v);
        for (int a = ws.adj_head[v]; a >= 0; a = ws.arcs[a][2]) {
          const int u = ws.arcs[a][0];
          if (!seen[u]) {
            seen[u] = 1;
            stack.push_back(u);
          }
        }
      }
      double prize = 0.0;
      for (int v : verts) prize += instance.prizes[v];
      if (prize <= 0.0) continue;
      std::sort(verts.begin(), verts.end());
      Tree t;
      t.edge_indices = induced_msf(instance, ws, verts);
      t.vertices = std::move(verts);
      work.push_back(std::move(t));
    }
    std::fill(seen.begin(), seen.end(), 0);
  }

  // Refine by cutting only; no prize is discarded before selection. A tree
  // that does not pay for itself is split at its most expensive edge; one
  // that does is still split at any strictly negative marginal, so a cheap
  // attachment survives as its own piece. Every emitted piece has
  // prize >= cost.
  std::vector<Tree> pieces;
  while (!work.empty()) {
    Tree t = std::move(work.back());
    work.pop_back();
    t.prize = t.cost = 0.0;
    for (int v : t.vertices) t.prize += instance.prizes[v];
    for (int e : t.edge_indices) t.cost += instance.costs[e];
    if (t.prize <= 0.0) continue;

    int cut = -1;
    if (t.prize >= t.cost) {
      cut = worst_marginal_edge(instance, ws, t);
      if (cut < 0) {
        pieces.push_back(std::move(t));
        continue;
      }
    } else {
      for (int e : t.edge_indices)
        if (cut < 0 || instance.costs[e] > instance.costs[cut]) cut = e;
      if (cut < 0) continue;  // isolated vertex with zero prize
    }
    t.edge_indices.erase(std::find(t.edge_indices.begin(), t.edge_indices.end(), cut));
    for (Tree& side : split_components(instance, ws, t.vertices, t.edge_indices))
      work.push_back(std::move(side));
  }

  std::sort(pieces.begin(), pieces.end(), [](const Tree& a, const Tree& b) {
    if (a.score() != b.score()) return a.score() > b.score();
    return a.vertices.front() < b.vertices.front();
  });

  // The component budget is a shared resource: each slot goes to whichever
  // is worth more, keeping the next piece (gains its prize minus cost) or
  // cutting the most expensive kept edge (gains its cost, keeps every
  // prize). Ties keep the piece. Once the slots are full, leaves whose
  // prize is strictly below their edge cost are shed; dropping a component
  // that lost all its prize frees its slot again.
  std::vector<int> kept_verts;
  std::vector<int> kept_edges;
  std::size_t next_piece = 0;
  for (int guard = 0; guard < 6 * p + 16; ++guard) {
    std::vector<Tree> comps = split_components(instance, ws, kept_verts, kept_edges);
    bool dropped = false;
    for (const Tree& c : comps) {
      if (c.prize <= 0.0 && !c.vertices.empty()) {
        for (int v : c.vertices)
          kept_verts.erase(std::find(kept_verts.begin(), kept_verts.end(), v));
        for (int e : c.edge_indices)
          kept_edges.erase(std::find(kept_edges.begin(), kept_edges.end(), e));
        dropped = true;
      }
    }
    if (dropped) continue;

    if (static_cast<int>(comps.size()) < instance.target_components) {
      const double piece_val =
          next_piece < pieces.size() ? pieces[next_piece].score() : -1.0;
      int cut = -1;
      for (int e : kept_edges)
        if (instance.costs[e] > 0.0 &&
            (cut < 0 || instance.costs[e] > instance.costs[cut]))
          cut = e;
      const double cut_val = cut >= 0 ? instance.costs[cut] : -1.0;
      if (piece_val >= 0.0 && piece_val >= cut_val) {
        const Tree& t = pieces[next_piece++];
        kept_verts.insert(kept_verts.end(), t.vertices.begin(), t.vertices.end());
        kept_edges.insert(kept_edges.end(), t.edge_indices.begin(),
                          t.edge_indices.end());
        std::sort(kept_verts.begin(), kept_verts.end());
        std::sort(kept_edges.begin(), kept_edges.end());
        continue;
      }
      if (cut >= 0) {
        kept_edges.erase(std::find(kept_edges.begin(), kept_edges.end(), cut));
        continue;
      }
    }

    const std::size_t before = kept_verts.size();
    prune_leaves(instance, ws, kept_verts, kept_edges);
    if (kept_verts.size() == before) break;
  }

  std::vector<Tree> finals = split_components(instance, ws, kept_verts, kept_edges);
  for (Tree& t : finals) tighten(instance, ws, t.vertices, t.edge_indices);

  Forest out;
  for (const Tree& t : finals) {
    out.vertices.insert(out.vertices.end(), t.vertices.begin(), t.vertices.end());
    out.edge_indices.insert(out.edge_indices.end(), t.edge_indices.begin(),
                            t.edge_indices.end());
  }
  std::sort(out.vertices.begin(), out.vertices.end());
  std::sort(out.edge_indices.begin(), out.edge_indices.end());
  out.num_trees = static_cast<int>(finals.size());
  return out;
}

double forest_objective(const PcsfInstance& instance, const Forest& forest) {
  std::vector<char> kept(instance.graph->num_vertices(), 0);
  for (int v : forest.vertices) kept[v] = 1;
  double obj = 0.0;
  for (int v = 0; v < instance.graph->num_vertices(); ++v)
    if (!kept[v]) obj += instance.prizes[v];
  for (int e : forest.edge_indices) obj += instance.costs[e];
  return obj;
}

}  // namespace graphiht
