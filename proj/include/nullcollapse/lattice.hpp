#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace nullcollapse {

// Periodic 1+1 light-cone lattice of fixed width N, truncated to the first
// `depth` vertices (row-major) to the future of the initial surface.
//
// Adjacency: vertex (r, c) receives its left-going ingoing link from (r-1, c)
// and its right-going ingoing link from (r-1, c-1 mod N). Its left-going
// outgoing link feeds (r+1, c), the right-going one feeds (r+1, c+1 mod N).
//
// Physical link ids: the 2N links of the initial surface are 0..2N-1,
// alternating (left-going, right-going) by column. The outgoing links of
// vertex v are 2N + 2v (left-going) and 2N + 2v + 1 (right-going).

struct LatticeSpec {
  int width = 1;
  int depth = 1;
};

enum class Direction { left, right };

struct Vertex {
  int id = 0;  // row-major index, 0-based
  int row = 0;
  int column = 0;
};

struct Link {
  int id = 0;
  Direction direction = Direction::left;
  int source = -1;  // vertex id, -1 for links of the initial surface
  int slot = 0;
};

// labelling.order[i] is the vertex id carrying label v_{i+1}.
struct NaturalLabelling {
  std::vector<int> order;

  int size() const { return static_cast<int>(order.size()); }
  bool operator==(const NaturalLabelling&) const = default;
};

struct SpatialSurface {
  int step = 0;
  std::vector<int> links;  // physical link id, indexed by slot
};

class LabellingError : public std::invalid_argument {
 public:
  LabellingError(const std::string& what, int earlier, int later)
      : std::invalid_argument(what), earlier_(earlier), later_(later) {}

  // 1-based labels (i, j), i < j, where v_j causally precedes v_i.
  // Both are 0 when the candidate is not a permutation at all.
  int earlier() const { return earlier_; }
  int later() const { return later_; }

 private:
  int earlier_;
  int later_;
};

class LatticeGeometry {
 public:
  explicit LatticeGeometry(LatticeSpec spec) : spec_(spec) {
    if (spec.width < 1) throw std::invalid_argument("lattice width must be >= 1");
    if (spec.depth < 1) throw std::invalid_argument("lattice depth must be >= 1");
    build();
  }

  int width() const { return spec_.width; }
  int depth() const { return spec_.depth; }
  int slot_count() const { return 2 * spec_.width; }
  int link_count() const { return static_cast<int>(links_.size()); }

  const Vertex& vertex(int id) const { return vertices_.at(id); }
  const Link& link(int id) const { return links_.at(id); }

  int left_in(int v) const { return left_in_.at(v); }
  int right_in(int v) const { return right_in_.at(v); }
  int left_out(int v) const { check_vertex(v); return slot_count() + 2 * v; }
  int right_out(int v) const { check_vertex(v); return slot_count() + 2 * v + 1; }

  // Slot of the Hilbert-space factor a link occupies. A link inherits the
  // slot of the ingoing link it vertically replaces.
  int slot_of(int link_id) const { return links_.at(link_id).slot; }

  // Strict causal order: u precedes v along a directed path of links.
  bool precedes(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    return reach_[static_cast<std::size_t>(u) * spec_.depth + v];
  }

  bool spacelike(int u, int v) const { return u != v && !precedes(u, v) && !precedes(v, u); }

  NaturalLabelling row_major() const {
    NaturalLabelling l;
    l.order.resize(spec_.depth);
    for (int i = 0; i < spec_.depth; ++i) l.order[i] = i;
    return l;
  }

  // Accepts a 1-based permutation of vertex ids (candidate[i] = row-major
  // index + 1 of the vertex labelled v_{i+1}).
  NaturalLabelling validate_labelling(const std::vector<int>& candidate) const {
    const int n = spec_.depth;
    if (static_cast<int>(candidate.size()) != n)
      throw LabellingError("labelling must have " + std::to_string(n) + " entries", 0, 0);
    std::vector<bool> seen(n, false);
    NaturalLabelling l;
    l.order.reserve(n);
    for (int x : candidate) {
      if (x < 1 || x > n || seen[x - 1])
        throw LabellingError("labelling is not a permutation of 1.." + std::to_string(n), 0, 0);
      seen[x - 1] = true;
      l.order.push_back(x - 1);
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (precedes(l.order[j], l.order[i])) {
          throw LabellingError("labelling is not a linear extension: v_" + std::to_string(j + 1) +
                                   " causally precedes v_" + std::to_string(i + 1),
                               i + 1, j + 1);
        }
      }
    }
    return l;
  }

  NaturalLabelling validate_labelling(const NaturalLabelling& labelling) const {
    std::vector<int> one_based(labelling.order.size());
    std::transform(labelling.order.begin(), labelling.order.end(), one_based.begin(),
                   [](int v) { return v + 1; });
    return validate_labelling(one_based);
  }

  SpatialSurface surface_at(const NaturalLabelling& labelling, int n) const {
    if (n < 0 || n > spec_.depth)
      throw std::out_of_range("surface step " + std::to_string(n) + " outside 0.." +
                              std::to_string(spec_.depth));
    SpatialSurface s;
    s.step = n;
    s.links.resize(slot_count());
    for (int k = 0; k < slot_count(); ++k) s.links[k] = k;
    for (int i = 0; i < n; ++i) {
      const int v = labelling.order.at(i);
      s.links[slot_of(left_out(v))] = left_out(v);
      s.links[slot_of(right_out(v))] = right_out(v);
    }
    return s;
  }

  // Physical id of labelled link l_a (a >= 1) under a labelling.
  int labelled_link(const NaturalLabelling& labelling, int a) const {
    if (a < 1 || a > 2 * labelling.size()) throw std::out_of_range("link label out of range");
    const int v = labelling.order[(a - 1) / 2];
    return (a % 2 == 1) ? left_out(v) : right_out(v);
  }

 private:
  void check_vertex(int v) const {
    if (v < 0 || v >= spec_.depth) throw std::out_of_range("vertex id " + std::to_string(v));
  }

  void build() {
    const int n = spec_.width;
    const int d = spec_.depth;
    vertices_.resize(d);
    for (int v = 0; v < d; ++v) vertices_[v] = Vertex{v, v / n, v % n};

    links_.resize(2 * n + 2 * d);
    for (int k = 0; k < 2 * n; ++k)
      links_[k] = Link{k, k % 2 == 0 ? Direction::left : Direction::right, -1, k};

    left_in_.resize(d);
    right_in_.resize(d);
    for (int v = 0; v < d; ++v) {
      const int r = vertices_[v].row;
      const int c = vertices_[v].column;
      const int cl = (c + n - 1) % n;
      if (r == 0) {
        left_in_[v] = 2 * c;
        right_in_[v] = 2 * cl + 1;
      } else {
        left_in_[v] = 2 * n + 2 * ((r - 1) * n + c);
        right_in_[v] = 2 * n + 2 * ((r - 1) * n + cl) + 1;
      }
      links_[2 * n + 2 * v] = Link{2 * n + 2 * v, Direction::left, v, links_[left_in_[v]].slot};
      links_[2 * n + 2 * v + 1] =
          Link{2 * n + 2 * v + 1, Direction::right, v, links_[right_in_[v]].slot};
    }

    // Row-major order is a linear extension, so a single forward sweep closes
    // the reachability relation.
    reach_.assign(static_cast<std::size_t>(d) * d, false);
    for (int v = 0; v < d; ++v) {
      for (int in : {left_in_[v], right_in_[v]}) {
        const int u = links_[in].source;
        if (u < 0) continue;
        reach_[static_cast<std::size_t>(u) * d + v] = true;
        for (int w = 0; w < d; ++w)
          if (reach_[static_cast<std::size_t>(w) * d + u]) reach_[static_cast<std::size_t>(w) * d + v] = true;
      }
    }
  }

  LatticeSpec spec_;
  std::vector<Vertex> vertices_;
  std::vector<Link> links_;
  std::vector<int> left_in_;
  std::vector<int> right_in_;
  std::vector<bool> reach_;
};

inline LatticeGeometry build_lattice(LatticeSpec spec) { return LatticeGeometry(spec); }

}  // namespace nullcollapse
