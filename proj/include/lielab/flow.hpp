#pragma once

#include "lielab/deformation.hpp"
#include "lielab/norm.hpp"

namespace lielab {

/// Group law x*y in double precision from a tensor and a BCH table, with a reverse pass.
class ProductPlan {
 public:
  ProductPlan() = default;
  ProductPlan(const NumericTensor& t, const BchTable& table) : n_(t.dim()) {
    for (const auto& e : t.entries()) entries_.push_back({e.i, e.j, e.k, e.c});
    std::map<Word, int> index;
    std::function<int(const Word&)> node = [&](const Word& w) -> int {
      if (auto it = index.find(w); it != index.end()) return it->second;
      const int tail = w.size() == 1 ? -1 : node(Word(w.begin() + 1, w.end()));
      nodes_.push_back({static_cast<int>(w[0]), tail, 0.0});
      return index[w] = static_cast<int>(nodes_.size()) - 1;
    };
    for (const auto& [w, c] : table.terms()) nodes_[node(w)].coef = c.get_d();
  }

  std::size_t dim() const { return n_; }
  std::size_t tape_size() const { return nodes_.size() * n_; }

  /// out = x*y; `tape` receives every nested bracket for the reverse pass.
  void forward(const double* x, const double* y, double* out, double* tape) const {
    std::fill(out, out + n_, 0.0);
    for (std::size_t a = 0; a < nodes_.size(); ++a) {
      double* v = tape + a * n_;
      const Node& nd = nodes_[a];
      const double* head = nd.head == 0 ? x : y;
      if (nd.tail < 0) {
        std::copy(head, head + n_, v);
      } else {
        std::fill(v, v + n_, 0.0);
        const double* u = tape + static_cast<std::size_t>(nd.tail) * n_;
        for (const auto& e : entries_) v[e.k] += e.c * (head[e.i] * u[e.j] - head[e.j] * u[e.i]);
      }
      if (nd.coef != 0)
        for (std::size_t i = 0; i < n_; ++i) out[i] += nd.coef * v[i];
    }
  }

  /// Given d(out), accumulates d(x) and d(y). `work` needs tape_size() doubles.
  void backward(const double* x, const double* y, const double* tape, const double* gout, double* gx,
                double* gy, double* work) const {
    std::fill(work, work + tape_size(), 0.0);
    for (std::size_t a = 0; a < nodes_.size(); ++a)
      if (nodes_[a].coef != 0)
        for (std::size_t i = 0; i < n_; ++i) work[a * n_ + i] = nodes_[a].coef * gout[i];
    for (std::size_t a = nodes_.size(); a-- > 0;) {
      const Node& nd = nodes_[a];
      const double* gv = work + a * n_;
      const double* head = nd.head == 0 ? x : y;
      double* ghead = nd.head == 0 ? gx : gy;
      if (nd.tail < 0) {
        for (std::size_t i = 0; i < n_; ++i) ghead[i] += gv[i];
        continue;
      }
      const double* u = tape + static_cast<std::size_t>(nd.tail) * n_;
      double* gu = work + static_cast<std::size_t>(nd.tail) * n_;
      for (const auto& e : entries_) {
        const double g = e.c * gv[e.k];
        if (g == 0) continue;
        ghead[e.i] += g * u[e.j];
        ghead[e.j] -= g * u[e.i];
        gu[e.j] += g * head[e.i];
        gu[e.i] -= g * head[e.j];
      }
    }
  }

  std::vector<double> bracket(const std::vector<double>& x, const std::vector<double>& y) const {
    std::vector<double> v(n_, 0.0);
    for (const auto& e : entries_) v[e.k] += e.c * (x[e.i] * y[e.j] - x[e.j] * y[e.i]);
    return v;
  }

  std::vector<double> operator()(const std::vector<double>& x, const std::vector<double>& y) const {
    std::vector<double> out(n_), tape(tape_size());
    forward(x.data(), y.data(), out.data(), tape.data());
    return out;
  }

 private:
  struct Entry {
    std::size_t i, j, k;
    double c;
  };
  struct Node {
    int head;
    int tail;
    double coef;
  };
  std::size_t n_ = 0;
  std::vector<Entry> entries_;
  std::vector<Node> nodes_;
};

/// Step of a tensor, or the truncation order when it is not nilpotent.
inline int product_order(const StructureTensor& t, std::optional<int> truncation) {
  if (auto s = nilpotency_step(t)) return std::max(*s, 1);
  if (!truncation) throw Error("non-nilpotent algebra: a BCH truncation order is required");
  return *truncation;
}

/// One left-invariant sub-Finsler structure in exponential coordinates:
/// a group law, a velocity map from distribution coordinates, and the norm on them.
struct Metric {
  ProductPlan product;
  Eigen::MatrixXd velocity;  // n x m
  DistributionNorm norm;
  /// Adapted basis of the grading that measures homogeneous size, and its weights.
  Eigen::MatrixXd graded_basis, graded_inverse;
  std::vector<int> weights;
  /// Coordinates farther than this from the origin are refused (0 = unlimited).
  double radius = 0;

  /// sum_j |(x)_j|^(1/j)
  double homogeneous_size(const std::vector<double>& x) const {
    const Eigen::VectorXd y = graded_inverse * to_eigen(x);
    const int s = *std::max_element(weights.begin(), weights.end());
    double total = 0;
    for (int j = 1; j <= s; ++j) {
      Eigen::VectorXd yj = Eigen::VectorXd::Zero(y.size());
      for (Eigen::Index a = 0; a < y.size(); ++a)
        if (weights[a] == j) yj(a) = y(a);
      total += std::pow((graded_basis * yj).norm(), 1.0 / j);
    }
    return total;
  }
  std::size_t dim() const { return product.dim(); }
  std::size_t controls() const { return static_cast<std::size_t>(velocity.cols()); }
};

/// Piecewise-constant control: segment i has duration durations[i] and distribution
/// coordinates controls[i].
struct ControlPath {
  std::vector<double> durations;
  std::vector<Eigen::VectorXd> controls;
  std::size_t size() const { return durations.size(); }
  static ControlPath uniform(std::size_t segments, std::size_t m) {
    ControlPath p;
    p.durations.assign(segments, 1.0 / static_cast<double>(segments));
    p.controls.assign(segments, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m)));
    return p;
  }
  void append(const ControlPath& o) {
    durations.insert(durations.end(), o.durations.begin(), o.durations.end());
    controls.insert(controls.end(), o.controls.begin(), o.controls.end());
  }
};

inline double path_length(const Metric& g, const ControlPath& p) {
  double l = 0;
  for (std::size_t i = 0; i < p.size(); ++i) l += p.durations[i] * g.norm(p.controls[i]);
  return l;
}

/// Endpoint x0 * (t_1 u_1) * ... * (t_k u_k); exact for nilpotent groups.
inline std::vector<double> flow(const Metric& g, const std::vector<double>& x0, const ControlPath& p) {
  std::vector<double> x = x0, next(g.dim()), tape(g.product.tape_size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Eigen::VectorXd s = p.durations[i] * (g.velocity * p.controls[i]);
    g.product.forward(x.data(), s.data(), next.data(), tape.data());
    std::swap(x, next);
  }
  return x;
}

}  // namespace lielab
