#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace stride {

// Scalar expression DAG over a flat decision vector. Nodes are appended
// children-first, so a single forward sweep over the pool evaluates every
// expression and a single reverse sweep accumulates gradients. This is the
// whole derivative facility: the op set below is the supported primitive set,
// so anything that builds is differentiable by construction.

enum class Op : std::uint8_t { Const, Var, Add, Sub, Mul, Square, Scale };

struct ExprNode {
  Op op = Op::Const;
  std::int32_t a = -1;  // child / variable index
  std::int32_t b = -1;
  double c = 0.0;  // constant value or scale factor
};

class ExprPool;

/// Lightweight handle to a node in an ExprPool; supports arithmetic
/// composition via the overloads below.
class Expr {
 public:
  Expr() = default;
  Expr(ExprPool* pool, std::int32_t id) : pool_(pool), id_(id) {}

  std::int32_t id() const { return id_; }
  ExprPool* pool() const { return pool_; }
  bool valid() const { return pool_ != nullptr && id_ >= 0; }

 private:
  ExprPool* pool_ = nullptr;
  std::int32_t id_ = -1;
};

struct SparseGradient {
  double value = 0.0;
  std::vector<std::pair<std::int32_t, double>> entries;  // (variable, d/dx), sorted by variable
};

class ExprPool {
 public:
  Expr constant(double c);
  Expr var(std::int32_t index);
  Expr add(Expr a, Expr b);
  Expr sub(Expr a, Expr b);
  Expr mul(Expr a, Expr b);
  Expr square(Expr a);
  Expr scale(double k, Expr a);

  std::int32_t size() const { return static_cast<std::int32_t>(nodes_.size()); }
  std::int32_t num_vars() const { return num_vars_; }
  const ExprNode& node(std::int32_t id) const { return nodes_[id]; }

  /// Forward sweep over all nodes; `values` is resized to the pool size.
  void forward(std::span<const double> x, std::vector<double>& values) const;

  /// Reverse sweep over the whole pool. `adjoints` must be pool-sized and
  /// pre-seeded (typically one weight per constraint root plus the cost
  /// root); gradients are accumulated into `grad` (size num_vars, caller
  /// zeroed or accumulated intentionally). `adjoints` is consumed.
  void reverse(const std::vector<double>& values, std::vector<double>& adjoints,
               std::span<double> grad) const;

  // Hessian-vector products by forward-over-reverse: run tangent_forward
  // for a direction, seed `adjoints` with the root weights and
  // `adjoint_dots` with their directional derivatives, then reverse_pair
  // accumulates the product into `hv`. Both seed vectors are consumed.
  void tangent_forward(const std::vector<double>& values, std::span<const double> tangent,
                       std::vector<double>& value_dots) const;
  void reverse_pair(const std::vector<double>& values, const std::vector<double>& value_dots,
                    std::vector<double>& adjoints, std::vector<double>& adjoint_dots,
                    std::span<double> hv) const;

  /// Ascending list of nodes reachable from `root` (the root's subtape).
  std::vector<std::int32_t> subtape(std::int32_t root) const;

  /// Sorted variable indices appearing under `root` (the stable sparsity
  /// pattern of d(root)/dx).
  std::vector<std::int32_t> variables_of(std::int32_t root) const;

  /// Value + sparse first derivative of one root at `x`, evaluated over the
  /// root's subtape only.
  SparseGradient gradient(std::int32_t root, std::span<const double> x) const;
  double value(std::int32_t root, std::span<const double> x) const;

  /// Total polynomial degree of the expression (Const 0, Var 1, Mul sums,
  /// Square doubles). Used to sanity-check convexity tags.
  int polynomial_degree(std::int32_t root) const;

 private:
  std::int32_t push(ExprNode n);
  void check(Expr e) const;

  std::vector<ExprNode> nodes_;
  std::vector<std::int32_t> var_nodes_;  // dedup: one node per variable
  std::int32_t num_vars_ = 0;
};

inline Expr operator+(Expr a, Expr b) { return a.pool()->add(a, b); }
inline Expr operator-(Expr a, Expr b) { return a.pool()->sub(a, b); }
inline Expr operator*(Expr a, Expr b) { return a.pool()->mul(a, b); }
inline Expr operator*(double k, Expr a) { return a.pool()->scale(k, a); }
inline Expr operator-(Expr a) { return a.pool()->scale(-1.0, a); }
inline Expr operator+(Expr a, double c) { return a.pool()->add(a, a.pool()->constant(c)); }
inline Expr operator-(Expr a, double c) { return a + (-c); }
inline Expr square(Expr a) { return a.pool()->square(a); }

}  // namespace stride
