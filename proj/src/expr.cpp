#include "stride/expr.hpp"

#include <algorithm>

namespace stride {

std::int32_t ExprPool::push(ExprNode n) {
  nodes_.push_back(n);
  return static_cast<std::int32_t>(nodes_.size()) - 1;
}

void ExprPool::check(Expr e) const {
  if (e.pool() != this || e.id() < 0 || e.id() >= size())
    throw std::logic_error("expression handle does not belong to this pool");
}

Expr ExprPool::constant(double c) { return {this, push({Op::Const, -1, -1, c})}; }

Expr ExprPool::var(std::int32_t index) {
  if (index < 0) throw std::logic_error("negative variable index");
  if (index >= static_cast<std::int32_t>(var_nodes_.size())) var_nodes_.resize(index + 1, -1);
  if (var_nodes_[index] < 0) {
    var_nodes_[index] = push({Op::Var, index, -1, 0.0});
    num_vars_ = std::max(num_vars_, index + 1);
  }
  return {this, var_nodes_[index]};
}

Expr ExprPool::add(Expr a, Expr b) {
  check(a);
  check(b);
  return {this, push({Op::Add, a.id(), b.id(), 0.0})};
}

Expr ExprPool::sub(Expr a, Expr b) {
  check(a);
  check(b);
  return {this, push({Op::Sub, a.id(), b.id(), 0.0})};
}

Expr ExprPool::mul(Expr a, Expr b) {
  check(a);
  check(b);
  return {this, push({Op::Mul, a.id(), b.id(), 0.0})};
}

Expr ExprPool::square(Expr a) {
  check(a);
  return {this, push({Op::Square, a.id(), -1, 0.0})};
}

Expr ExprPool::scale(double k, Expr a) {
  check(a);
  return {this, push({Op::Scale, a.id(), -1, k})};
}

void ExprPool::forward(std::span<const double> x, std::vector<double>& values) const {
  values.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    switch (n.op) {
      case Op::Const: values[i] = n.c; break;
      case Op::Var: values[i] = x[n.a]; break;
      case Op::Add: values[i] = values[n.a] + values[n.b]; break;
      case Op::Sub: values[i] = values[n.a] - values[n.b]; break;
      case Op::Mul: values[i] = values[n.a] * values[n.b]; break;
      case Op::Square: values[i] = values[n.a] * values[n.a]; break;
      case Op::Scale: values[i] = n.c * values[n.a]; break;
    }
  }
}

void ExprPool::reverse(const std::vector<double>& values, std::vector<double>& adjoints,
                       std::span<double> grad) const {
  for (std::int32_t i = static_cast<std::int32_t>(nodes_.size()) - 1; i >= 0; --i) {
    const double w = adjoints[i];
    if (w == 0.0) continue;
    const ExprNode& n = nodes_[i];
    switch (n.op) {
      case Op::Const: break;
      case Op::Var: grad[n.a] += w; break;
      case Op::Add:
        adjoints[n.a] += w;
        adjoints[n.b] += w;
        break;
      case Op::Sub:
        adjoints[n.a] += w;
        adjoints[n.b] -= w;
        break;
      case Op::Mul:
        adjoints[n.a] += w * values[n.b];
        adjoints[n.b] += w * values[n.a];
        break;
      case Op::Square: adjoints[n.a] += 2.0 * w * values[n.a]; break;
      case Op::Scale: adjoints[n.a] += n.c * w; break;
    }
  }
}

void ExprPool::tangent_forward(const std::vector<double>& values, std::span<const double> tangent,
                               std::vector<double>& value_dots) const {
  value_dots.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    switch (n.op) {
      case Op::Const: value_dots[i] = 0.0; break;
      case Op::Var: value_dots[i] = tangent[n.a]; break;
      case Op::Add: value_dots[i] = value_dots[n.a] + value_dots[n.b]; break;
      case Op::Sub: value_dots[i] = value_dots[n.a] - value_dots[n.b]; break;
      case Op::Mul: value_dots[i] = value_dots[n.a] * values[n.b] + values[n.a] * value_dots[n.b]; break;
      case Op::Square: value_dots[i] = 2.0 * values[n.a] * value_dots[n.a]; break;
      case Op::Scale: value_dots[i] = n.c * value_dots[n.a]; break;
    }
  }
}

void ExprPool::reverse_pair(const std::vector<double>& values, const std::vector<double>& value_dots,
                            std::vector<double>& adjoints, std::vector<double>& adjoint_dots,
                            std::span<double> hv) const {
  for (std::int32_t i = static_cast<std::int32_t>(nodes_.size()) - 1; i >= 0; --i) {
    const double w = adjoints[i];
    const double wd = adjoint_dots[i];
    if (w == 0.0 && wd == 0.0) continue;
    const ExprNode& n = nodes_[i];
    switch (n.op) {
      case Op::Const: break;
      case Op::Var: hv[n.a] += wd; break;
      case Op::Add:
        adjoints[n.a] += w;
        adjoint_dots[n.a] += wd;
        adjoints[n.b] += w;
        adjoint_dots[n.b] += wd;
        break;
      case Op::Sub:
        adjoints[n.a] += w;
        adjoint_dots[n.a] += wd;
        adjoints[n.b] -= w;
        adjoint_dots[n.b] -= wd;
        break;
      case Op::Mul:
        adjoints[n.a] += w * values[n.b];
        adjoint_dots[n.a] += wd * values[n.b] + w * value_dots[n.b];
        adjoints[n.b] += w * values[n.a];
        adjoint_dots[n.b] += wd * values[n.a] + w * value_dots[n.a];
        break;
      case Op::Square:
        adjoints[n.a] += 2.0 * w * values[n.a];
        adjoint_dots[n.a] += 2.0 * (wd * values[n.a] + w * value_dots[n.a]);
        break;
      case Op::Scale:
        adjoints[n.a] += n.c * w;
        adjoint_dots[n.a] += n.c * wd;
        break;
    }
  }
}

std::vector<std::int32_t> ExprPool::subtape(std::int32_t root) const {
  std::vector<std::int32_t> out;
  std::vector<std::int32_t> stack{root};
  std::vector<bool> seen(nodes_.size(), false);
  while (!stack.empty()) {
    const std::int32_t id = stack.back();
    stack.pop_back();
    if (id < 0 || seen[id]) continue;
    seen[id] = true;
    out.push_back(id);
    const ExprNode& n = nodes_[id];
    if (n.op != Op::Const && n.op != Op::Var) {
      stack.push_back(n.a);
      if (n.op == Op::Add || n.op == Op::Sub || n.op == Op::Mul) stack.push_back(n.b);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::int32_t> ExprPool::variables_of(std::int32_t root) const {
  std::vector<std::int32_t> vars;
  for (std::int32_t id : subtape(root))
    if (nodes_[id].op == Op::Var) vars.push_back(nodes_[id].a);
  std::sort(vars.begin(), vars.end());
  return vars;
}

double ExprPool::value(std::int32_t root, std::span<const double> x) const {
  const auto tape = subtape(root);
  std::vector<double> v(nodes_.size());
  for (std::int32_t id : tape) {
    const ExprNode& n = nodes_[id];
    switch (n.op) {
      case Op::Const: v[id] = n.c; break;
      case Op::Var: v[id] = x[n.a]; break;
      case Op::Add: v[id] = v[n.a] + v[n.b]; break;
      case Op::Sub: v[id] = v[n.a] - v[n.b]; break;
      case Op::Mul: v[id] = v[n.a] * v[n.b]; break;
      case Op::Square: v[id] = v[n.a] * v[n.a]; break;
      case Op::Scale: v[id] = n.c * v[n.a]; break;
    }
  }
  return v[root];
}

SparseGradient ExprPool::gradient(std::int32_t root, std::span<const double> x) const {
  const auto tape = subtape(root);
  std::vector<double> v(nodes_.size(), 0.0), adj(nodes_.size(), 0.0);
  for (std::int32_t id : tape) {
    const ExprNode& n = nodes_[id];
    switch (n.op) {
      case Op::Const: v[id] = n.c; break;
      case Op::Var: v[id] = x[n.a]; break;
      case Op::Add: v[id] = v[n.a] + v[n.b]; break;
      case Op::Sub: v[id] = v[n.a] - v[n.b]; break;
      case Op::Mul: v[id] = v[n.a] * v[n.b]; break;
      case Op::Square: v[id] = v[n.a] * v[n.a]; break;
      case Op::Scale: v[id] = n.c * v[n.a]; break;
    }
  }
  SparseGradient g;
  g.value = v[root];
  adj[root] = 1.0;
  for (auto it = tape.rbegin(); it != tape.rend(); ++it) {
    const std::int32_t id = *it;
    const double w = adj[id];
    if (w == 0.0) continue;
    const ExprNode& n = nodes_[id];
    switch (n.op) {
      case Op::Const: break;
      case Op::Var: g.entries.emplace_back(n.a, w); break;
      case Op::Add:
        adj[n.a] += w;
        adj[n.b] += w;
        break;
      case Op::Sub:
        adj[n.a] += w;
        adj[n.b] -= w;
        break;
      case Op::Mul:
        adj[n.a] += w * v[n.b];
        adj[n.b] += w * v[n.a];
        break;
      case Op::Square: adj[n.a] += 2.0 * w * v[n.a]; break;
      case Op::Scale: adj[n.a] += n.c * w; break;
    }
  }
  std::sort(g.entries.begin(), g.entries.end());
  return g;
}

int ExprPool::polynomial_degree(std::int32_t root) const {
  std::vector<int> deg(nodes_.size(), -1);
  const auto tape = subtape(root);
  for (std::int32_t id : tape) {
    const ExprNode& n = nodes_[id];
    switch (n.op) {
      case Op::Const: deg[id] = 0; break;
      case Op::Var: deg[id] = 1; break;
      case Op::Add:
      case Op::Sub: deg[id] = std::max(deg[n.a], deg[n.b]); break;
      case Op::Mul: deg[id] = deg[n.a] + deg[n.b]; break;
      case Op::Square: deg[id] = 2 * deg[n.a]; break;
      case Op::Scale: deg[id] = deg[n.a]; break;
    }
  }
  return deg[root];
}

}  // namespace stride
