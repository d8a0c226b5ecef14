#pragma once
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace creinn {

// Dynamic scalar tape: records elementary ops as they execute (the graph is
// rebuilt on every forward pass) and replays them in reverse for gradients.
// Ties in min/max send the full derivative to the FIRST operand.
struct STape {
  enum Op : uint8_t { Leaf, Add, Sub, Mul, Div, Neg, Exp, Log, Min, Max };

  struct Node {
    Op op;
    int a = -1, b = -1;
  };

  std::vector<Node> nodes;
  std::vector<double> val, grad;

  void clear() {
    nodes.clear();
    val.clear();
    grad.clear();
  }

  int leaf(double v) { return push({Leaf, -1, -1}, v); }
  int add(int x, int y) { return push({Add, x, y}, val[x] + val[y]); }
  int sub(int x, int y) { return push({Sub, x, y}, val[x] - val[y]); }
  int mul(int x, int y) { return push({Mul, x, y}, val[x] * val[y]); }
  int div(int x, int y) { return push({Div, x, y}, val[x] / val[y]); }
  int neg(int x) { return push({Neg, x, -1}, -val[x]); }
  int exp_(int x) { return push({Exp, x, -1}, std::exp(val[x])); }
  int log_(int x) { return push({Log, x, -1}, std::log(val[x])); }
  int min_(int x, int y) { return push({Min, x, y}, val[x] <= val[y] ? val[x] : val[y]); }
  int max_(int x, int y) { return push({Max, x, y}, val[x] >= val[y] ? val[x] : val[y]); }

  // Records which branch each min/max took, in tape order; used by the finite
  // difference harness to detect tie crossings.
  std::vector<uint8_t> branch_signature() const;

  // Reverse sweep from `out`; fills `grad` for every node.
  void backward(int out);

 private:
  int push(Node n, double v) {
    nodes.push_back(n);
    val.push_back(v);
    return (int)nodes.size() - 1;
  }
};

// Central finite differences against tape gradients for a scalar function of
// `x0`. `build` must construct the expression on the given tape from the leaf
// ids and return the output node. Coordinates where a perturbed evaluation
// changes a min/max branch are reported in `tie_coords` and excluded from the
// error maximum (the derivative is genuinely one-sided there).
struct FdReport {
  double max_rel_err = 0.0;
  int worst_coord = -1;
  std::vector<int> tie_coords;
};

FdReport finite_diff_check(
    const std::function<int(STape&, const std::vector<int>&)>& build,
    const std::vector<double>& x0, double h = 1e-5);

}  // namespace creinn
