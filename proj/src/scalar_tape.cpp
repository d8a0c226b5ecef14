#include "scalar_tape.h"

#include <cmath>
#include <cstdlib>

namespace creinn {

std::vector<uint8_t> STape::branch_signature() const {
  std::vector<uint8_t> sig;
  for (const auto& n : nodes) {
    if (n.op == Min)
      sig.push_back(val[n.a] <= val[n.b] ? 0 : 1);
    else if (n.op == Max)
      sig.push_back(val[n.a] >= val[n.b] ? 0 : 1);
  }
  return sig;
}

void STape::backward(int out) {
  grad.assign(val.size(), 0.0);
  grad[out] = 1.0;
  for (int i = (int)nodes.size() - 1; i >= 0; --i) {
    double g = grad[i];
    if (g == 0.0) continue;
    const Node& n = nodes[i];
    switch (n.op) {
      case Leaf:
        break;
      case Add:
        grad[n.a] += g;
        grad[n.b] += g;
        break;
      case Sub:
        grad[n.a] += g;
        grad[n.b] -= g;
        break;
      case Mul:
        grad[n.a] += g * val[n.b];
        grad[n.b] += g * val[n.a];
        break;
      case Div:
        grad[n.a] += g / val[n.b];
        grad[n.b] -= g * val[i] / val[n.b];
        break;
      case Neg:
        grad[n.a] -= g;
        break;
      case Exp:
        grad[n.a] += g * val[i];
        break;
      case Log:
        grad[n.a] += g / val[n.a];
        break;
      case Min:
        if (val[n.a] <= val[n.b]) grad[n.a] += g; else grad[n.b] += g;
        break;
      case Max:
        if (val[n.a] >= val[n.b]) grad[n.a] += g; else grad[n.b] += g;
        break;
    }
  }
}

FdReport finite_diff_check(
    const std::function<int(STape&, const std::vector<int>&)>& build,
    const std::vector<double>& x0, double h) {
  auto eval = [&](const std::vector<double>& x, std::vector<double>* grad_out,
                  std::vector<uint8_t>* sig) {
    STape t;
    std::vector<int> ids;
    ids.reserve(x.size());
    for (double v : x) ids.push_back(t.leaf(v));
    int out = build(t, ids);
    if (sig) *sig = t.branch_signature();
    if (grad_out) {
      t.backward(out);
      grad_out->assign(x.size(), 0.0);
      for (size_t i = 0; i < x.size(); ++i) (*grad_out)[i] = t.grad[ids[i]];
    }
    return t.val[out];
  };

  std::vector<double> g;
  std::vector<uint8_t> base_sig;
  eval(x0, &g, &base_sig);

  FdReport rep;
  std::vector<double> x = x0;
  for (size_t i = 0; i < x0.size(); ++i) {
    std::vector<uint8_t> sp, sm;
    x[i] = x0[i] + h;
    double fp = eval(x, nullptr, &sp);
    x[i] = x0[i] - h;
    double fm = eval(x, nullptr, &sm);
    x[i] = x0[i];
    if (sp != base_sig || sm != base_sig) {
      rep.tie_coords.push_back((int)i);
      continue;
    }
    double fd = (fp - fm) / (2.0 * h);
    double denom = std::max({std::fabs(g[i]), std::fabs(fd), 1e-6});
    double rel = std::fabs(g[i] - fd) / denom;
    if (rel > rep.max_rel_err) {
      rep.max_rel_err = rel;
      rep.worst_coord = (int)i;
    }
  }
  return rep;
}

}  // namespace creinn
