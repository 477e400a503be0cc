#include "phenogen/nn/ops.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "phenogen/error.h"

namespace phenogen::nn {
namespace {

Tape& tape_of(Var a, const char* op) {
  if (!a.valid()) throw Error(Errc::kInvalidArgument, std::string(op) + ": unbound variable");
  return *a.tape();
}

Tape& tape_of(Var a, Var b, const char* op) {
  Tape& t = tape_of(a, op);
  if (b.tape() != &t) throw Error(Errc::kInvalidArgument, std::string(op) + ": operands on different tapes");
  return t;
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw Error(Errc::kShapeMismatch, std::string(op) + ": incompatible shapes " + std::to_string(a.rows()) + "x" +
                                        std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                                        std::to_string(b.cols()));
}

template <typename F, typename D>
Var unary(const char* op, Var x, F f, D dfdx_from_out_in) {
  Tape& t = tape_of(x, op);
  const Tensor& xv = x.value();
  Tensor out(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  const int xi = x.id();
  return t.record(op, std::move(out), {xi}, [xi, dfdx_from_out_in](Tape& tp, int self) {
    if (!tp.requires_grad(xi)) return;
    const Tensor& g = tp.grad(self);
    const Tensor& y = tp.value(self);
    const Tensor& in = tp.value(xi);
    Tensor& gx = tp.grad(xi);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * dfdx_from_out_in(y[i], in[i]);
  });
}

}  // namespace

Var matmul_t(Var x, Var w) {
  Tape& t = tape_of(x, w, "matmul");
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  if (xv.cols() != wv.cols()) shape_error("matmul", xv, wv);
  const int B = xv.rows(), K = xv.cols(), O = wv.rows();
  Tensor out(B, O);
  for (int r = 0; r < B; ++r) {
    const double* xr = xv.data() + static_cast<std::size_t>(r) * K;
    for (int o = 0; o < O; ++o) {
      const double* wo = wv.data() + static_cast<std::size_t>(o) * K;
      double acc = 0.0;
      for (int k = 0; k < K; ++k) acc += xr[k] * wo[k];
      out(r, o) = acc;
    }
  }
  const int xi = x.id(), wi = w.id();
  return t.record("matmul", std::move(out), {xi, wi}, [xi, wi, B, K, O](Tape& tp, int self) {
    const Tensor& g = tp.grad(self);
    if (tp.requires_grad(xi)) {
      const Tensor& wv = tp.value(wi);
      Tensor& gx = tp.grad(xi);
      for (int r = 0; r < B; ++r) {
        double* gxr = gx.data() + static_cast<std::size_t>(r) * K;
        for (int o = 0; o < O; ++o) {
          const double go = g(r, o);
          if (go == 0.0) continue;
          const double* wo = wv.data() + static_cast<std::size_t>(o) * K;
          for (int k = 0; k < K; ++k) gxr[k] += go * wo[k];
        }
      }
    }
    if (tp.requires_grad(wi)) {
      const Tensor& xv = tp.value(xi);
      Tensor& gw = tp.grad(wi);
      for (int r = 0; r < B; ++r) {
        const double* xr = xv.data() + static_cast<std::size_t>(r) * K;
        for (int o = 0; o < O; ++o) {
          const double go = g(r, o);
          if (go == 0.0) continue;
          double* gwo = gw.data() + static_cast<std::size_t>(o) * K;
          for (int k = 0; k < K; ++k) gwo[k] += go * xr[k];
        }
      }
    }
  });
}

Var linear(Var x, Var w, Var b) { return add(matmul_t(x, w), b); }

Var add(Var a, Var b) {
  Tape& t = tape_of(a, b, "add");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const bool broadcast = !av.same_shape(bv);
  if (broadcast && !(bv.rows() == 1 && bv.cols() == av.cols())) shape_error("add", av, bv);
  Tensor out = av;
  const int C = av.cols();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += broadcast ? bv[i % C] : bv[i];
  const int ai = a.id(), bi = b.id();
  return t.record("add", std::move(out), {ai, bi}, [ai, bi, broadcast, C](Tape& tp, int self) {
    const Tensor& g = tp.grad(self);
    if (tp.requires_grad(ai)) {
      Tensor& ga = tp.grad(ai);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (tp.requires_grad(bi)) {
      Tensor& gb = tp.grad(bi);
      for (std::size_t i = 0; i < g.size(); ++i) gb[broadcast ? i % C : i] += g[i];
    }
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a, b, "sub");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) shape_error("sub", av, bv);
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  const int ai = a.id(), bi = b.id();
  return t.record("sub", std::move(out), {ai, bi}, [ai, bi](Tape& tp, int self) {
    const Tensor& g = tp.grad(self);
    if (tp.requires_grad(ai)) {
      Tensor& ga = tp.grad(ai);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (tp.requires_grad(bi)) {
      Tensor& gb = tp.grad(bi);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Var mul(Var a, Var b) {
  Tape& t = tape_of(a, b, "mul");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) shape_error("mul", av, bv);
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  const int ai = a.id(), bi = b.id();
  return t.record("mul", std::move(out), {ai, bi}, [ai, bi](Tape& tp, int self) {
    const Tensor& g = tp.grad(self);
    if (tp.requires_grad(ai)) {
      const Tensor& bv = tp.value(bi);
      Tensor& ga = tp.grad(ai);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (tp.requires_grad(bi)) {
      const Tensor& av = tp.value(ai);
      Tensor& gb = tp.grad(bi);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Var mul_col(Var x, Var col) {
  Tape& t = tape_of(x, col, "mul_col");
  const Tensor& xv = x.value();
  const Tensor& cv = col.value();
  if (cv.cols() != 1 || cv.rows() != xv.rows()) shape_error("mul_col", xv, cv);
  const int B = xv.rows(), C = xv.cols();
  Tensor out = xv;
  for (int r = 0; r < B; ++r) {
    for (int c = 0; c < C; ++c) out(r, c) *= cv(r, 0);
  }
  const int xi = x.id(), ci = col.id();
  return t.record("mul_col", std::move(out), {xi, ci}, [xi, ci, B, C](Tape& tp, int self) {
    const Tensor& g = tp.grad(self);
    if (tp.requires_grad(xi)) {
      const Tensor& cv = tp.value(ci);
      Tensor& gx = tp.grad(xi);
      for (int r = 0; r < B; ++r) {
        for (int c = 0; c < C; ++c) gx(r, c) += g(r, c) * cv(r, 0);
      }
    }
    if (tp.requires_grad(ci)) {
      const Tensor& xv = tp.value(xi);
      Tensor& gc = tp.grad(ci);
      for (int r = 0; r < B; ++r) {
        double acc = 0.0;
        for (int c = 0; c < C; ++c) acc += g(r, c) * xv(r, c);
        gc(r, 0) += acc;
      }
    }
  });
}

Var scale(Var x, double s) {
  return unary("scale", x, [s](double v) { return v * s; }, [s](double, double) { return s; });
}

Var add_scalar(Var x, double s) {
  return unary("add_scalar", x, [s](double v) { return v + s; }, [](double, double) { return 1.0; });
}

Var one_minus(Var x) {
  return unary("one_minus", x, [](double v) { return 1.0 - v; }, [](double, double) { return -1.0; });
}

Var sigmoid(Var x) {
  return unary(
      "sigmoid", x,
      [](double v) { return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); },
      [](double y, double) { return y * (1.0 - y); });
}

Var tanh(Var x) {
  return unary("tanh", x, [](double v) { return std::tanh(v); }, [](double y, double) { return 1.0 - y * y; });
}

Var relu(Var x) {
  return unary("relu", x, [](double v) { return v > 0 ? v : 0.0; }, [](double, double in) { return in > 0 ? 1.0 : 0.0; });
}

Var exp(Var x) {
  return unary("exp", x, [](double v) { return std::exp(v); }, [](double y, double) { return y; });
}

Var square(Var x) {
  return unary("square", x, [](double v) { return v * v; }, [](double, double in) { return 2.0 * in; });
}

Var concat_cols(Var a, Var b) {
  Tape& t = tape_of(a, b, "concat_cols");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rows() != bv.rows()) shape_error("concat_cols", av, bv);
  const int B = av.rows(), CA = av.cols(), CB = bv.cols();
  Tensor out(B, CA + CB);
  for (int r = 0; r < B; ++r) {
    for (int c = 0; c < CA; ++c) out(r, c) = av(r, c);
    for (int c = 0; c < CB; ++c) out(r, CA + c) = bv(r, c);
  }
  const int ai = a.id(), bi = b.id();
  return t.record("concat_cols", std::move(out), {ai, bi}, [ai, bi, B, CA, CB](Tape& tp, int self) {
    const Tensor& g = tp.grad(self);
    if (tp.requires_grad(ai)) {
      Tensor& ga = tp.grad(ai);
      for (int r = 0; r < B; ++r) {
        for (int c = 0; c < CA; ++c) ga(r, c) += g(r, c);
      }
    }
    if (tp.requires_grad(bi)) {
      Tensor& gb = tp.grad(bi);
      for (int r = 0; r < B; ++r) {
        for (int c = 0; c < CB; ++c) gb(r, c) += g(r, CA + c);
      }
    }
  });
}

Var gather_rows(Var x, const std::vector<int>& rows) {
  Tape& t = tape_of(x, "gather_rows");
  const Tensor& xv = x.value();
  const int C = xv.cols();
  Tensor out(static_cast<int>(rows.size()), C);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= xv.rows()) {
      throw Error(Errc::kShapeMismatch, "gather_rows: row " + std::to_string(rows[r]) + " out of range");
    }
    for (int c = 0; c < C; ++c) out(static_cast<int>(r), c) = xv(rows[r], c);
  }
  const int xi = x.id();
  return t.record("gather_rows", std::move(out), {xi}, [xi, rows, C](Tape& tp, int self) {
    if (!tp.requires_grad(xi)) return;
    const Tensor& g = tp.grad(self);
    Tensor& gx = tp.grad(xi);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (int c = 0; c < C; ++c) gx(rows[r], c) += g(static_cast<int>(r), c);
    }
  });
}

Var embedding(Var table, const std::vector<int>& ids) { return gather_rows(table, ids); }

Var log_softmax(Var logits, const std::vector<bool>& allowed) {
  Tape& t = tape_of(logits, "log_softmax");
  const Tensor& xv = logits.value();
  const int B = xv.rows(), C = xv.cols();
  if (C == 0) throw Error(Errc::kShapeMismatch, "log_softmax: empty rows");
  if (!allowed.empty() && static_cast<int>(allowed.size()) != C) {
    throw Error(Errc::kShapeMismatch, "log_softmax: mask length differs from class count");
  }
  auto ok = [&](int c) { return allowed.empty() || allowed[c]; };
  Tensor out(B, C);
  for (int r = 0; r < B; ++r) {
    double mx = -INFINITY;
    for (int c = 0; c < C; ++c) {
      if (ok(c)) mx = std::max(mx, xv(r, c));
    }
    double s = 0.0;
    for (int c = 0; c < C; ++c) {
      if (ok(c)) s += std::exp(xv(r, c) - mx);
    }
    const double lse = mx + std::log(s);
    for (int c = 0; c < C; ++c) out(r, c) = ok(c) ? xv(r, c) - lse : 0.0;
  }
  const int xi = logits.id();
  return t.record("log_softmax", std::move(out), {xi}, [xi, allowed, B, C](Tape& tp, int self) {
    if (!tp.requires_grad(xi)) return;
    const Tensor& g = tp.grad(self);
    const Tensor& y = tp.value(self);
    Tensor& gx = tp.grad(xi);
    for (int r = 0; r < B; ++r) {
      double gs = 0.0;
      for (int c = 0; c < C; ++c) {
        if (allowed.empty() || allowed[c]) gs += g(r, c);
      }
      for (int c = 0; c < C; ++c) {
        if (allowed.empty() || allowed[c]) gx(r, c) += g(r, c) - std::exp(y(r, c)) * gs;
      }
    }
  });
}

Var pick(Var x, const std::vector<int>& cols) {
  Tape& t = tape_of(x, "pick");
  const Tensor& xv = x.value();
  if (static_cast<int>(cols.size()) != xv.rows()) throw Error(Errc::kShapeMismatch, "pick: one column per row");
  Tensor out(xv.rows(), 1);
  for (int r = 0; r < xv.rows(); ++r) {
    if (cols[r] < 0 || cols[r] >= xv.cols()) throw Error(Errc::kShapeMismatch, "pick: column out of range");
    out(r, 0) = xv(r, cols[r]);
  }
  const int xi = x.id();
  return t.record("pick", std::move(out), {xi}, [xi, cols](Tape& tp, int self) {
    if (!tp.requires_grad(xi)) return;
    const Tensor& g = tp.grad(self);
    Tensor& gx = tp.grad(xi);
    for (std::size_t r = 0; r < cols.size(); ++r) gx(static_cast<int>(r), cols[r]) += g(static_cast<int>(r), 0);
  });
}

Var row_sum(Var x) {
  Tape& t = tape_of(x, "row_sum");
  const Tensor& xv = x.value();
  const int B = xv.rows(), C = xv.cols();
  Tensor out(B, 1);
  for (int r = 0; r < B; ++r) {
    double s = 0.0;
    for (int c = 0; c < C; ++c) s += xv(r, c);
    out(r, 0) = s;
  }
  const int xi = x.id();
  return t.record("row_sum", std::move(out), {xi}, [xi, B, C](Tape& tp, int self) {
    if (!tp.requires_grad(xi)) return;
    const Tensor& g = tp.grad(self);
    Tensor& gx = tp.grad(xi);
    for (int r = 0; r < B; ++r) {
      for (int c = 0; c < C; ++c) gx(r, c) += g(r, 0);
    }
  });
}

Var sum(Var x) {
  Tape& t = tape_of(x, "sum");
  const Tensor& xv = x.value();
  double s = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) s += xv[i];
  const int xi = x.id();
  return t.record("sum", Tensor(1, 1, s), {xi}, [xi](Tape& tp, int self) {
    if (!tp.requires_grad(xi)) return;
    const double g = tp.grad(self)[0];
    Tensor& gx = tp.grad(xi);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  });
}

Var mean(Var x) {
  const std::size_t n = x.value().size();
  if (n == 0) throw Error(Errc::kShapeMismatch, "mean of an empty variable");
  return scale(sum(x), 1.0 / static_cast<double>(n));
}

}  // namespace phenogen::nn
