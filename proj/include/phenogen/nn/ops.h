#pragma once

#include <vector>

#include "phenogen/nn/tape.h"

namespace phenogen::nn {

// Differentiable ops on tape variables. Binary ops require both operands on
// the same tape and throw Error{kShapeMismatch} on incompatible shapes.

/// x·Wᵀ for x (B×K) and w (O×K).
Var matmul_t(Var x, Var w);
/// x·Wᵀ + b with b a 1×O row broadcast over the batch.
Var linear(Var x, Var w, Var b);
/// Elementwise sum; `b` may also be a 1×cols row broadcast over rows.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
/// Multiplies every row r of x (B×C) by col(r, 0) for col of shape B×1.
Var mul_col(Var x, Var col);
Var scale(Var x, double s);
Var add_scalar(Var x, double s);
/// 1 − x.
Var one_minus(Var x);
Var sigmoid(Var x);
Var tanh(Var x);
Var relu(Var x);
Var exp(Var x);
Var square(Var x);
Var concat_cols(Var a, Var b);
/// Rows of `table` selected by `ids` (embedding lookup).
Var embedding(Var table, const std::vector<int>& ids);
/// Rows of x in the given order; repeats allowed.
Var gather_rows(Var x, const std::vector<int>& rows);
/// Row-wise log-softmax with max subtraction. Columns where `allowed` is
/// false are excluded from the normalization and output exactly 0.
Var log_softmax(Var logits, const std::vector<bool>& allowed = {});
/// out(r, 0) = x(r, cols[r]).
Var pick(Var x, const std::vector<int>& cols);
/// B×C → B×1.
Var row_sum(Var x);
/// Sum of all entries as 1×1.
Var sum(Var x);
/// Mean of all entries as 1×1.
Var mean(Var x);

}  // namespace phenogen::nn
