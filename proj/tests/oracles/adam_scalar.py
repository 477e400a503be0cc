#!/usr/bin/env python3
"""Scalar Adam reference: 5 steps on f(w) = w^2 from w0 = 1 with lr 0.1.

Prints w after each step with 17 significant digits.
"""
import math

lr, b1, b2, eps = 0.1, 0.9, 0.999, 1e-8
w, m, v = 1.0, 0.0, 0.0
for t in range(1, 6):
    g = 2.0 * w
    m = b1 * m + (1.0 - b1) * g
    v = b2 * v + (1.0 - b2) * g * g
    mhat = m / (1.0 - math.pow(b1, t))
    vhat = v / (1.0 - math.pow(b2, t))
    w -= lr * mhat / (math.sqrt(vhat) + eps)
    print(f"{w:.17g}")
