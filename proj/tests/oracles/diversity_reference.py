#!/usr/bin/env python3
"""Internal diversity from frozen fingerprint on-bits.

Each line of the input holds a SMILES followed by its on-bit indices.
Tanimoto is computed on Python sets and the mean runs over every unordered
pair in exact rational arithmetic before the final conversion.
"""
import sys
from fractions import Fraction
from itertools import combinations
from pathlib import Path


def main(path):
    fps = []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if parts:
            fps.append(set(int(b) for b in parts[1:]))
    pairs = list(combinations(fps, 2))
    total = Fraction(0)
    for a, b in pairs:
        union = len(a | b)
        total += Fraction(len(a & b), union) if union else Fraction(1)
    diversity = 1 - total / len(pairs)
    print(f"{float(diversity):.17g}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent.parent / "data" / "diversity_bits.txt")
