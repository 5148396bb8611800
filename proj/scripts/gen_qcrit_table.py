"""Regenerates the studentized-range critical values embedded in
src/analysis/qcrit_table.cpp (alpha = 0.05)."""
import math
from scipy.stats import studentized_range

DFS = list(range(5, 41)) + [48, 60, 80, 120, math.inf]
KS = range(2, 11)

for df in DFS:
    label = "kInf" if math.isinf(df) else f"{df}"
    nu = 1e12 if math.isinf(df) else df
    vals = ", ".join(f"{studentized_range.ppf(0.95, k, nu):.4f}" for k in KS)
    print(f"    {{{label}, {{{vals}}}}},")
