"""
Estimator cost against the number of modes and subcarriers
==========================================================

Each stage runs one single-tone ESPRIT per row (range stage), per column
(gamma stage) or once (reference stage). Counting complex
multiply-accumulates shows the row stage growing linearly in the number of
modes U and the column stage linearly in the number of subcarriers P.
"""

from oamaoa import ExperimentConfig
from oamaoa.experiments import SCALING_COLUMNS, scaling, scaling_slopes

rows = scaling(ExperimentConfig())
print("  ".join(f"{c:>10}" for c in SCALING_COLUMNS))
for row in rows:
    print("  ".join(f"{v!s:>10}" for v in row))

slope_u, slope_p = scaling_slopes(rows)
print(f"log-log slope of the range stage in U: {slope_u:.3f}")
print(f"log-log slope of the gamma stage in P: {slope_p:.3f}")
