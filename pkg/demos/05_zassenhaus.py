"""
Zassenhaus products
===================

``exp(X+Y)`` split into ``exp(X) exp(Y) exp(-c2/2) exp(-c3/6) exp(-c4/24)``.
Keeping terms up to ``c_k`` leaves an error of order ``t^(k+1)``.
"""

# %%
import numpy as np

from exchange_lab.zassenhaus import fitted_slopes, truncation_errors, zassenhaus_terms

for n, words in zassenhaus_terms(4).terms:
    print(f"c{n} =", " + ".join(map(str, words)))

# %%
sx = np.array([[0, 1], [1, 0]], dtype=complex)
sz = np.diag([1.0, -1.0]).astype(complex)
times = np.logspace(-3, -1, 9)
for variant in ("standard", "printed"):
    slopes = fitted_slopes(times, truncation_errors(sx, sz, times, variant=variant))
    print(variant, "slopes for orders 2, 3, 4:", np.round(slopes, 3))
