"""
When the coupling commutes with the environment
===============================================

An impurity density-coupled to a boson mode never changes the boson
energy: ``[H_E, H_SE] = 0`` and both ``dE`` and ``V_E`` vanish for all time.
"""

# %%
import numpy as np

from exchange_lab import build_impurity_bec, classify_commutation, initial_state, sweep

model = build_impurity_bec([0.7], [1.1], v_b=0.3, n_max=4)
cls = classify_commutation(model)
print("case a:", cls.case_a, " case b:", cls.case_b)

# %%
# an arbitrary product state: superposed impurity, mixed boson occupation
state = initial_state(model, [0.6, 0.8], [0.1, 0.2, 0.3, 0.2, 0.2])
ts = sweep(model, state, np.linspace(0, 20, 200))
print("max |dE| =", np.abs(ts.delta_e).max())
print("max |V_E| =", np.abs(ts.v_e).max())

# %%
# switching to the exchange coupling breaks the commutation and energy flows
model = build_impurity_bec([0.7, 1.3], [1.1, 0.4], n_max=3, coupling="exchange")
rng = np.random.default_rng(0)
c = rng.normal(size=4) + 1j * rng.normal(size=4)
d = rng.random(16)
state = initial_state(model, c / np.linalg.norm(c), d / d.sum())
ts = sweep(model, state, np.linspace(0, 20, 200))
print("exchange coupling, case a:", classify_commutation(model).case_a)
print("max |dE| =", np.abs(ts.delta_e).max())
