"""
Two routes to the exchanged energy
==================================

``dE(t)`` is the first cumulant of the counting-field characteristic
function. It is evaluated by a trace formula and by finite differences in
the counting field; both agree with ``<H_E>_t - <H_E>_0``.
"""

# %%
import numpy as np

from exchange_lab import (
    build_generic,
    characteristic_function,
    energy_exchange,
    energy_exchange_oracle,
    exchange_speed,
    exchange_speed_commutator,
    initial_state,
    make_space,
    Levels,
)
from exchange_lab.cumulant import CumulantConfig
from exchange_lab.models import random_amplitudes, random_hermitian, random_weights

rng = np.random.default_rng(1)
space = make_space([Levels(2), Levels(3)])
model = build_generic(space, random_hermitian(2, rng), random_hermitian(3, rng), random_hermitian(6, rng, 0.5))
state = initial_state(model, random_amplitudes(2, rng), random_weights(3, rng))

# %%
t = 2.5
print("chi(0, t)       =", characteristic_function(model, state, 0.0, t))
print("trace formula   =", energy_exchange(model, state, t, CumulantConfig(method="analytic")))
print("finite diff     =", energy_exchange(model, state, t, CumulantConfig(method="finite_difference")))
print("<H_E>_t - <H_E>_0 =", energy_exchange_oracle(model, state, t))

# %%
# central differences in eta converge at second order
exact = energy_exchange_oracle(model, state, t)
for h in (0.2, 0.1, 0.05, 0.025):
    cd = (characteristic_function(model, state, h, t) - characteristic_function(model, state, -h, t)) / (2j * h)
    print(f"h = {h:<6} error = {abs(cd.real - exact):.3e}")

# %%
print("V_E (product rule) =", exchange_speed(model, state, t))
print("V_E (commutator)   =", exchange_speed_commutator(model, state, t))
