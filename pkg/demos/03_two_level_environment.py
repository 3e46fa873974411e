"""
A two-level environment
=======================

Each system level couples to the environment through its own 2x2 block.
The closed forms in terms of the block-propagator coefficients reproduce
the exact engine; ``dE`` never changes sign.
"""

# %%
import numpy as np

from exchange_lab import build_two_level_env, initial_state, sweep, two_level_delta_e, two_level_speed
from exchange_lab.two_level import TwoLevelLevel, TwoLevelParams, appendix_a_coefficients

params = TwoLevelParams(
    levels=[TwoLevelLevel(0.3, 0.6, 0.4, -0.2), TwoLevelLevel(-0.5, 0.8j, 0.1, 0.3, 0.2, -0.1)],
    e1=1.3, e2=-0.4, d11=0.8, d22=0.2,
)
print(appendix_a_coefficients(params, 0, 1.0))

# %%
model = build_two_level_env(params)
state = initial_state(model, params.amplitudes, params.weights)
grid = np.linspace(0, 20, 11)
ts = sweep(model, state, grid)
for t, de, ve in zip(grid, ts.delta_e, ts.v_e):
    print(f"t={t:5.1f}  dE={de:+.6f} (closed {two_level_delta_e(params, t):+.6f})"
          f"  V_E={ve:+.6f} (closed {two_level_speed(params, t):+.6f})")

# %%
# phenomenological damping: the exchange decays as exp(c t^2)
damped = TwoLevelParams(params.levels, params.e1, params.e2, params.d11, params.d22, c_damp=-0.05)
print([round(two_level_delta_e(damped, t), 6) for t in grid])
