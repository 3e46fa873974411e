"""
Electrons and a zero-momentum phonon
====================================

The coupling commutes with the electron Hamiltonian, so the phonon energy
oscillates forever instead of relaxing. A single electron starting in the
phonon vacuum gives ``dE = 2 V0^2 (1 - cos w0 t) / w0``.
"""

# %%
import numpy as np

from exchange_lab import ElectronPhononParams, electron_phonon_exchange, electron_phonon_matrix_element
from exchange_lab.electron_phonon import alpha_zeta_psi, compare_matrix_element_paths
from exchange_lab.cumulant import CumulantConfig

p = ElectronPhononParams(nu=2, eps=(0.5, 1.2), omega0=1.0, v0=0.5, n_max=12)
grid = np.linspace(0, 4 * np.pi, 9)
ts = electron_phonon_exchange(p, None, grid, CumulantConfig(method="analytic"))
for t, de in zip(grid, ts.delta_e):
    print(f"t={t:6.3f}  dE={de:.6f}  closed={2 * p.v0**2 * (1 - np.cos(t)):.6f}")

# %%
print("alpha, zeta, Psi at t=1:", alpha_zeta_psi(p, 1.0))
print("<k 0|U(3)|k 0> =", electron_phonon_matrix_element(p, 3.0, check_convergence=True))

# %%
# the printed closed form for the matrix element is compared, not trusted
for m in compare_matrix_element_paths(p, [0.0, 1.0]):
    print(f"t={m.t}: numeric {m.numeric:.6f}  printed {m.printed:.6f}")
