"""Build a resonant three-channel VAR by pole placement and simulate it.

Each channel is an AR(2) resonator: a pole pair at radius ``rho`` and
frequency ``f0`` gives a spectral peak near ``f0`` whose sharpness grows as
``rho`` approaches one. Directed lagged couplings then carry one channel's
activity into another.
"""

import numpy as np

from freqgc import FrequencyGrid, PolePlacementSpec, build_from_poles, cpsd, simulate, spectral_radius

spec = PolePlacementSpec(
    fs=120.0,
    nodes=[[(40.0, 0.9)], [(10.0, 0.7)], [(50.0, 0.8)]],
    couplings=[(0, 1, 1, -0.356), (1, 2, 3, 0.5)],  # (src, dst, lag, gain), 0-based
)
model = build_from_poles(spec)
print(f"order p = {model.p}, channels n = {model.n}")
print(f"companion spectral radius = {spectral_radius(model):.4f} (stable below 1)")

# %% the model spectrum peaks at the placed resonances
grid = FrequencyGrid(model.fs, 512)
S = cpsd(model, grid).diagonal()
for c in range(model.n):
    print(f"channel {c + 1}: spectral peak at {grid.freqs[np.argmax(S[:, c])]:.2f} Hz")

# %% a realization; identical seeds give identical samples
data = simulate(model, T=2000, seed=1)
again = simulate(model, T=2000, seed=1)
print("samples:", data.samples.shape, "reproducible:", np.array_equal(data.samples, again.samples))
print("sample variances:", np.round(data.samples.var(axis=0), 3))
