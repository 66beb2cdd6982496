# %% [markdown]
# # Eigenvalue and speed against the phase shift between r and D
#
# r(x) = cos^2(pi x) and D(x) = 0.1 + cos^2(pi (x + omega)).  For q > 0 the
# persistence eigenvalue grows as D moves out of phase with r (omega -> 1/2),
# for q < 0 it shrinks, and for Fickian diffusion it hardly moves.

# %%
import numpy as np

from qdiff.sweeps import phase_shift_spec, run_sweep

res = run_sweep(phase_shift_spec())
q, w = res.column("q"), res.column("omega")
k, c = res.column("k0"), res.column("c_star")

# %%
print("omega " + "".join(f"   q={qv:<5g}" for qv in sorted(set(q))))
for wv in sorted(set(w)):
    row = [k[(q == qv) & (w == wv)][0] for qv in sorted(set(q))]
    print(f"{wv:5.2f} " + "".join(f"{v:10.4f}" for v in row))

# %%
for qv in sorted(set(q)):
    sel = q == qv
    print(f"q = {qv:5.2f}: k0 in [{k[sel].min():.4f}, {k[sel].max():.4f}], "
          f"c* in [{np.nanmin(c[sel]):.4f}, {np.nanmax(c[sel]):.4f}]")
