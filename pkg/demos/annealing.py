# %% [markdown]
# # Shaping D to favour one kind of diffusion
#
# Simulated annealing over 4-point periodic splines D with r = cos^2(pi x)
# fixed.  Maximising c*_0 / c*_1 puts the peak of D where r peaks (x = 0);
# maximising c*_1 / c*_0 moves it to x = 1/2.  Pass an iteration count on
# the command line; the default config uses 2000.

# %%
import sys

from qdiff.anneal import AnnealConfig, run_annealing

n_iters = int(sys.argv[1]) if len(sys.argv) > 1 else 300

# %%
for q_num, q_den in ((0.0, 1.0), (1.0, 0.0)):
    res = run_annealing(AnnealConfig(q_num=q_num, q_den=q_den, n_iters=n_iters, seed=1))
    ctl = ", ".join(f"{v:.3f}" for v in res.best_control)
    print(f"c*_{q_num:g} / c*_{q_den:g}: best {res.best_ratio:.4f} with D through ({ctl}), "
          f"peak at x = {res.peak_location:.3f}, {res.evaluations} evaluations")
