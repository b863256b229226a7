"""
Sweeping the ambient dimension
==============================

A reduced version of the full sweep (fewer trials and D values) that writes
CSV tables and SVG plots. The CLI equivalent is::

    affine-sc sweep --D-min 15 --D-max 30 --trials 5 --methods LSR,A-LSR --plot --out sweep_demo
"""

from affine_sc.experiments import SweepConfig, emit_plot, run_synthetic_sweep

cfg = SweepConfig(D_range=(15, 30), trials=5, methods=("LSR", "A-LSR"), output="sweep_demo")
result = run_synthetic_sweep(cfg)

# %%
# Mean SPR jumps to 1 at D=24 for the affine model and at D=25 for the linear one.
for row in result.aggregate():
    print(f"{row['method']:6s} D={row['D']:2d} SPR={row['mean_spr']:.3f} ACC={row['mean_acc']:.3f}")

# %%
# Identical seeds give identical tables, however many workers are used.
print(emit_plot(result, "spr", "sweep_demo/spr.svg"))
print(emit_plot(result, "acc", "sweep_demo/acc.svg"))
