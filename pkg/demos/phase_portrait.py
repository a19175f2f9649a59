"""Coarse phase portrait: exact-recovery rate over an (alpha, beta) grid.

Writes phase_grid.csv next to this script. With matplotlib installed, also
renders phase_grid.svg with the predicted boundary sqrt(a) - sqrt(b) = sqrt(K).
"""

from pathlib import Path

from sbm_ppm.bench import GridSpec, run_phase_grid, write_grid_csv

spec = GridSpec(
    n=300,
    K=3,
    alpha_range=(0.0, 30.0, 5.0),
    beta_range=(0.0, 10.0, 2.5),
    trials=10,
    base_seed=0,
    init="spectral",
)

out = Path(__file__).parent / "phase_grid.csv"
records = write_grid_csv(run_phase_grid(spec), out)
print("wrote %s (%d cells)" % (out, len(records)))

for r in records:
    if r.error:
        print("cell (%g, %g) failed: %s" % (r.alpha, r.beta, r.error))

try:
    from sbm_ppm.cli import main
except ImportError:
    raise SystemExit(0)
code = main(["plot", str(out)])
if code == 0:
    print("rendered %s" % out.with_suffix(".svg"))
else:
    print("plotting skipped (matplotlib not installed)")
