"""
Proposed update against vertex-direction and classic multiplicative steps
=========================================================================

A small time-to-efficiency race on the 5x5x5 cube for the full quadratic
model in three variables. The tick clock makes the numbers repeatable.
"""

from optdesign import FeatureMap
from optdesign.experiments import TickClock, benchmark

fmap = FeatureMap.full_quadratic(3)
rows, summary = benchmark(fmap, {"kind": "cube_grid", "side": 5}, [5],
                          max_seconds=20.0, clock=TickClock)

print("criterion algorithm  iterations  final efficiency  ticks to 0.999")
for s in summary:
    t = s["seconds_to_0999"]
    t = "never" if t is None else f"{t:.3f}"
    print(f"{s['criterion']:>9} {s['algorithm']:>9} {s['iterations']:>11} "
          f"{s['final_efficiency']:>17.6f} {t:>15}")

# each trace row carries its own efficiency against the reference
first = [r for r in rows if r["algorithm"] == "vdm" and r["criterion"] == "D"][:5]
for r in first:
    print(r["iteration"], round(r["efficiency_vs_reference"], 4))
