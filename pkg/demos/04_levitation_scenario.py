"""End-to-end run on the levitation geometry with synthetic FEM data.

A real run would read the potentials exported by an FEM solver on both
fictitious circles.  Here they come from u = ln(r / r_in) / ln(r_out / r_in),
which is 0 on the inner circle and 1 on the outer one, so the plate values
can be checked by hand.

Run: python3 demos/04_levitation_scenario.py
"""

import math

import numpy as np

from annulus_bem.coupling_io import fem_data_from_values
from annulus_bem.scenario import ScenarioConfig, coil_current, run_scenario

for pose in ("initial", "disturbed"):
    cfg = ScenarioConfig(pose=pose)
    mesh = cfg.mesh()
    r = np.hypot(*mesh.midpoints.T)
    fem = fem_data_from_values(mesh, np.log(r / cfg.inner_radius) / math.log(cfg.outer_radius / cfg.inner_radius))
    res = run_scenario(cfg, fem)
    print(f"{pose} pose {cfg.resolved_pose()}")
    for (x, y), v in zip(res.sample_points, res.potentials):
        exact = math.log(math.hypot(x, y) / cfg.inner_radius) / math.log(cfg.outer_radius / cfg.inner_radius)
        print(f"  ({x:+.5f}, {y:+.5f})  A={v:.5f}  exact={exact:.5f}")
    print()

print("coil current at t = 0, 2.5 ms, 5 ms:", [round(coil_current(t), 6) for t in (0, 0.0025, 0.005)])
