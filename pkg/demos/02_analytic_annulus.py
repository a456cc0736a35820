"""Recover fluxes of a known harmonic function on the annulus 1 < r < 2.

With u = ln r and normals pointing away from the region, the exact flux is
+1/r on the outer circle and -1/r on the inner one.

Run: python3 demos/02_analytic_annulus.py
"""

import numpy as np

from annulus_bem import build_annulus
from annulus_bem.field import interior_potential
from annulus_bem.oracle import HarmonicReference
from annulus_bem.system import assemble, solve_dirichlet_to_neumann

ref = HarmonicReference.log_r()
mesh = build_annulus((0, 0), 2.0, (0, 0), 1.0, 40, 40)
sol = solve_dirichlet_to_neumann(assemble(mesh), ref.value(mesh.midpoints), mesh=mesh)

print(f"{len(mesh)} elements, condition estimate {sol.condition_estimate:.2e}, "
      f"residual {sol.residual_norm:.1e}")
print(f"outer flux: mean {sol.p_bar[:40].mean():+.5f} (exact +0.5)")
print(f"inner flux: mean {sol.p_bar[40:].mean():+.5f} (exact -1.0)")
print(f"net flux through the boundary: {sol.p_bar @ mesh.lengths:+.2e} (exact 0)\n")

for r in (1.1, 1.25, 1.5, 1.75, 1.9):
    for theta in (0.0, 0.7):
        p = (r * np.cos(theta), r * np.sin(theta))
        u = interior_potential(sol, p)
        print(f"r={r:4.2f} theta={theta:.1f}  u={u:+.6f}  ln r={np.log(r):+.6f}  diff={u - np.log(r):+.1e}")
