"""How flux error and net flux shrink as the mesh is refined.

Both fall by about a factor four per doubling: constant elements on chord
polygons are second-order accurate for smooth data.

Run: python3 demos/03_convergence.py
"""

from annulus_bem import build_annulus
from annulus_bem.oracle import HarmonicReference
from annulus_bem.scenario import convergence_study
from annulus_bem.system import assemble, solve_dirichlet_to_neumann

ref = HarmonicReference.log_r()
record = convergence_study(ref, [20, 40, 80, 160, 320])

print(f"{'N':>5}  {'max err':>10}  {'avg err':>10}  {'net flux':>10}")
prev = None
for n, mx, avg in record.rows:
    mesh = build_annulus((0, 0), 2.0, (0, 0), 1.0, n // 2, n // 2)
    sol = solve_dirichlet_to_neumann(assemble(mesh), ref.value(mesh.midpoints), mesh=mesh)
    net = abs(sol.p_bar @ mesh.lengths)
    ratio = "" if prev is None else f"  avg ratio {prev / avg:.2f}"
    print(f"{n:5d}  {mx:10.3e}  {avg:10.3e}  {net:10.3e}{ratio}")
    prev = avg
