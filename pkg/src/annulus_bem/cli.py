"""Command-line front end.

Exit codes: 0 success, 1 oracle check found a discrepancy, 2 usage or
configuration error, 3 bad input data, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from .coupling_io import (
    parse_fem_csv,
    read_solution,
    relative_error_report,
    write_solution,
    ReferenceTable,
)
from .errors import ConfigError, DomainError, InputDataError, NumericalError
from .field import GridSpec, field_map, sample_points
from .oracle import (
    NEAR_SINGULAR_TOL,
    REGULAR_TOL,
    kernel_discrepancies,
    random_kernel_cases,
)
from .scenario import ScenarioConfig, convergence_study, load_reference
from .system import assemble, solve_dirichlet_to_neumann

logger = logging.getLogger("annulus_bem")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3, 4


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


class _Run:
    """Collects written files and emits the manifest next to them."""

    def __init__(self, args):
        self.args = args
        self.out = Path(args.out)
        self.outputs = []
        self.t0 = time.perf_counter()

    def write(self, name: str, text: str) -> Path:
        path = self.out / name
        _atomic_write(path, text)
        self.outputs.append(str(path))
        return path

    def finish(self) -> None:
        a = self.args
        manifest = {
            "subcommand": a.command,
            "config": getattr(a, "config", None),
            "inputs": {k: getattr(a, k, None) for k in ("fem", "solution", "points", "computed", "reference")
                       if getattr(a, k, None) is not None},
            "outputs": self.outputs,
            "seed": getattr(a, "seed", None),
            "version": __version__,
            "wall_clock_s": time.perf_counter() - self.t0,
        }
        _atomic_write(self.out / f"{a.command}.manifest.json", json.dumps(manifest, indent=2) + "\n")


def _config(args) -> ScenarioConfig:
    return ScenarioConfig.load(args.config) if args.config else ScenarioConfig()


def _svg(fig) -> str:
    import matplotlib

    matplotlib.rcParams["svg.hashsalt"] = "annulus-bem"
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def cmd_mesh(args) -> int:
    mesh = _config(args).mesh()
    rows = []
    n_out = mesh.n_outer
    for k, e in enumerate(mesh.elements()):
        rows.append([k + 1, "outer" if k < n_out else "inner", *map(repr, e.start), *map(repr, e.end),
                     *map(repr, e.midpoint), repr(e.length), *map(repr, e.normal)])
    run = _Run(args)
    run.write("mesh.csv", _csv_text(
        ["index", "loop", "x_start", "y_start", "x_end", "y_end", "x_mid", "y_mid", "length", "nx", "ny"], rows))
    run.finish()
    print(f"wrote {len(rows)} elements")
    return EXIT_OK


def cmd_solve(args) -> int:
    if not args.fem:
        raise ConfigError("solve needs --fem")
    cfg = _config(args)
    mesh = cfg.mesh()
    with open(args.fem, "rb") as fh:
        data = parse_fem_csv(fh.read(), mesh, source=args.fem)
    sol = solve_dirichlet_to_neumann(assemble(mesh), data.a_values, mesh=mesh)
    buf = io.StringIO()
    write_solution(sol, buf)
    run = _Run(args)
    run.write("solution.txt", buf.getvalue())
    run.finish()
    print(f"elements            {sol.n}")
    print(f"residual (inf-norm) {sol.residual_norm:.3e}")
    print(f"condition estimate  {sol.condition_estimate:.3e}")
    print(f"max |P|             {np.max(np.abs(sol.p_bar)):.6e}")
    for w in sol.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def _read_points(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if rows and [c.strip() for c in rows[0]][:2] == ["x", "y"]:
        rows = rows[1:]
    try:
        pts = np.array([[float(r[0]), float(r[1])] for r in rows], dtype=float)
    except (ValueError, IndexError) as exc:
        raise InputDataError(f"bad points file {path}: {exc}") from exc
    if pts.size == 0:
        raise InputDataError(f"no points in {path}")
    if not np.all(np.isfinite(pts)):
        raise InputDataError(f"non-finite coordinates in {path}")
    return pts


def _heatmap(fgrid, mesh):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    spec = fgrid.spec
    vals = np.ma.masked_invalid(fgrid.values())
    fig, ax = plt.subplots(figsize=(5, 4.5))
    im = ax.imshow(vals, origin="lower", extent=(spec.x_min, spec.x_max, spec.y_min, spec.y_max),
                   cmap="viridis", interpolation="nearest")
    for loop in mesh.loops:
        xy = np.array([e.start for e in loop] + [loop[0].start])
        ax.plot(xy[:, 0], xy[:, 1], "k-", lw=0.6)
    fig.colorbar(im, ax=ax, label="A (T m)")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal")
    text = _svg(fig)
    plt.close(fig)
    return text


def cmd_eval(args) -> int:
    if not args.solution:
        raise ConfigError("eval needs --solution")
    if bool(args.grid) == bool(args.points):
        raise ConfigError("eval needs exactly one of --grid or --points")
    with open(args.solution, "rb") as fh:
        sol = read_solution(fh.read())
    run = _Run(args)
    if args.grid:
        fgrid = field_map(sol, GridSpec.parse(args.grid))
        samples = fgrid.samples
    else:
        samples = sample_points(sol, _read_points(args.points))
    rows = [[repr(s.point.x), repr(s.point.y), s.edge_factor.classification.value,
             s.edge_factor.value, _fmt(s.value), int(s.near_boundary)] for s in samples]
    run.write("field.csv", _csv_text(["x", "y", "classification", "lambda", "value", "near_boundary"], rows))
    if args.grid and args.svg:
        run.write("field.svg", _heatmap(fgrid, sol.mesh))
    run.finish()
    skipped = sum(s.value is None for s in samples)
    if skipped:
        print(f"warning: {skipped} point(s) outside the annulus have no value", file=sys.stderr)
    print(f"evaluated {len(samples) - skipped} of {len(samples)} points")
    return EXIT_OK


def _computed_values(path) -> np.ndarray:
    """Values from a CSV with a ``value`` column (e.g. ``field.csv``)."""
    with open(path, encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or "value" not in reader.fieldnames:
            raise InputDataError(f"{path} has no 'value' column")
        vals = []
        for k, row in enumerate(reader, start=1):
            if not row["value"]:
                raise InputDataError(f"{path} row {k} has no value (point outside the annulus?)")
            vals.append(float(row["value"]))
    return np.array(vals)


def cmd_report(args) -> int:
    if not args.reference:
        raise ConfigError("report needs --reference (a fixture name or a CSV path)")
    ref = load_reference(args.reference)
    if args.computed:
        vals = _computed_values(args.computed)
        if len(vals) != len(ref.rows):
            raise InputDataError(f"{len(vals)} computed values for {len(ref.rows)} reference rows")
        ref = ReferenceTable(tuple((m, float(v)) for (m, _), v in zip(ref.rows, vals)), ref.label)
    report = relative_error_report(ref)
    text = report.format()
    run = _Run(args)
    run.write("report.txt", text)
    run.finish()
    print(text, end="")
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = _config(args)
    record = convergence_study(
        cfg.reference(), cfg.convergence_n,
        outer_radius=cfg.convergence_outer_radius, inner_radius=cfg.convergence_inner_radius,
    )
    run = _Run(args)
    run.write("convergence.csv", _csv_text(
        ["n_total", "max_error", "avg_error"], [[n, repr(mx), repr(av)] for n, mx, av in record.rows]))
    if args.svg:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        ns = [r[0] for r in record.rows]
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.loglog(ns, [r[2] for r in record.rows], "o-", label="average")
        ax.loglog(ns, [r[1] for r in record.rows], "s--", label="maximum")
        ax.set_xlabel("number of boundary elements")
        ax.set_ylabel("relative flux error")
        ax.legend()
        run.write("convergence.svg", _svg(fig))
        plt.close(fig)
    run.finish()
    for n, mx, av in record.rows:
        print(f"{n:6d}  max {mx:.4e}  avg {av:.4e}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    if args.count <= 0:
        raise ConfigError("--count must be positive")
    rows = []
    regular = kernel_discrepancies(random_kernel_cases(args.seed, args.count), REGULAR_TOL)
    rows += [("regular",) + r for r in regular]
    n_near = max(1, args.count // 10)
    near = kernel_discrepancies(random_kernel_cases(args.seed + 1, n_near, near_singular=True), NEAR_SINGULAR_TOL)
    rows += [("near_singular",) + r for r in near]
    run = _Run(args)
    run.write("oracle_check.csv", _csv_text(
        ["family", "case", "kernel", "closed_form", "quadrature", "abs_diff", "ok"],
        [[fam, k, name, repr(c), repr(q), repr(d), int(ok)] for fam, k, name, c, q, d, ok in rows]))
    run.finish()
    failures = [r for r in rows if not r[-1]]
    worst = max(r[5] for r in rows)
    print(f"{len(rows)} comparisons, {len(failures)} outside tolerance, worst abs diff {worst:.3e}")
    return EXIT_CHECK_FAILED if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="annulus-bem", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON scenario config (defaults used if omitted)")
        sp.add_argument("--out", default=".", help="output directory")
        return sp

    common(sub.add_parser("mesh", help="write the boundary mesh as CSV"))
    s = common(sub.add_parser("solve", help="solve for fluxes from FEM boundary potentials"))
    s.add_argument("--fem", help="CSV with header index,x,y,a")
    e = common(sub.add_parser("eval", help="evaluate the potential at points or on a grid"))
    e.add_argument("--solution", help="solution file written by 'solve'")
    e.add_argument("--grid", help="x0,x1,y0,y1,nx,ny")
    e.add_argument("--points", help="CSV of x,y points")
    e.add_argument("--svg", action="store_true", help="also write a heatmap (grid mode)")
    r = common(sub.add_parser("report", help="relative-error table against a reference"))
    r.add_argument("--reference", help="'table1', 'table2' or a CSV with measured,calculated")
    r.add_argument("--computed", help="CSV with a 'value' column replacing the calculated column")
    c = common(sub.add_parser("converge", help="flux error versus element count"))
    c.add_argument("--svg", action="store_true", help="also write a log-log plot")
    o = common(sub.add_parser("oracle-check", help="closed-form kernels versus quadrature"))
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--count", type=int, default=1000)
    return p


COMMANDS = {
    "mesh": cmd_mesh,
    "solve": cmd_solve,
    "eval": cmd_eval,
    "report": cmd_report,
    "converge": cmd_converge,
    "oracle-check": cmd_oracle_check,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InputDataError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
