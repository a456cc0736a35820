"""File formats: FEM boundary potentials in, solutions in/out, error tables.

FEM hand-off CSV::

    index,x,y,a
    1,0.0998,0.0078,-0.0031
    ...

``index`` is 1-based in global element order (outer loop first) and
``(x, y)`` must match the element midpoint within ``position_tol``.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, NamedTuple, TextIO

import numpy as np

from .errors import AlignmentError, ConfigError, DataError, FormatError, VersionError
from .geometry import AnnulusMesh, build_annulus
from .system import BoundaryCondition, BoundarySolution

FEM_HEADER = ["index", "x", "y", "a"]
DEFAULT_POSITION_TOL = 1e-6

SOLUTION_MAGIC = "bem-annulus-solution"
SOLUTION_VERSION = 1


class FemEntry(NamedTuple):
    index: int
    x: float
    y: float
    a_value: float


@dataclass(frozen=True)
class FemBoundaryData:
    entries: tuple
    source: str = ""

    @property
    def a_values(self) -> np.ndarray:
        return np.array([e.a_value for e in self.entries])

    def boundary_condition(self) -> BoundaryCondition:
        return BoundaryCondition.dirichlet(self.a_values)


def _as_text(stream) -> str:
    if isinstance(stream, (bytes, bytearray)):
        return stream.decode("utf-8")
    if isinstance(stream, str):
        return stream
    data = stream.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _float(text, what):
    try:
        return float(text)
    except ValueError:
        raise FormatError(f"cannot parse {what} {text!r}") from None


def parse_fem_csv(
    stream, mesh: AnnulusMesh, position_tol: float = DEFAULT_POSITION_TOL, source: str = ""
) -> FemBoundaryData:
    text = _as_text(stream)
    rows = [r for r in csv.reader(io.StringIO(text, newline="")) if r and any(c.strip() for c in r)]
    if not rows or [c.strip() for c in rows[0]] != FEM_HEADER:
        raise FormatError(f"FEM CSV must start with header {','.join(FEM_HEADER)!r}")
    n = len(mesh)
    seen: dict[int, FemEntry] = {}
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            raise FormatError(f"line {line_no}: expected 4 columns, got {len(row)}")
        try:
            idx = int(row[0])
        except ValueError:
            raise FormatError(f"line {line_no}: bad index {row[0]!r}") from None
        if not 1 <= idx <= n:
            raise FormatError(f"index {idx} out of range 1..{n}")
        if idx in seen:
            raise FormatError(f"duplicate index {idx}")
        x, y, a = (_float(c, name) for c, name in zip(row[1:], ("x", "y", "a")))
        if not all(math.isfinite(v) for v in (x, y, a)):
            raise DataError(f"index {idx}: non-finite value")
        seen[idx] = FemEntry(idx, x, y, a)
    missing = [k for k in range(1, n + 1) if k not in seen]
    if missing:
        raise FormatError(f"missing index {missing[0]}" + (f" (and {len(missing) - 1} more)" if len(missing) > 1 else ""))
    entries = tuple(seen[k] for k in range(1, n + 1))
    coords = np.array([(e.x, e.y) for e in entries])
    dist = np.hypot(*(coords - mesh.midpoints).T)
    worst = int(np.argmax(dist))
    if dist[worst] > position_tol:
        raise AlignmentError(
            f"element {worst + 1} sample is {dist[worst]:.3e} m from its collocation "
            f"midpoint (tolerance {position_tol:.1e} m)"
        )
    return FemBoundaryData(entries, source)


def write_fem_csv(data: FemBoundaryData | Iterable[FemEntry], out: TextIO) -> None:
    entries = data.entries if isinstance(data, FemBoundaryData) else data
    w = csv.writer(out, lineterminator="\n")
    w.writerow(FEM_HEADER)
    for e in entries:
        w.writerow([e.index, repr(e.x), repr(e.y), repr(e.a_value)])


def fem_data_from_values(mesh: AnnulusMesh, values, source: str = "") -> FemBoundaryData:
    """Pair values with mesh midpoints, e.g. to synthesise an FEM export."""
    mids = mesh.midpoints
    return FemBoundaryData(
        tuple(FemEntry(k + 1, float(mids[k, 0]), float(mids[k, 1]), float(v)) for k, v in enumerate(values)),
        source,
    )


# -- solution files ---------------------------------------------------------

def write_solution(sol: BoundarySolution, out: TextIO) -> None:
    if not isinstance(sol.mesh, AnnulusMesh):
        raise ConfigError("only solutions on an annulus mesh can be written")
    p = sol.mesh.params()
    lines = [
        f"{SOLUTION_MAGIC} v{SOLUTION_VERSION}",
        f"outer_center = {p['outer_center'][0]!r} {p['outer_center'][1]!r}",
        f"outer_radius = {p['outer_radius']!r}",
        f"inner_center = {p['inner_center'][0]!r} {p['inner_center'][1]!r}",
        f"inner_radius = {p['inner_radius']!r}",
        f"n_outer = {p['n_outer']}",
        f"n_inner = {p['n_inner']}",
        f"start_angle = {p['start_angle']!r}",
        f"residual_norm = {sol.residual_norm!r}",
        f"condition_estimate = {sol.condition_estimate!r}",
        f"elements = {sol.n}",
        "index a_bar p_bar",
    ]
    lines += [f"{k + 1} {a!r} {q!r}" for k, (a, q) in enumerate(zip(sol.a_bar.tolist(), sol.p_bar.tolist()))]
    lines.append("end")
    out.write("\n".join(lines) + "\n")


_HEADER_KEYS = (
    "outer_center", "outer_radius", "inner_center", "inner_radius",
    "n_outer", "n_inner", "start_angle", "residual_norm", "condition_estimate", "elements",
)


def read_solution(stream) -> BoundarySolution:
    text = _as_text(stream)
    data = text.encode("utf-8")
    offsets = []
    pos = 0
    lines = []
    for raw in data.splitlines(keepends=True):
        offsets.append(pos)
        pos += len(raw)
        lines.append(raw.decode("utf-8").rstrip("\r\n"))
    total = len(data)

    def fail(i, msg):
        off = offsets[i] if i < len(offsets) else total
        raise FormatError(f"solution file: {msg} at byte offset {off}")

    if not lines:
        fail(0, "empty file")
    m = re.fullmatch(rf"{SOLUTION_MAGIC} v(\d+)(?:\.\d+)?", lines[0].strip())
    if not m:
        fail(0, "missing format signature")
    if int(m.group(1)) != SOLUTION_VERSION:
        raise VersionError(
            f"solution file has format v{m.group(1)}; this reader supports v{SOLUTION_VERSION}"
        )
    header = {}
    i = 1
    for key in _HEADER_KEYS:
        if i >= len(lines):
            fail(i, f"truncated before {key!r}")
        k, sep, v = lines[i].partition("=")
        if not sep or k.strip() != key:
            fail(i, f"expected {key!r}")
        header[key] = v.strip()
        i += 1
    try:
        oc = [float(t) for t in header["outer_center"].split()]
        ic = [float(t) for t in header["inner_center"].split()]
        mesh = build_annulus(
            oc, float(header["outer_radius"]), ic, float(header["inner_radius"]),
            int(header["n_outer"]), int(header["n_inner"]), float(header["start_angle"]),
        )
        n = int(header["elements"])
        residual = float(header["residual_norm"])
        cond = float(header["condition_estimate"])
    except (ValueError, TypeError) as exc:
        fail(1, f"bad header value ({exc})")
    if n != len(mesh):
        fail(i - 1, f"element count {n} does not match mesh ({len(mesh)})")
    if i >= len(lines) or lines[i].split() != ["index", "a_bar", "p_bar"]:
        fail(i, "missing column header")
    i += 1
    a_bar = np.empty(n)
    p_bar = np.empty(n)
    for k in range(n):
        if i >= len(lines):
            fail(i, f"truncated after {k} of {n} rows")
        parts = lines[i].split()
        if len(parts) != 3 or parts[0] != str(k + 1):
            fail(i, f"malformed row for element {k + 1}")
        try:
            a_bar[k], p_bar[k] = float(parts[1]), float(parts[2])
        except ValueError:
            fail(i, f"unparsable number in row {k + 1}")
        i += 1
    if i >= len(lines) or lines[i].strip() != "end" or not text.endswith("\n"):
        fail(min(i, len(lines)), "missing end marker (truncated file?)")
    return BoundarySolution(a_bar, p_bar, mesh, residual, cond)


# -- error tables -----------------------------------------------------------

@dataclass(frozen=True)
class ReferenceTable:
    rows: tuple
    label: str = ""

    def __post_init__(self):
        if not self.rows:
            raise DataError("reference table is empty")
        for k, (measured, _) in enumerate(self.rows, start=1):
            if measured == 0:
                raise DataError(f"row {k}: measured value is zero, relative error undefined")


@dataclass(frozen=True)
class ErrorReport:
    table: ReferenceTable
    row_errors: np.ndarray
    average: float

    def format(self) -> str:
        head = ("Measured value (T m)", "Calculated value (T m)", "Error", "Average error")
        widths = (22, 24, 9, 13)
        out = []
        if self.table.label:
            out.append(self.table.label)
        out.append("".join(h.ljust(w) for h, w in zip(head, widths)).rstrip())
        for k, ((meas, calc), err) in enumerate(zip(self.table.rows, self.row_errors)):
            avg = f"{self.average:.2f}%" if k == 0 else ""
            cells = (f"{meas:.4f}", f"{calc:.4f}", f"{err:.2f}%", avg)
            out.append("".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip())
        return "\n".join(out) + "\n"


def relative_error_report(ref: ReferenceTable) -> ErrorReport:
    meas = np.array([r[0] for r in ref.rows], dtype=float)
    calc = np.array([r[1] for r in ref.rows], dtype=float)
    errs = np.abs(meas - calc) / np.abs(meas) * 100.0
    return ErrorReport(ref, errs, float(errs.mean()))


def read_reference_table(stream, label: str | None = None) -> ReferenceTable:
    """CSV with ``measured,calculated`` columns; ``#`` lines are comments.

    The first comment, up to any ``;``, becomes the label unless one is given.
    """
    text = _as_text(stream)
    comments = [ln[1:].strip() for ln in text.splitlines() if ln.startswith("#")]
    body = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(body)
    if not reader.fieldnames or not {"measured", "calculated"} <= set(reader.fieldnames):
        raise FormatError("reference table needs 'measured' and 'calculated' columns")
    rows = []
    for k, row in enumerate(reader, start=1):
        rows.append((_float(row["measured"], f"row {k} measured"), _float(row["calculated"], f"row {k} calculated")))
    if label is None:
        label = comments[0].split(";")[0].strip() if comments else ""
    return ReferenceTable(tuple(rows), label)


def read_printed_errors(stream) -> list:
    """The ``printed_error`` column of a shipped fixture, verbatim."""
    text = _as_text(stream)
    body = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return [float(r["printed_error"]) for r in csv.DictReader(body)]


FIXTURES = {"table1": "table1_initial.csv", "table2": "table2_disturbed.csv"}


def fixture_text(name: str) -> str:
    """Contents of a shipped reference table (``table1`` or ``table2``)."""
    fname = FIXTURES.get(name, name)
    return resources.files("annulus_bem.data").joinpath(fname).read_text(encoding="utf-8")
