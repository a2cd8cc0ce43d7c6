"""
CSV formats shared by the CLI, the tool server and the scenario runner.

Phase-space fields: a header `# nx,np,x_min,x_max,p_min,p_max` carrying the
grid, then nx*np rows `x,p,value` (real) or `x,p,re,im` (complex), x slow.
Density matrices use the complex layout with both axes on the position grid.
Wave functions: header `# nx,x_min,x_max`, then rows `x,re,im`.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np

from .errors import GridError, StateError
from .grid import Field2D, Grid1D, PhaseSpaceGrid
from .states import DensityMatrix, WaveFunction
from .transforms import WignerFunction

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def _read_header(path: Path) -> list[float]:
    with path.open("r", encoding="utf-8") as fh:
        first = fh.readline().strip()
    if not first.startswith("#"):
        raise GridError(f"{path}: missing grid header line")
    try:
        return [float(v) for v in first.lstrip("#").split(",")]
    except ValueError as e:
        raise GridError(f"{path}: malformed grid header {first!r}") from e


def _load_rows(path: Path, columns: int, rows: int) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape != (rows, columns):
        raise GridError(f"{path}: expected {rows} rows of {columns} columns, found {data.shape}")
    if not np.all(np.isfinite(data)):
        raise StateError(f"{path}: non-finite samples")
    return data


def write_field(field: Field2D, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    gx, gp = field.grid.gx, field.grid.gp
    xx, pp = field.grid.mesh()
    values = np.asarray(field.values)
    columns = [xx.ravel(), pp.ravel()]
    if np.iscomplexobj(values):
        columns += [values.real.ravel(), values.imag.ravel()]
    else:
        columns.append(values.ravel())
    header = ",".join(FLOAT_FORMAT % v for v in (gx.n, gp.n, gx.x_min, gx.x_max, gp.x_min, gp.x_max))
    np.savetxt(path, np.column_stack(columns), delimiter=",", fmt=FLOAT_FORMAT, header=header, comments="# ")
    logger.debug(f"wrote {type(field).__name__} {field.grid.shape} to {path}")
    return path


def read_field(path: PathLike) -> Field2D:
    """Field2D from CSV; three columns give a real field, four a complex one"""
    path = Path(path)
    header = _read_header(path)
    if len(header) != 6:
        raise GridError(f"{path}: expected a phase-space header with 6 values, found {len(header)}")
    nx, np_, x_min, x_max, p_min, p_max = header
    grid = PhaseSpaceGrid(
        gx=Grid1D(n=int(nx), x_min=x_min, x_max=x_max),
        gp=Grid1D(n=int(np_), x_min=p_min, x_max=p_max),
    )
    rows = grid.gx.n * grid.gp.n
    with path.open("r", encoding="utf-8") as fh:
        fh.readline()
        first_row = fh.readline()
    columns = len(first_row.split(","))
    if columns not in (3, 4):
        raise GridError(f"{path}: rows must have 3 or 4 columns, found {columns}")
    data = _load_rows(path, columns, rows)
    if columns == 3:
        values = data[:, 2].reshape(grid.shape)
    else:
        values = (data[:, 2] + 1j * data[:, 3]).reshape(grid.shape)
    return Field2D(grid=grid, values=values)


def write_density(rho: DensityMatrix, path: PathLike) -> Path:
    grid = PhaseSpaceGrid(gx=rho.grid, gp=rho.grid)
    return write_field(Field2D(grid=grid, values=rho.rho), path)


def read_density(path: PathLike) -> DensityMatrix:
    field = read_field(path)
    if not field.grid.gx.matches(field.grid.gp):
        raise GridError(f"{path}: density matrix axes differ")
    return DensityMatrix(grid=field.grid.gx, rho=field.values)


def write_wavefunction(psi: WaveFunction, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    g = psi.grid
    header = ",".join(FLOAT_FORMAT % v for v in (g.n, g.x_min, g.x_max))
    rows = np.column_stack([g.points, psi.amp.real, psi.amp.imag])
    np.savetxt(path, rows, delimiter=",", fmt=FLOAT_FORMAT, header=header, comments="# ")
    return path


def read_wavefunction(path: PathLike) -> WaveFunction:
    path = Path(path)
    header = _read_header(path)
    if len(header) != 3:
        raise GridError(f"{path}: expected a wave-function header with 3 values, found {len(header)}")
    grid = Grid1D(n=int(header[0]), x_min=header[1], x_max=header[2])
    data = _load_rows(path, 3, grid.n)
    return WaveFunction(grid=grid, amp=data[:, 1] + 1j * data[:, 2])


def read_state(path: PathLike) -> DensityMatrix:
    """Density matrix from either a wave-function or a density-matrix CSV"""
    header = _read_header(Path(path))
    if len(header) == 3:
        psi = read_wavefunction(path)
        return DensityMatrix(grid=psi.grid, rho=np.outer(psi.amp, psi.amp.conj()))
    return read_density(path)


def write_outcomes(outcomes: np.ndarray, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.asarray(outcomes), delimiter=",", fmt=FLOAT_FORMAT, header="x0,p0", comments="# ")
    return path


def read_wigner(path: PathLike) -> WignerFunction:
    """Real phase-space field as a WignerFunction"""
    field = read_field(path)
    if field.is_complex:
        raise StateError(f"{path}: expected a real Wigner field, found complex samples")
    return WignerFunction(grid=field.grid, values=field.values)
