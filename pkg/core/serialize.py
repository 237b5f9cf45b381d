"""
Stable artifact formats.

JSON uses 17 significant digits, complex numbers as [re, im] pairs and null
for non-finite floats, so identical inputs produce byte-identical files.
Grid functions go to CSV as x, Re(f), Im(f), Re(f'), Im(f').
"""
import csv
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel

from core.grid import Grid, GridFunction
from errors import ConfigError

PathLike = Union[str, Path]

GRID_COLUMNS = ["x", "re", "im", "re_deriv", "im_deriv"]
EIGEN_COLUMNS = ["re", "im", "residual"]


def fmt_float(value: float) -> str:
    return format(float(value), ".17g")


def to_plain(obj: Any) -> Any:
    """Convert models, arrays, enums and complex numbers into JSON primitives"""
    if isinstance(obj, BaseModel):
        return to_plain(obj.model_dump(mode="python"))
    if hasattr(obj, "to_dict"):
        return to_plain(obj.to_dict())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_finite_or_none(obj.real), _finite_or_none(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _finite_or_none(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _finite_or_none(value) -> Optional[float]:
    value = float(value)
    return value if math.isfinite(value) else None


def dumps(obj: Any) -> str:
    return _encode(to_plain(obj)) + "\n"


def _encode(obj: Any, level: int = 0) -> str:
    pad = "  " * (level + 1)
    end = "  " * level
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, (int, str)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_encode(obj[k], level + 1)}"
                 for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path: PathLike, obj: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))
    return path


def read_json(path: PathLike) -> Any:
    path = Path(path)
    if not path.exists():
        raise ConfigError("file not found", {"path": str(path)})
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError("invalid JSON", {"path": str(path), "error": str(e)}) from e


def _write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt_float(v) if math.isfinite(v) else "nan" for v in row])
    return path


def write_grid_csv(path: PathLike, f: GridFunction) -> Path:
    rows = zip(f.x, f.values.real, f.values.imag, f.derivs.real, f.derivs.imag)
    return _write_rows(path, GRID_COLUMNS, rows)


def read_grid_csv(path: PathLike) -> GridFunction:
    """Load a grid function written by write_grid_csv (or any uniform x column)"""
    path = Path(path)
    if not path.exists():
        raise ConfigError("grid CSV not found", {"path": str(path)})
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as e:
        raise ConfigError("grid CSV does not parse", {"path": str(path), "error": str(e)}) from e
    if data.shape[1] != len(GRID_COLUMNS):
        raise ConfigError("grid CSV needs five columns", {"path": str(path), "columns": GRID_COLUMNS})

    x = data[:, 0]
    try:
        grid = Grid(float(x[0]), float(x[-1]), len(x))
    except (ValueError, IndexError) as e:
        raise ConfigError("grid CSV has an invalid x column", {"path": str(path), "error": str(e)}) from e
    if not np.allclose(x, grid.x, rtol=0, atol=1e-9 * (1 + abs(grid.x1 - grid.x0))):
        raise ConfigError("grid CSV x column is not uniform", {"path": str(path)})
    return GridFunction(grid, data[:, 1] + 1j * data[:, 2], data[:, 3] + 1j * data[:, 4])


def write_eigen_csv(path: PathLike, eigenvalues: Sequence[complex], residuals: Sequence[float]) -> Path:
    rows = ((complex(e).real, complex(e).imag, float(r)) for e, r in zip(eigenvalues, residuals))
    return _write_rows(path, EIGEN_COLUMNS, rows)


def parse_complex(value: Any) -> complex:
    """Complex from a number, an [re, im] pair or a "re+imi" string"""
    if isinstance(value, bool):
        raise ConfigError("boolean is not a complex number", {"value": value})
    if isinstance(value, (int, float, complex, np.number)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        try:
            return complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError) as e:
            raise ConfigError("complex pair must hold two numbers", {"value": list(value)}) from e
    if isinstance(value, str):
        text = value.strip().replace(" ", "").replace("i", "j")
        try:
            return complex(text)
        except ValueError as e:
            raise ConfigError("cannot parse complex number", {"value": value}) from e
    raise ConfigError("unsupported complex value", {"value": repr(value)})
