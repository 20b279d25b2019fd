"""Discretized substrate fields that gate and bias mycelium growth.

A substrate is a regular 2D or 3D grid of cells. Each cell carries a
nutrient concentration, attractant and repellent concentrations (all in
[0, 1]), and a growability flag used to mask off walls, templates or
poisoned regions. Positions are continuous (mm); cell i along an axis
covers [i * cell_size_mm, (i + 1) * cell_size_mm).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParseError

SUBSTRATE_FORMAT = "myceliumsim/substrate/v1"


@dataclass(eq=False)
class SubstrateField:
    """Grid of per-cell concentrations plus a growable mask.

    Arrays are indexed [ix, iy] / [ix, iy, iz] and must share one shape.
    """

    cell_size_mm: float
    nutrient: np.ndarray
    attractant: np.ndarray
    repellent: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        self.nutrient = np.asarray(self.nutrient, dtype=float)
        self.attractant = np.asarray(self.attractant, dtype=float)
        self.repellent = np.asarray(self.repellent, dtype=float)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.cell_size_mm <= 0:
            raise DimensionError("cell_size_mm must be > 0")
        shape = self.nutrient.shape
        if len(shape) not in (2, 3):
            raise DimensionError(f"substrate must be 2D or 3D, got shape {shape}")
        if any(n < 1 for n in shape):
            raise DimensionError(f"substrate needs at least one cell per axis, got {shape}")
        for name in ("attractant", "repellent", "mask"):
            if getattr(self, name).shape != shape:
                raise DimensionError(f"{name} shape {getattr(self, name).shape} != nutrient shape {shape}")
        for name in ("nutrient", "attractant", "repellent"):
            arr = getattr(self, name)
            if not np.all((arr >= 0.0) & (arr <= 1.0)):
                raise DimensionError(f"{name} concentrations must lie in [0, 1]")
        self._gradients: dict[str, list[np.ndarray]] = {}

    @classmethod
    def uniform(cls, shape, cell_size_mm=1.0, nutrient=0.0, attractant=0.0, repellent=0.0):
        """Homogeneous field with everything growable."""
        shape = tuple(int(n) for n in shape)
        return cls(
            cell_size_mm=float(cell_size_mm),
            nutrient=np.full(shape, float(nutrient)),
            attractant=np.full(shape, float(attractant)),
            repellent=np.full(shape, float(repellent)),
            mask=np.ones(shape, dtype=bool),
        )

    @property
    def ndim(self) -> int:
        return self.nutrient.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.nutrient.shape

    @property
    def size_mm(self) -> tuple[float, ...]:
        return tuple(n * self.cell_size_mm for n in self.shape)

    def cell_index(self, position) -> tuple[int, ...] | None:
        """Cell containing `position`, or None if outside the grid."""
        if len(position) != self.ndim:
            raise DimensionError(f"position {position} has arity {len(position)}, field is {self.ndim}D")
        idx = tuple(int(np.floor(x / self.cell_size_mm)) for x in position)
        for i, n in zip(idx, self.shape):
            if i < 0 or i >= n:
                return None
        return idx

    def is_growable(self, position) -> bool:
        """False outside the grid and in masked-off cells."""
        idx = self.cell_index(position)
        return bool(self.mask[idx]) if idx is not None else False

    def nutrient_at(self, position) -> float:
        idx = self.cell_index(position)
        return float(self.nutrient[idx]) if idx is not None else 0.0

    def _gradient(self, name: str) -> list[np.ndarray]:
        # np.gradient needs >= 2 points per axis; single-cell axes get zero slope
        if name not in self._gradients:
            arr = getattr(self, name)
            grads = []
            for axis in range(arr.ndim):
                if arr.shape[axis] >= 2:
                    grads.append(np.gradient(arr, self.cell_size_mm, axis=axis))
                else:
                    grads.append(np.zeros_like(arr))
            self._gradients[name] = grads
        return self._gradients[name]

    def _gradient_at(self, name: str, position) -> np.ndarray:
        idx = self.cell_index(position)
        if idx is None:
            return np.zeros(self.ndim)
        return np.array([g[idx] for g in self._gradient(name)])

    def attractant_gradient_at(self, position) -> np.ndarray:
        """Per-axis attractant slope (per mm) sampled at the containing cell."""
        return self._gradient_at("attractant", position)

    def repellent_gradient_at(self, position) -> np.ndarray:
        return self._gradient_at("repellent", position)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubstrateField):
            return NotImplemented
        return (
            self.cell_size_mm == other.cell_size_mm
            and self.shape == other.shape
            and np.array_equal(self.nutrient, other.nutrient)
            and np.array_equal(self.attractant, other.attractant)
            and np.array_equal(self.repellent, other.repellent)
            and np.array_equal(self.mask, other.mask)
        )


def _format_row(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def save_substrate(field: SubstrateField, path) -> None:
    """Write the versioned plain-text substrate format (arrays flattened C-order)."""
    lines = [SUBSTRATE_FORMAT]
    lines.append("cell_size_mm " + repr(float(field.cell_size_mm)))
    lines.append("dims " + " ".join(str(n) for n in field.shape))
    lines.append("nutrient " + _format_row(field.nutrient.ravel()))
    lines.append("attractant " + _format_row(field.attractant.ravel()))
    lines.append("repellent " + _format_row(field.repellent.ravel()))
    lines.append("mask " + " ".join("1" if b else "0" for b in field.mask.ravel()))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_substrate(path) -> SubstrateField:
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read()
    path = str(path)
    lines = raw.splitlines()
    if not lines or lines[0].strip() != SUBSTRATE_FORMAT:
        raise ParseError(f"expected header {SUBSTRATE_FORMAT!r}", path=path, line=1)
    fields: dict[str, tuple[int, str]] = {}
    for ln, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        if key in fields:
            raise ParseError(f"duplicate key {key!r}", path=path, line=ln)
        fields[key] = (ln, rest)

    def take(key: str) -> tuple[int, str]:
        if key not in fields:
            raise ParseError(f"missing key {key!r}", path=path)
        return fields.pop(key)

    ln, rest = take("cell_size_mm")
    try:
        cell = float(rest)
    except ValueError:
        raise ParseError(f"bad cell_size_mm {rest!r}", path=path, line=ln) from None
    ln, rest = take("dims")
    try:
        dims = tuple(int(tok) for tok in rest.split())
    except ValueError:
        raise ParseError(f"bad dims {rest!r}", path=path, line=ln) from None
    if len(dims) not in (2, 3) or any(n < 1 for n in dims):
        raise ParseError(f"dims must be 2 or 3 positive integers, got {dims}", path=path, line=ln)
    count = int(np.prod(dims))

    def parse_array(key: str, kind: str) -> np.ndarray:
        ln, rest = take(key)
        toks = rest.split()
        if len(toks) != count:
            raise ParseError(f"{key}: expected {count} values, got {len(toks)}", path=path, line=ln)
        try:
            if kind == "float":
                vals = np.array([float(t) for t in toks])
            else:
                vals = np.array([{"0": False, "1": True}[t] for t in toks])
        except (ValueError, KeyError):
            raise ParseError(f"{key}: bad value in row", path=path, line=ln) from None
        return vals.reshape(dims)

    nutrient = parse_array("nutrient", "float")
    attractant = parse_array("attractant", "float")
    repellent = parse_array("repellent", "float")
    mask = parse_array("mask", "bool")
    if fields:
        key = next(iter(fields))
        raise ParseError(f"unknown key {key!r}", path=path, line=fields[key][0])
    try:
        return SubstrateField(cell, nutrient, attractant, repellent, mask)
    except DimensionError as exc:
        raise ParseError(str(exc), path=path) from exc
