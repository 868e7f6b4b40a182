"""Regular voxel grids carrying scalar fields."""

from dataclasses import dataclass, field

import numpy as np
from django.core.exceptions import ValidationError

from .constants import ErrorMessages


@dataclass(frozen=True)
class Bounds:
    """
    Axis-aligned region in meters.
    """
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != 3 or len(hi) != 3:
            raise ValidationError("Bounds need three coordinates per corner.")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, center, size):
        center = np.asarray(center, dtype=float)
        half = 0.5 * float(size)
        return cls(tuple(center - half), tuple(center + half))

    @property
    def extent(self):
        return np.asarray(self.hi) - np.asarray(self.lo)

    @property
    def center(self):
        return 0.5 * (np.asarray(self.lo) + np.asarray(self.hi))

    @property
    def volume(self):
        return float(np.prod(np.clip(self.extent, 0.0, None)))

    def contains(self, points):
        points = np.atleast_2d(points)
        return np.all((points >= self.lo) & (points <= self.hi), axis=1)

    def translated(self, offset):
        offset = np.asarray(offset, dtype=float)
        return Bounds(tuple(np.asarray(self.lo) + offset), tuple(np.asarray(self.hi) + offset))

    def to_dict(self):
        return {"lo": list(self.lo), "hi": list(self.hi)}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(data["lo"]), tuple(data["hi"]))


@dataclass(frozen=True)
class GridGeometry:
    """
    Cell-centered grid layout: cell ``(i, j, k)`` is centered at
    ``origin + (index + 0.5) * spacing``.
    """
    origin: tuple
    spacing: float
    dims: tuple

    def __post_init__(self):
        if not self.spacing > 0.0:
            raise ValidationError(ErrorMessages.BAD_SPACING)
        dims = tuple(int(n) for n in self.dims)
        if len(dims) != 3 or min(dims) < 1:
            raise ValidationError("Grid dims must be three positive integers.")
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def covering(cls, region, h):
        """
        Largest grid of spacing ``h`` whose cells fit inside ``region``,
        centered in it.
        """
        if not h > 0.0:
            raise ValidationError(ErrorMessages.BAD_SPACING)
        if region.volume <= 0.0:
            raise ValidationError(ErrorMessages.EMPTY_REGION)
        counts = np.floor(region.extent / h + 1e-9).astype(int)
        if np.any(counts < 1):
            raise ValidationError(ErrorMessages.REGION_TOO_SMALL.format(h=h))
        slack = region.extent - counts * h
        origin = np.asarray(region.lo) + 0.5 * slack
        return cls(tuple(origin), h, tuple(counts))

    @property
    def shape(self):
        return self.dims

    @property
    def size(self):
        return int(np.prod(self.dims))

    @property
    def bounds(self):
        lo = np.asarray(self.origin)
        return Bounds(tuple(lo), tuple(lo + np.asarray(self.dims) * self.spacing))

    @property
    def center(self):
        return self.bounds.center

    @property
    def diagonal(self):
        return float(np.linalg.norm(np.asarray(self.dims) * self.spacing))

    def axes(self):
        return [
            np.asarray(self.origin[a]) + (np.arange(self.dims[a]) + 0.5) * self.spacing
            for a in range(3)
        ]

    def cell_centers(self):
        """
        All cell centers, shape ``dims + (3,)``.
        """
        xs, ys, zs = self.axes()
        return np.stack(np.meshgrid(xs, ys, zs, indexing="ij"), axis=-1)

    def cell_center(self, index):
        return np.asarray(self.origin) + (np.asarray(index, dtype=float) + 0.5) * self.spacing

    def cell_of(self, point):
        """
        Index of the cell whose extent contains ``point``, or ``None``
        when the point lies outside the grid.
        """
        index = np.floor((np.asarray(point, dtype=float) - self.origin) / self.spacing).astype(int)
        if np.any(index < 0) or np.any(index >= self.dims):
            return None
        return tuple(int(v) for v in index)

    def fractional_index(self, points):
        """
        Continuous index coordinates where integer values hit cell centers.
        """
        return (np.atleast_2d(points) - np.asarray(self.origin)) / self.spacing - 0.5

    def flat_index(self, index):
        """
        Position of ``index`` in x-fastest storage order.
        """
        i, j, k = index
        nx, ny, _ = self.dims
        return int(i + nx * (j + ny * k))

    def translated(self, offset):
        return GridGeometry(tuple(np.asarray(self.origin) + offset), self.spacing, self.dims)


@dataclass(frozen=True)
class ScalarGrid3:
    """
    Immutable scalar samples on a ``GridGeometry``; ``values`` has shape
    ``(nx, ny, nz)`` and may hold ``+inf``. ``notes`` carries diagnostics
    from the producing operation.
    """
    geometry: GridGeometry
    values: np.ndarray
    notes: tuple = field(default=())

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.geometry.dims:
            raise ValidationError(
                f"Grid data shape {values.shape} does not match dims {self.geometry.dims}."
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "notes", tuple(self.notes))

    @classmethod
    def filled(cls, geometry, value):
        return cls(geometry, np.full(geometry.dims, float(value)))

    @classmethod
    def from_flat(cls, geometry, data):
        """
        Build from x-fastest ordered data.
        """
        data = np.asarray(data, dtype=float)
        if data.size != geometry.size:
            raise ValidationError(
                f"Grid data length {data.size} does not equal {geometry.size}."
            )
        return cls(geometry, data.reshape(geometry.dims, order="F"))

    def flat(self):
        """
        Data in x-fastest storage order.
        """
        return self.values.ravel(order="F")

    def with_values(self, values, notes=()):
        return ScalarGrid3(self.geometry, values, notes)

    @property
    def finite_mask(self):
        return np.isfinite(self.values)

    def __getitem__(self, index):
        return float(self.values[tuple(index)])
