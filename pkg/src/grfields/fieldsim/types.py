"""Geometry and realized-field containers shared by the samplers."""

import math
from dataclasses import dataclass

import numpy as np

from .._validation import check_positive_int, check_scalar_positive
from ..exceptions import ConfigurationError, DomainError


@dataclass(frozen=True)
class GridSpec:
    """Regular lattice with ``shape`` cells per axis and equal ``spacing``.

    Sites are numbered in C order; site ``(i0, i1, ...)`` sits at
    ``(i0 * spacing, i1 * spacing, ...)``.
    """

    shape: tuple
    spacing: float = 1.0

    def __post_init__(self):
        shape = tuple(check_positive_int(s, "grid extent", error=ConfigurationError) for s in self.shape)
        if len(shape) not in (1, 2):
            raise ConfigurationError(f"grids must be 1-D or 2-D, got {len(shape)} axes")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "spacing", check_scalar_positive(self.spacing, "spacing", error=ConfigurationError))

    @property
    def dims(self):
        return len(self.shape)

    @property
    def size(self):
        return math.prod(self.shape)

    @property
    def cell_volume(self):
        return self.spacing**self.dims

    def coords(self):
        axes = [np.arange(s) * self.spacing for s in self.shape]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)


@dataclass(frozen=True, eq=False)
class FieldSample:
    """One realization: ``values`` over ``geometry`` (a GridSpec or an (n, k) point array)."""

    values: np.ndarray
    geometry: object
    seed: int
    model_id: str
    stream: int = 0

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise DomainError("field values must be a vector")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        if values.size != self.n_sites(self.geometry):
            raise DomainError(f"{values.size} values do not match a geometry with {self.n_sites(self.geometry)} sites")

    @staticmethod
    def n_sites(geometry):
        if isinstance(geometry, GridSpec):
            return geometry.size
        if isinstance(geometry, (int, np.integer)):
            return int(geometry)
        return int(np.asarray(geometry).shape[0])

    def coords(self):
        g = self.geometry
        if isinstance(g, GridSpec):
            return g.coords()
        if isinstance(g, (int, np.integer)):
            return np.arange(g, dtype=float)[:, None]
        return np.asarray(g, dtype=float).reshape(self.values.size, -1)

    def as_grid(self):
        if not isinstance(self.geometry, GridSpec):
            raise DomainError("sample does not live on a grid")
        return self.values.reshape(self.geometry.shape)


def same_geometry(a, b):
    ga, gb = a.geometry, b.geometry
    if isinstance(ga, GridSpec) or isinstance(gb, GridSpec):
        return ga == gb
    return np.array_equal(np.asarray(ga), np.asarray(gb))
