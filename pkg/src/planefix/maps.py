"""Plane maps: exact complex polynomials, bilinear grid samples, plain callables.

All maps act on complex numpy arrays (points of the plane are complex
numbers throughout the package) and return arrays of the same shape.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, OutsideDomain


class PlaneMap:
    """Base class. Subclasses implement ``__call__`` on complex arrays."""

    label = "map"

    def __call__(self, z):
        raise NotImplementedError

    def displacement(self, z):
        z = np.asarray(z, dtype=complex)
        return self(z) - z

    @property
    def is_polynomial(self):
        return False


@dataclass(frozen=True)
class PolyMap(PlaneMap):
    """Polynomial c0 + c1 z + ... + cd z^d (coefficients low to high)."""

    coeffs: tuple

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise InputError("polynomial needs finite coefficients")
        # trailing zeros would hide the true degree
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if nz.size else c[:1]
        object.__setattr__(self, "coeffs", tuple(complex(x) for x in c))

    @property
    def is_polynomial(self):
        return True

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def label(self):
        return "poly:" + ",".join(_fmt_complex(c) for c in self.coeffs)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.coeffs[-1], dtype=complex)
        for c in reversed(self.coeffs[:-1]):
            out = out * z + c
        return out

    def derivative(self) -> "PolyMap":
        if self.degree == 0:
            return PolyMap((0,))
        return PolyMap(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def fixed_point_polynomial(self):
        """Coefficients (low to high) of f(z) - z."""
        c = list(self.coeffs) + [0] * max(0, 2 - len(self.coeffs))
        c[1] -= 1
        return np.asarray(c, dtype=complex)


def _fmt_complex(c):
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    return f"({c.real!r}{c.imag:+}j)"


@dataclass(frozen=True, eq=False)
class GridMap(PlaneMap):
    """Vector field sampled on a regular grid, bilinearly interpolated.

    ``values[j, i]`` is the image of ``xmin + i*dx + 1j*(ymin + j*dy)``.
    Evaluation outside ``box`` raises ``OutsideDomain``.
    """

    box: tuple  # (xmin, xmax, ymin, ymax)
    values: np.ndarray = field(repr=False)
    label: str = "grid"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 2 or min(v.shape) < 2:
            raise InputError("grid values must be a 2-d array with at least 2x2 samples")
        if not np.all(np.isfinite(v)):
            raise InputError("grid samples must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, func, box, n=257, label="grid"):
        xmin, xmax, ymin, ymax = box
        xs = np.linspace(xmin, xmax, n)
        ys = np.linspace(ymin, ymax, n)
        Z = xs[None, :] + 1j * ys[:, None]
        return cls(tuple(float(b) for b in box), func(Z), label)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        xmin, xmax, ymin, ymax = self.box
        ny, nx = self.values.shape
        x, y = z.real, z.imag
        slack = 1e-12 * max(xmax - xmin, ymax - ymin)
        if np.any((x < xmin - slack) | (x > xmax + slack) | (y < ymin - slack) | (y > ymax + slack)):
            raise OutsideDomain(f"grid map evaluated outside its box {self.box}")
        u = np.clip((x - xmin) / (xmax - xmin) * (nx - 1), 0, nx - 1)
        v = np.clip((y - ymin) / (ymax - ymin) * (ny - 1), 0, ny - 1)
        i = np.minimum(np.floor(u).astype(int), nx - 2)
        j = np.minimum(np.floor(v).astype(int), ny - 2)
        s, t = u - i, v - j
        V = self.values
        return ((1 - s) * (1 - t) * V[j, i] + s * (1 - t) * V[j, i + 1]
                + (1 - s) * t * V[j + 1, i] + s * t * V[j + 1, i + 1])


@dataclass(frozen=True, eq=False)
class FuncMap(PlaneMap):
    """Wrap an arbitrary vectorised callable (conjugation, |z|^2, ...)."""

    func: object
    label: str = "func"

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.asarray(self.func(z), dtype=complex)


def conj_map():
    return FuncMap(np.conj, "conj")


def abs2_map():
    return FuncMap(lambda z: (z * np.conj(z)).real + 0j, "abs2")


def as_map(f) -> PlaneMap:
    """Coerce polynomials given as coefficient lists, or callables, to PlaneMap."""
    if isinstance(f, PlaneMap):
        return f
    if callable(f):
        return FuncMap(f)
    return PolyMap(tuple(f))
