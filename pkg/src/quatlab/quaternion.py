"""Exact quaternion scalar and 3-vector algebra.

Hamilton convention throughout: i**2 = j**2 = k**2 = -1 and ij = k = -ji.
Values are immutable; the symplectic view q = z0 + z1 j (z0, z1 complex)
is a conversion, not a second storage format.  The anti-commutation
rule j z = z* j for complex z is what every symplectic identity in the
field layer rests on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, slots=True)
class Quaternion:
    """One value x0 + x1 i + x2 j + x3 k with real components."""

    x0: float = 0.0
    x1: float = 0.0
    x2: float = 0.0
    x3: float = 0.0

    @classmethod
    def from_symplectic(cls, z0: complex, z1: complex) -> "Quaternion":
        z0 = complex(z0)
        z1 = complex(z1)
        return cls(z0.real, z0.imag, z1.real, z1.imag)

    def to_symplectic(self) -> "SymplecticPair":
        return SymplecticPair(complex(self.x0, self.x1), complex(self.x2, self.x3))

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.x0, -self.x1, -self.x2, -self.x3)

    def norm_sq(self) -> float:
        return self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def normalized(self) -> "Quaternion":
        n = self.norm()
        if n == 0.0:
            raise ZeroDivisionError("cannot normalize the zero quaternion")
        return Quaternion(self.x0 / n, self.x1 / n, self.x2 / n, self.x3 / n)

    def components(self) -> tuple[float, float, float, float]:
        return (self.x0, self.x1, self.x2, self.x3)

    def __add__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self.x0 + other.x0, self.x1 + other.x1,
                              self.x2 + other.x2, self.x3 + other.x3)
        if isinstance(other, (int, float)):
            return Quaternion(self.x0 + other, self.x1, self.x2, self.x3)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self.x0 - other.x0, self.x1 - other.x1,
                              self.x2 - other.x2, self.x3 - other.x3)
        if isinstance(other, (int, float)):
            return Quaternion(self.x0 - other, self.x1, self.x2, self.x3)
        return NotImplemented

    def __neg__(self):
        return Quaternion(-self.x0, -self.x1, -self.x2, -self.x3)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a0, a1, a2, a3 = self.x0, self.x1, self.x2, self.x3
            b0, b1, b2, b3 = other.x0, other.x1, other.x2, other.x3
            return Quaternion(
                a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
                a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
                a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
                a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
            )
        if isinstance(other, (int, float)):
            return Quaternion(self.x0 * other, self.x1 * other,
                              self.x2 * other, self.x3 * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self.__mul__(other)
        return NotImplemented

    def is_close(self, other: "Quaternion", tol: float = 1e-12) -> bool:
        return (abs(self.x0 - other.x0) <= tol and abs(self.x1 - other.x1) <= tol
                and abs(self.x2 - other.x2) <= tol and abs(self.x3 - other.x3) <= tol)


@dataclass(frozen=True, slots=True)
class SymplecticPair:
    """Complex pair (z0, z1) with q = z0 + z1 j."""

    z0: complex = 0j
    z1: complex = 0j

    def to_quaternion(self) -> Quaternion:
        return Quaternion.from_symplectic(self.z0, self.z1)


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def _cross3(u, v):
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def cross_symplectic(x0, x1, y0, y1):
    """Quaternionic vector product in symplectic components.

    X x Y = X0 x Y0 - X1 x conj(Y1) + (X0 x Y1 + X1 x conj(Y0)) j.
    Components may be complex scalars or broadcastable arrays; this is
    the shared core for both the scalar QVector3 product and the field
    layer.  The product is real-bilinear but not antisymmetric.
    """
    y1c = tuple(np.conj(c) for c in y1)
    y0c = tuple(np.conj(c) for c in y0)
    a = _cross3(x0, y0)
    b = _cross3(x1, y1c)
    c = _cross3(x0, y1)
    d = _cross3(x1, y0c)
    z0 = tuple(ai - bi for ai, bi in zip(a, b))
    z1 = tuple(ci + di for ci, di in zip(c, d))
    return z0, z1


@dataclass(frozen=True, slots=True)
class QVector3:
    """3-vector with quaternion components."""

    vx: Quaternion
    vy: Quaternion
    vz: Quaternion

    @classmethod
    def from_real(cls, x: float, y: float, z: float) -> "QVector3":
        return cls(Quaternion(x), Quaternion(y), Quaternion(z))

    @classmethod
    def from_symplectic(cls, x0, x1) -> "QVector3":
        return cls(*(Quaternion.from_symplectic(a, b) for a, b in zip(x0, x1)))

    def symplectic(self):
        parts = [q.to_symplectic() for q in (self.vx, self.vy, self.vz)]
        return tuple(p.z0 for p in parts), tuple(p.z1 for p in parts)

    def __iter__(self):
        return iter((self.vx, self.vy, self.vz))


def qcross(x: QVector3, y: QVector3) -> QVector3:
    """Quaternionic cross product of two quaternion 3-vectors.

    Reduces to the ordinary cross product on real vectors; in general
    X x Y != -Y x X because the components do not commute.
    """
    x0, x1 = x.symplectic()
    y0, y1 = y.symplectic()
    z0, z1 = cross_symplectic(x0, x1, y0, y1)
    return QVector3.from_symplectic(z0, z1)
