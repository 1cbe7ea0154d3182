"""Minimal forward-mode differentiation over the four real coordinates.

Points of the chart are ``(z, w) = (x1 + i x2, y1 + i y2)``.  A :class:`Dual`
carries a value array of shape ``(n,)`` and the directional derivatives along
``(d/dx1, d/dx2, d/dy1, d/dy2)`` in an array of shape ``(n, 4)``.  Values may be
complex; the product and quotient rules hold for complex-valued functions of
real variables, so taking ``.real``/``.imag`` at the end yields the real
gradient.
"""

from __future__ import annotations

import numpy as np

NDIR = 4

# directional derivative of z and w along each real coordinate
_DZ = np.array([1.0, 1.0j, 0.0, 0.0])
_DW = np.array([0.0, 0.0, 1.0, 1.0j])


class Dual:
    __slots__ = ("val", "grad")
    __array_ufunc__ = None

    def __init__(self, val, grad=None):
        self.val = np.asarray(val)
        if grad is None:
            grad = np.zeros(self.val.shape + (NDIR,), dtype=self.val.dtype)
        self.grad = np.asarray(grad)

    @classmethod
    def seed_z(cls, z) -> "Dual":
        z = np.asarray(z, dtype=complex)
        return cls(z, np.broadcast_to(_DZ, z.shape + (NDIR,)).copy())

    @classmethod
    def seed_w(cls, w) -> "Dual":
        w = np.asarray(w, dtype=complex)
        return cls(w, np.broadcast_to(_DW, w.shape + (NDIR,)).copy())

    @classmethod
    def holomorphic(cls, val, dval_dz, dz: "Dual", dval_dw=None, dw: "Dual" = None) -> "Dual":
        """Compose a holomorphic map with dual inputs via its complex partials."""
        grad = np.asarray(dval_dz)[..., None] * dz.grad
        if dval_dw is not None:
            grad = grad + np.asarray(dval_dw)[..., None] * dw.grad
        return cls(val, grad)

    # -- arithmetic ---------------------------------------------------------
    @staticmethod
    def _lift(other) -> "Dual":
        return other if isinstance(other, Dual) else Dual(other)

    def __add__(self, other):
        o = self._lift(other)
        return Dual(self.val + o.val, self.grad + o.grad)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return Dual(self.val - o.val, self.grad - o.grad)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return Dual(-self.val, -self.grad)

    def __mul__(self, other):
        o = self._lift(other)
        return Dual(
            self.val * o.val,
            self.grad * o.val[..., None] + o.grad * self.val[..., None],
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        q = self.val / o.val
        return Dual(q, (self.grad - o.grad * q[..., None]) / o.val[..., None])

    def __rtruediv__(self, other):
        return self._lift(other) / self

    # -- helpers ------------------------------------------------------------
    @property
    def real(self) -> "Dual":
        return Dual(self.val.real, self.grad.real)

    @property
    def imag(self) -> "Dual":
        return Dual(self.val.imag, self.grad.imag)

    def conj(self) -> "Dual":
        return Dual(np.conj(self.val), np.conj(self.grad))

    def apply(self, f, df) -> "Dual":
        """Apply a scalar function with known derivative elementwise."""
        return Dual(f(self.val), df(self.val)[..., None] * self.grad)

    def __getitem__(self, idx) -> "Dual":
        return Dual(self.val[idx], self.grad[idx])

    def __len__(self):
        return len(self.val)

    def __repr__(self):
        return f"Dual(val={self.val!r}, grad={self.grad!r})"


def where(cond, a: Dual, b: Dual) -> Dual:
    a, b = Dual._lift(a), Dual._lift(b)
    cond = np.asarray(cond)
    return Dual(np.where(cond, a.val, b.val), np.where(cond[..., None], a.grad, b.grad))
