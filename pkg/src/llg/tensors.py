"""Dense tensors at a point.

A :class:`Tensor` of type (r, s) in dimension n stores ``n**(r+s)`` reals in a
numpy array of shape ``(n,)*(r+s)`` with the r contravariant slots first, so
``T^i_{jk}`` lives at ``data[i, j, k]``.  Whether the slots refer to chart
coordinates or to the fixed model frame is a matter of context; the geometry
modules say which convention each function uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch

MAX_RANK = 4
MAX_DIM = 16


@dataclass(frozen=True, eq=False)
class Tensor:
    data: np.ndarray
    up: int = 0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        rank = data.ndim
        if rank > MAX_RANK:
            raise ShapeMismatch(f"rank {rank} exceeds {MAX_RANK}")
        if rank and len(set(data.shape)) != 1:
            raise ShapeMismatch(f"all slots must share one dimension, got {data.shape}")
        if rank and data.shape[0] > MAX_DIM:
            raise ShapeMismatch(f"dimension {data.shape[0]} exceeds {MAX_DIM}")
        if not 0 <= self.up <= rank:
            raise ShapeMismatch(f"{self.up} contravariant slots in a rank-{rank} tensor")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def dim(self):
        return self.data.shape[0] if self.data.ndim else 0

    @property
    def rank(self):
        return self.data.ndim

    @property
    def down(self):
        return self.rank - self.up

    @property
    def shape(self):
        return (self.up, self.down)

    def __getitem__(self, idx):
        return self.data[idx]

    def __repr__(self):
        return f"Tensor(type={self.shape}, dim={self.dim}, data={self.data.tolist()})"

    def tolist(self):
        return self.data.tolist()

    def _same_shape(self, other):
        if self.shape != other.shape or self.data.shape != other.data.shape:
            raise ShapeMismatch(f"type {self.shape}/{self.data.shape} vs {other.shape}/{other.data.shape}")

    def __add__(self, other):
        self._same_shape(other)
        return Tensor(self.data + other.data, self.up)

    def __sub__(self, other):
        return tensor_sub(self, other)

    def __neg__(self):
        return Tensor(-self.data, self.up)

    def __mul__(self, c):
        return Tensor(self.data * float(c), self.up)

    __rmul__ = __mul__


def zeros(dim, up, down):
    return Tensor(np.zeros((dim,) * (up + down)), up)


def identity(dim):
    """The Kronecker delta as a (1,1) tensor."""
    return Tensor(np.eye(dim), 1)


def _letters(k, start):
    return "abcdefghijklmnopqrstuvwxyz"[start:start + k]


def contract(a: Tensor, b: Tensor, pairs) -> Tensor:
    """Sum over each ``(slot_in_a, slot_in_b)`` pair.

    Every pair must join an upper slot with a lower slot.  Surviving slots keep
    their relative order, a's before b's, and are then regrouped so that
    contravariant slots come first.
    """
    pairs = list(pairs)
    if a.dim != b.dim and a.rank and b.rank:
        raise ShapeMismatch(f"dimension {a.dim} vs {b.dim}")
    la = list(_letters(a.rank, 0))
    lb = list(_letters(b.rank, a.rank))
    used_a, used_b = set(), set()
    for sa, sb in pairs:
        if not (0 <= sa < a.rank and 0 <= sb < b.rank):
            raise ShapeMismatch(f"slot pair {(sa, sb)} out of range")
        if sa in used_a or sb in used_b:
            raise ShapeMismatch(f"slot reused in pairs {pairs}")
        if (sa < a.up) == (sb < b.up):
            raise ShapeMismatch(f"pair {(sa, sb)} does not join an upper and a lower slot")
        used_a.add(sa)
        used_b.add(sb)
        lb[sb] = la[sa]
    free_a = [s for s in range(a.rank) if s not in used_a]
    free_b = [s for s in range(b.rank) if s not in used_b]
    upper = [la[s] for s in free_a if s < a.up] + [lb[s] for s in free_b if s < b.up]
    lower = [la[s] for s in free_a if s >= a.up] + [lb[s] for s in free_b if s >= b.up]
    spec = f"{''.join(la)},{''.join(lb)}->{''.join(upper + lower)}"
    return Tensor(np.einsum(spec, a.data, b.data), len(upper))


def antisymmetrize_pair(a: Tensor, slot1: int, slot2: int) -> Tensor:
    """``out[..j..k..] = a[..j..k..] - a[..k..j..]`` with no factor 1/2."""
    if not (0 <= slot1 < a.rank and 0 <= slot2 < a.rank) or slot1 == slot2:
        raise ShapeMismatch(f"bad slots {(slot1, slot2)} for rank {a.rank}")
    if (slot1 < a.up) != (slot2 < a.up):
        raise ShapeMismatch("antisymmetrized slots must have the same variance")
    return Tensor(a.data - np.swapaxes(a.data, slot1, slot2), a.up)


def tensor_sub(a: Tensor, b: Tensor) -> Tensor:
    a._same_shape(b)
    return Tensor(a.data - b.data, a.up)


def max_abs(a) -> float:
    data = a.data if isinstance(a, Tensor) else np.asarray(a)
    return float(np.max(np.abs(data))) if data.size else 0.0
