"""Built-in framings with known invariants, used as golden fixtures."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownExample
from .frames import Framing


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    spec: dict
    flat: bool
    expected: dict = field(default_factory=dict)
    note: str = ""

    @property
    def dim(self):
        return self.spec["dim"]

    def framing(self) -> Framing:
        return Framing.from_spec(self.spec, name=self.name)


def _spec(w, domain):
    n = len(w)
    return {
        "dim": n,
        "domain": {f"x{i + 1}": list(iv) for i, iv in enumerate(domain)},
        "w": [list(row) for row in w],
    }


def _identity(n):
    return [["1" if i == j else "0" for j in range(n)] for i in range(n)]


# w[i][j] = chart component i of frame field j
_ENTRIES = [
    CatalogEntry(
        "abelian2", _spec(_identity(2), [(-10, 10)] * 2), True,
        {"C": {}, "scalar_curvature": 0.0}, "translations of R^2"),
    CatalogEntry(
        "abelian4", _spec(_identity(4), [(-10, 10)] * 4), True,
        {"C": {}, "scalar_curvature": 0.0}, "translations of R^4"),
    CatalogEntry(
        "affine2", _spec([["x1", "0"], ["0", "x1"]], [(0.1, 10), (-10, 10)]), True,
        {"C": {(1, 0, 1): -1.0, (1, 1, 0): 1.0}, "scalar_curvature": -2.0},
        "ax+b group, w1 = x1 d1, w2 = x1 d2"),
    CatalogEntry(
        "heisenberg3",
        _spec([["1", "0", "0"], ["0", "1", "0"], ["0", "x1", "1"]], [(-3, 3)] * 3), True,
        {"C": {(2, 0, 1): -1.0, (2, 1, 0): 1.0}, "scalar_curvature": -0.5},
        "w2 = d2 + x1 d3"),
    CatalogEntry(
        "heis3xR",
        _spec([["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "x1", "1", "0"], ["0", "0", "0", "1"]],
              [(-3, 3)] * 4), True,
        {"C": {(2, 0, 1): -1.0, (2, 1, 0): 1.0}, "scalar_curvature": -0.5},
        "heisenberg3 times a line"),
    CatalogEntry(
        "affine_product",
        _spec([["x1", "0", "0", "0"], ["0", "x1", "0", "0"], ["0", "0", "x3", "0"], ["0", "0", "0", "x3"]],
              [(0.1, 10), (-10, 10), (0.1, 10), (-10, 10)]), True,
        {"C": {(1, 0, 1): -1.0, (1, 1, 0): 1.0, (3, 2, 3): -1.0, (3, 3, 2): 1.0},
         "scalar_curvature": -4.0},
        "two copies of affine2"),
    CatalogEntry(
        "nonflat_demo", _spec([["1", "0"], ["0", "1 + x1^2"]], [(-2, 2), (-5, 5)]), False, {},
        "frame torsion 2 x1 / (1 + x1^2) varies"),
    CatalogEntry(
        "nonflat_demo4",
        _spec([["1", "0", "0", "0"], ["0", "1 + x1^2", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
              [(-2, 2), (-5, 5), (-5, 5), (-5, 5)]), False, {},
        "nonflat_demo times R^2"),
]

CATALOG = {e.name: e for e in _ENTRIES}


def names():
    return sorted(CATALOG)


def get_example(name) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownExample(name) from None


def get_framing(name) -> Framing:
    return get_example(name).framing()
