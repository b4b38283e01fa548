"""Structural invariants: linkage classes, reversibility, rank, deficiency,
positive conservation laws."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .core import Complex, Crn, complexes, stoichiometric_matrix
from .linalg import exact_rank, left_null_space, primitive

log = logging.getLogger(__name__)

LP_POSITIVITY_TOL = 1e-9


class UndeterminedError(RuntimeError):
    """The numerical search for a conservation law failed to converge."""


def _complex_graph(crn: Crn) -> tuple[list[Complex], coo_matrix]:
    cx = complexes(crn)
    index = {c: i for i, c in enumerate(cx)}
    src = [index[r.reactant] for r in crn.reactions]
    dst = [index[r.product] for r in crn.reactions]
    graph = coo_matrix((np.ones(len(src)), (src, dst)), shape=(len(cx), len(cx)))
    return cx, graph


def linkage_classes(crn: Crn) -> list[list[int]]:
    """Weakly connected components of the complex graph.

    Complex indices refer to :func:`~crncompose.core.complexes` order;
    classes are ordered by their smallest member.
    """
    cx, graph = _complex_graph(crn)
    if not cx:
        return []
    _, labels = connected_components(graph, directed=True, connection="weak")
    return _partition(labels)


def _partition(labels) -> list[list[int]]:
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def strong_components(crn: Crn) -> list[list[int]]:
    cx, graph = _complex_graph(crn)
    if not cx:
        return []
    _, labels = connected_components(graph, directed=True, connection="strong")
    return _partition(labels)


def reversibility_flags(crn: Crn) -> dict[str, bool]:
    edges = {(r.reactant, r.product) for r in crn.reactions}
    reversible = all((b, a) in edges for a, b in edges)
    # Weakly reversible iff linkage classes and strong components coincide.
    weakly = len(strong_components(crn)) == len(linkage_classes(crn))
    return {"reversible": reversible, "weakly_reversible": weakly}


def deficiency(crn: Crn) -> int:
    n = len(complexes(crn))
    l = len(linkage_classes(crn))
    return n - l - exact_rank(stoichiometric_matrix(crn))


def conservation_vector(crn: Crn) -> Optional[list[Fraction]]:
    """A strictly positive ``v`` with ``v^T Gamma = 0``, or ``None``.

    The left null space is found exactly; a linear program then looks for
    the combination of basis vectors maximising the smallest entry. The LP
    coefficients are rationalised and the result re-checked exactly, so a
    returned vector is always a certified conservation law (scaled to
    coprime integers).

    Raises:
        UndeterminedError: the LP did not terminate successfully.
    """
    gamma = stoichiometric_matrix(crn)
    n = crn.n_species
    if n == 0:
        return None
    basis = left_null_space(gamma, n)
    if not basis:
        return None
    nb = np.array([[float(x) for x in b] for b in basis]).T  # n x d
    d = nb.shape[1]
    # variables (c_1..c_d, t): maximise t s.t. N c >= t, sum(N c) = 1, t <= 1
    cost = np.zeros(d + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([-nb, np.ones((n, 1))])
    b_ub = np.zeros(n)
    a_eq = np.hstack([nb.sum(axis=0, keepdims=True), np.zeros((1, 1))])
    bounds = [(None, None)] * d + [(None, 1.0)]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=bounds, method="highs")
    if res.status == 2:
        return None
    if not res.success:
        raise UndeterminedError(f"conservation LP failed: {res.message}")
    if -res.fun < LP_POSITIVITY_TOL:
        return None
    coeffs = res.x[:d]
    for max_den in (10**3, 10**6, 10**9, 10**12):
        c = [Fraction(float(x)).limit_denominator(max_den) for x in coeffs]
        v = [sum((ci * b[i] for ci, b in zip(c, basis)), Fraction(0)) for i in range(n)]
        if min(v) > 0 and _is_conserved(gamma, v):
            return primitive(v)
    log.warning("LP found a positive candidate but no rationalisation verified exactly")
    raise UndeterminedError("could not rationalise the LP solution into an exact conservation law")


def _is_conserved(gamma: np.ndarray, v) -> bool:
    for j in range(gamma.shape[1]):
        if sum(v[i] * int(gamma[i, j]) for i in range(gamma.shape[0])) != 0:
            return False
    return True


@dataclass(frozen=True)
class StructuralReport:
    n_complexes: int
    linkage_classes: list[list[int]]
    n_linkage_classes: int
    stoich_rank: int
    deficiency: int
    weakly_reversible: bool
    reversible: bool
    conservation_vector: Optional[list[Fraction]]
    complexes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        cv = self.conservation_vector
        return {
            "n_complexes": self.n_complexes,
            "linkage_classes": self.linkage_classes,
            "n_linkage_classes": self.n_linkage_classes,
            "stoich_rank": self.stoich_rank,
            "deficiency": self.deficiency,
            "weakly_reversible": self.weakly_reversible,
            "reversible": self.reversible,
            "conservation_vector": None if cv is None else [_rational(x) for x in cv],
            "complexes": list(self.complexes),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _rational(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def structural_report(crn: Crn) -> StructuralReport:
    cx = complexes(crn)
    classes = linkage_classes(crn)
    rank = exact_rank(stoichiometric_matrix(crn))
    flags = reversibility_flags(crn)
    delta = len(cx) - len(classes) - rank
    assert delta >= 0, "deficiency must be nonnegative"
    return StructuralReport(
        n_complexes=len(cx),
        linkage_classes=classes,
        n_linkage_classes=len(classes),
        stoich_rank=rank,
        deficiency=delta,
        weakly_reversible=flags["weakly_reversible"],
        reversible=flags["reversible"],
        conservation_vector=conservation_vector(crn),
        complexes=tuple(c.format(crn.names) for c in cx),
    )
