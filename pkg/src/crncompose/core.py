"""Species, complexes, reactions and mass-action right-hand sides.

Everything here is immutable. Complexes store species by dense integer id;
names live on the owning :class:`Crn`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

MAX_COEFFICIENT = 2**31


class DomainError(ValueError):
    """Raised when a state or parameter leaves the admissible domain."""


@dataclass(frozen=True)
class Species:
    id: int
    name: str


@dataclass(frozen=True)
class Complex:
    """Sparse nonnegative integer combination of species.

    ``items`` holds ``(species_id, coefficient)`` pairs sorted by id with
    every coefficient >= 1; the empty tuple is the zero complex.
    """

    items: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        ids = [i for i, _ in self.items]
        if ids != sorted(set(ids)):
            raise ValueError(f"complex items must be sorted and unique: {self.items}")
        for i, c in self.items:
            if not isinstance(i, int) or i < 0:
                raise ValueError(f"bad species id {i!r}")
            if not isinstance(c, int) or c < 1 or c > MAX_COEFFICIENT:
                raise ValueError(f"coefficient out of range: {c!r}")

    @classmethod
    def of(cls, coefficients: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> "Complex":
        """Build a canonical complex, summing repeated ids and dropping zeros."""
        pairs = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        acc: dict[int, int] = {}
        for i, c in pairs:
            if c < 0:
                raise ValueError(f"negative coefficient {c} for species {i}")
            acc[i] = acc.get(i, 0) + c
        return cls(tuple(sorted((i, c) for i, c in acc.items() if c)))

    @property
    def is_empty(self) -> bool:
        return not self.items

    def get(self, species_id: int) -> int:
        for i, c in self.items:
            if i == species_id:
                return c
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.items)

    def vector(self, n: int) -> np.ndarray:
        v = np.zeros(n, dtype=np.int64)
        for i, c in self.items:
            v[i] = c
        return v

    def project(self, keep: Mapping[int, int]) -> "Complex":
        """Restrict to the ids in ``keep`` and renumber them through it."""
        return Complex.of((keep[i], c) for i, c in self.items if i in keep)

    def format(self, names: Sequence[str]) -> str:
        if not self.items:
            return "0"
        return " + ".join(names[i] if c == 1 else f"{c} {names[i]}" for i, c in self.items)


@dataclass(frozen=True)
class Constant:
    k: float

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValueError(f"rate constant must be positive and finite, got {self.k!r}")

    def value(self, external=None) -> float:
        return self.k


@dataclass(frozen=True)
class TimeVarying:
    """Rate ``k * prod(u[i] ** e)`` over an external state vector ``u``.

    ``monomial`` holds ``(external_index, exponent)`` pairs; which external
    species an index refers to is fixed by the owner (see ``reduction``).
    """

    k: float
    monomial: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValueError(f"rate constant must be positive and finite, got {self.k!r}")
        if any(e < 1 for _, e in self.monomial):
            raise ValueError("monomial exponents must be >= 1")

    def value(self, external) -> float:
        if external is None and self.monomial:
            raise DomainError("time-varying rate needs an external state")
        out = self.k
        for i, e in self.monomial:
            out = out * external[i] ** e
        return out


RateLaw = Union[Constant, TimeVarying]


@dataclass(frozen=True)
class Reaction:
    reactant: Complex
    product: Complex
    rate: RateLaw = field(default_factory=lambda: Constant(1.0))

    def __post_init__(self):
        if self.reactant == self.product:
            raise ValueError("reactant and product complexes coincide")

    def net_change(self) -> dict[int, int]:
        out = self.product.as_dict()
        for i, c in self.reactant.items:
            out[i] = out.get(i, 0) - c
        return {i: c for i, c in out.items() if c}

    def reversed(self, rate: RateLaw | None = None) -> "Reaction":
        return Reaction(self.product, self.reactant, rate or self.rate)


@dataclass(frozen=True)
class Crn:
    """A reaction network; rates on the reactions make it a mass-action system."""

    species: tuple[Species, ...]
    reactions: tuple[Reaction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "reactions", tuple(self.reactions))
        for pos, sp in enumerate(self.species):
            if sp.id != pos:
                raise ValueError(f"species ids must be contiguous from 0, got {sp.id} at {pos}")
        names = [sp.name for sp in self.species]
        if len(set(names)) != len(names):
            raise ValueError("species names must be unique")
        n = len(self.species)
        for rxn in self.reactions:
            for cx in (rxn.reactant, rxn.product):
                for i, _ in cx.items:
                    if i >= n:
                        raise ValueError(f"reaction references unknown species id {i}")

    @classmethod
    def from_names(cls, names: Iterable[str], reactions: Iterable[Reaction] = ()) -> "Crn":
        return cls(tuple(Species(i, s) for i, s in enumerate(names)), tuple(reactions))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(sp.name for sp in self.species)

    @property
    def n_species(self) -> int:
        return len(self.species)

    def index(self, name: str) -> int:
        for sp in self.species:
            if sp.name == name:
                return sp.id
        raise KeyError(name)

    def complex(self, terms: Mapping[str, int]) -> Complex:
        """Build a complex from ``{name: coefficient}``."""
        return Complex.of((self.index(s), c) for s, c in terms.items())

    def has_constant_rates(self) -> bool:
        return all(isinstance(r.rate, Constant) or not r.rate.monomial for r in self.reactions)


@dataclass(frozen=True)
class MsCrc:
    """A mass-action system with its species split into inputs and outputs."""

    crn: Crn
    inputs: tuple[int, ...]

    def __post_init__(self):
        ins = tuple(sorted(set(self.inputs)))
        object.__setattr__(self, "inputs", ins)
        n = self.crn.n_species
        if any(i < 0 or i >= n for i in ins):
            raise ValueError("input ids out of range")
        if not ins:
            raise ValueError("an msCRC needs at least one input species")
        if len(ins) == n:
            raise ValueError("an msCRC needs at least one output species")

    @classmethod
    def from_names(cls, crn: Crn, inputs: Iterable[str]) -> "MsCrc":
        return cls(crn, tuple(crn.index(s) for s in inputs))

    @property
    def outputs(self) -> tuple[int, ...]:
        ins = set(self.inputs)
        return tuple(i for i in range(self.crn.n_species) if i not in ins)

    @property
    def input_names(self) -> tuple[str, ...]:
        return tuple(self.crn.species[i].name for i in self.inputs)

    @property
    def output_names(self) -> tuple[str, ...]:
        return tuple(self.crn.species[i].name for i in self.outputs)


def complexes(crn: Crn) -> list[Complex]:
    """Distinct reactant and product complexes in first-occurrence order."""
    seen: dict[Complex, None] = {}
    for rxn in crn.reactions:
        seen.setdefault(rxn.reactant, None)
        seen.setdefault(rxn.product, None)
    return list(seen)


def stoichiometric_matrix(crn: Crn) -> np.ndarray:
    """Integer matrix whose column j is product_j - reactant_j."""
    gamma = np.zeros((crn.n_species, len(crn.reactions)), dtype=np.int64)
    for j, rxn in enumerate(crn.reactions):
        for i, c in rxn.net_change().items():
            gamma[i, j] = c
    return gamma


External = Union[None, Sequence[float], np.ndarray, Callable[[float], np.ndarray]]


def _external_at(external: External, t: float):
    return external(t) if callable(external) else external


def mass_action_rhs(crn: Crn, state, t: float = 0.0, external: External = None) -> np.ndarray:
    """Evaluate ``sum_j rate_j(t) * s**reactant_j * (product_j - reactant_j)``.

    Works on floats or :class:`~fractions.Fraction` states (the latter give
    an exact object array). ``external`` supplies the state that
    time-varying rates read, either directly or as a function of ``t``.
    """
    s = list(state)
    if len(s) != crn.n_species:
        raise ValueError(f"state has {len(s)} entries, network has {crn.n_species} species")
    if any(x < 0 for x in s):
        raise DomainError("state components must be nonnegative")
    exact = any(isinstance(x, Fraction) for x in s)
    u = _external_at(external, t)
    out = [Fraction(0) if exact else 0.0 for _ in s]
    for rxn in crn.reactions:
        k = rxn.rate.value(u)
        flux = Fraction(k) if exact else k
        for i, c in rxn.reactant.items:
            flux = flux * s[i] ** c
        for i, c in rxn.net_change().items():
            out[i] = out[i] + c * flux
    return np.array(out, dtype=object if exact else float)


class RhsKernel:
    """Vectorised mass-action right-hand side for the integrator.

    Skips the domain check so that intermediate Runge-Kutta stages that dip
    slightly below zero can still be evaluated.
    """

    def __init__(self, crn: Crn, n_external: int = 0):
        r = len(crn.reactions)
        self.gamma = stoichiometric_matrix(crn).astype(float)
        self.exponents = np.zeros((r, crn.n_species))
        self.k = np.empty(r)
        self.ext_exponents = np.zeros((r, n_external))
        for j, rxn in enumerate(crn.reactions):
            for i, c in rxn.reactant.items:
                self.exponents[j, i] = c
            self.k[j] = rxn.rate.k
            if isinstance(rxn.rate, TimeVarying):
                for i, e in rxn.rate.monomial:
                    if i >= n_external:
                        raise ValueError("time-varying rate refers to a missing external species")
                    self.ext_exponents[j, i] = e
        self.time_varying = bool(n_external) and bool(np.any(self.ext_exponents))

    def rates(self, external=None) -> np.ndarray:
        if not self.time_varying:
            return self.k
        return self.k * np.prod(np.asarray(external, dtype=float) ** self.ext_exponents, axis=1)

    def __call__(self, s: np.ndarray, external=None) -> np.ndarray:
        if self.gamma.shape[1] == 0:
            return np.zeros_like(s)
        flux = self.rates(external) * np.prod(s**self.exponents, axis=1)
        return self.gamma @ flux
