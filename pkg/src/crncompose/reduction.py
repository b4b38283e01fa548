"""Reduced systems: an msCRC projected onto its output species, with input
concentrations folded into time-varying rate constants."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .core import Constant, Crn, DomainError, MsCrc, Reaction, Species, TimeVarying


@dataclass(frozen=True)
class FrozenInput:
    """Inputs held at fixed positive values, aligned with ``ReducedSystem.inputs``."""

    values: tuple[float, ...]


@dataclass(frozen=True)
class TrajectoryInput:
    """Inputs read from a co-integrated driver network.

    Reduced-system input names are looked up in ``driver`` by name; the
    driver starts from ``state0`` (ordered like ``driver.names``).
    """

    driver: Crn
    state0: tuple[float, ...]


InputBinding = Union[FrozenInput, TrajectoryInput]


@dataclass(frozen=True)
class ReducedSystem:
    """Generalized mass-action system over the output species.

    Attributes:
        base: network over the outputs. Each rate is a ``TimeVarying`` whose
            monomial indexes into ``inputs`` (a ``Constant`` when the
            original reactant held no inputs).
        inputs: names of the absorbed input species.
        origin: index in the original network of each reduced reaction.
        dropped: indices of original reactions whose projection has no
            net change; they are not part of ``base``.
        binding: how the inputs are supplied when simulating.
    """

    base: Crn
    inputs: tuple[str, ...]
    origin: tuple[int, ...]
    dropped: tuple[int, ...] = ()
    binding: Optional[InputBinding] = None

    @property
    def rate_specs(self) -> list[tuple[float, dict[str, int]]]:
        """``(kappa_j, {input name: exponent})`` per reduced reaction."""
        out = []
        for r in self.base.reactions:
            mono = getattr(r.rate, "monomial", ())
            out.append((r.rate.k, {self.inputs[i]: e for i, e in mono}))
        return out

    def bind(self, binding: InputBinding) -> "ReducedSystem":
        if isinstance(binding, FrozenInput) and len(binding.values) != len(self.inputs):
            raise ValueError("frozen input has the wrong dimension")
        if isinstance(binding, TrajectoryInput):
            missing = [s for s in self.inputs if s not in binding.driver.names]
            if missing:
                raise ValueError(f"driver network lacks input species {missing}")
        return replace(self, binding=binding)

    def rate_comment(self, j: int) -> str:
        k, mono = self.rate_specs[j]
        parts = [f"{k:g}"] + [name if e == 1 else f"{name}^{e}" for name, e in mono.items()]
        return "k=" + " * ".join(parts)


def reduce_mscrc(c: MsCrc) -> ReducedSystem:
    crn = c.crn
    outputs = c.outputs
    out_index = {sid: pos for pos, sid in enumerate(outputs)}
    in_index = {sid: pos for pos, sid in enumerate(c.inputs)}
    species = tuple(Species(pos, crn.species[sid].name) for pos, sid in enumerate(outputs))
    reactions = []
    origin = []
    dropped = []
    for j, rxn in enumerate(crn.reactions):
        left = rxn.reactant.project(out_index)
        right = rxn.product.project(out_index)
        if left == right:
            dropped.append(j)
            continue
        mono = tuple((in_index[i], e) for i, e in rxn.reactant.items if i in in_index)
        rate = TimeVarying(rxn.rate.k, mono) if mono else Constant(rxn.rate.k)
        reactions.append(Reaction(left, right, rate))
        origin.append(j)
    return ReducedSystem(
        base=Crn(species, tuple(reactions)),
        inputs=c.input_names,
        origin=tuple(origin),
        dropped=tuple(dropped),
    )


def _input_vector(r: ReducedSystem, x: Union[Sequence[float], Mapping[str, float]]) -> np.ndarray:
    if isinstance(x, Mapping):
        x = [x[name] for name in r.inputs]
    arr = np.asarray(x, dtype=float)
    if arr.shape != (len(r.inputs),):
        raise ValueError(f"expected {len(r.inputs)} input values, got shape {arr.shape}")
    return arr


def freeze_inputs(r: ReducedSystem, x: Union[Sequence[float], Mapping[str, float]]) -> Crn:
    """Constant-rate network with ``k_j * x**exponents_j`` as rate constants.

    Raises:
        DomainError: some input value is not strictly positive.
    """
    arr = _input_vector(r, x)
    if np.any(~(arr > 0)):
        raise DomainError("frozen input values must be strictly positive")
    reactions = tuple(replace(rxn, rate=Constant(float(rxn.rate.value(arr)))) for rxn in r.base.reactions)
    return Crn(r.base.species, reactions)
