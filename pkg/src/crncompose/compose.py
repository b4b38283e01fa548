"""Coupling two msCRCs so the outputs of the first drive the second."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .core import Complex, Crn, MsCrc, Reaction, Species


class WiringError(ValueError):
    """Species of two networks cannot be identified consistently."""


@dataclass(frozen=True)
class CoupledSystem:
    mscrc: MsCrc
    provenance: tuple[str, ...]  # "c1" or "c2" per reaction
    output_split: tuple[tuple[int, ...], tuple[int, ...]]

    @property
    def crn(self) -> Crn:
        return self.mscrc.crn

    def provenance_comments(self) -> dict[int, str]:
        return {j: f"from {tag}" for j, tag in enumerate(self.provenance)}


def rename_species(c: MsCrc, mapping: Mapping[str, str]) -> MsCrc:
    names = [mapping.get(s, s) for s in c.crn.names]
    if len(set(names)) != len(names):
        raise WiringError(f"renaming merges species: {names}")
    crn = Crn(tuple(Species(i, s) for i, s in enumerate(names)), c.crn.reactions)
    return MsCrc(crn, c.inputs)


def couple(c1: MsCrc, c2: MsCrc, rename: Optional[Mapping[str, str]] = None) -> CoupledSystem:
    """Union of both networks with ``Y1`` and ``X2`` identified by name.

    Raises:
        WiringError: the wiring assumption fails (``Y1 != X2``, an output of
            ``c2`` collides with a species of ``c1``, or ``c2`` changes its
            own inputs).
    """
    from .composability import check_assumptions

    if rename:
        c2 = rename_species(c2, rename)
    report = check_assumptions(c1, c2)
    if not report.ok:
        raise WiringError("; ".join(report.diagnostics))

    names1 = c1.crn.names
    extra = [s for s in c2.crn.names if s not in names1]
    names = list(names1) + extra
    index = {s: i for i, s in enumerate(names)}
    remap = {sid: index[s] for sid, s in enumerate(c2.crn.names)}

    def move(cx: Complex) -> Complex:
        return Complex.of((remap[i], c) for i, c in cx.items)

    reactions = list(c1.crn.reactions)
    reactions += [Reaction(move(r.reactant), move(r.product), r.rate) for r in c2.crn.reactions]
    crn = Crn(tuple(Species(i, s) for i, s in enumerate(names)), tuple(reactions))
    mscrc = MsCrc(crn, c1.inputs)
    y1 = c1.outputs
    y2 = tuple(index[s] for s in c2.output_names)
    provenance = ("c1",) * len(c1.crn.reactions) + ("c2",) * len(c2.crn.reactions)
    return CoupledSystem(mscrc, provenance, (y1, y2))
