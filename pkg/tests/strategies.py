"""Hypothesis strategies for small random networks."""

from hypothesis import strategies as st

from crncompose import Complex, Constant, Crn, Reaction


@st.composite
def complexes_over(draw, n_species, max_coef=2):
    ids = draw(st.lists(st.integers(0, n_species - 1), max_size=2, unique=True))
    return Complex.of({i: draw(st.integers(1, max_coef)) for i in ids})


@st.composite
def networks(draw, max_species=5, max_reactions=6):
    n = draw(st.integers(1, max_species))
    reactions = []
    for _ in range(draw(st.integers(1, max_reactions))):
        a = draw(complexes_over(n))
        b = draw(complexes_over(n))
        if a == b:
            continue
        k = draw(st.sampled_from([0.5, 1.0, 2.0, 3.0]))
        reactions.append(Reaction(a, b, Constant(k)))
    if not reactions:
        reactions.append(Reaction(Complex.of({0: 1}), Complex(), Constant(1.0)))
    return Crn.from_names([f"S{i}" for i in range(n)], reactions)
