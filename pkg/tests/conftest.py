from math import gcd

from hypothesis import strategies as st

from quadorbits.qforms import Form, GL2Int
from quadorbits.quadfield import is_square


@st.composite
def indefinite_forms(draw, bound=30):
    """Primitive forms with positive non-square discriminant and A != 0."""
    A = draw(st.integers(-bound, bound).filter(lambda a: a != 0))
    B = draw(st.integers(-bound, bound))
    C = draw(st.integers(-bound, bound))
    D = B * B - 4 * A * C
    from hypothesis import assume
    assume(D > 0 and not is_square(D) and gcd(gcd(A, B), C) == 1)
    return Form(A, B, C)


@st.composite
def sl2_matrices(draw, length=6):
    """Random words in T, S and their inverses."""
    T = GL2Int(1, 1, 0, 1)
    S = GL2Int(0, -1, 1, 0)
    gens = [T, T.inv(), S, S.inv()]
    g = GL2Int(1, 0, 0, 1)
    for i in draw(st.lists(st.integers(0, 3), max_size=length)):
        g = g @ gens[i]
    return g


discriminants = st.integers(5, 3000).filter(lambda D: D % 4 in (0, 1) and not is_square(D))
