from fractions import Fraction

from hypothesis import settings
from hypothesis import strategies as st

from bjcalc.scalars import ExactScalar
from bjcalc.symbols import PolySymbol
from bjcalc.weyl import NormalOperator

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def exact_scalars(draw, max_terms=3):
    powers = draw(st.lists(st.integers(-2, 4), max_size=max_terms, unique=True))
    terms = {e: (draw(small_fractions), draw(small_fractions)) for e in powers}
    return ExactScalar(terms)


def _term_maps(cls, max_degree):
    @st.composite
    def build(draw):
        n = draw(st.integers(0, 4))
        terms = {}
        for _ in range(n):
            r = draw(st.integers(0, max_degree))
            s = draw(st.integers(0, max_degree - r))
            terms[(r, s)] = draw(exact_scalars(max_terms=2))
        return cls(terms)

    return build()


def poly_symbols(max_degree=4):
    return _term_maps(PolySymbol, max_degree)


def normal_operators(max_degree=4):
    return _term_maps(NormalOperator, max_degree)


def frac(a, b=1):
    return Fraction(a, b)


# acceptance criteria report one line each; collected here and echoed at the end
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
