from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("taulab", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("taulab")

small_fractions = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


def dict_polys(nvars: int, max_terms: int = 5, max_exp: int = 3):
    """Sparse polynomials as {exponent tuple: Fraction}, the independent oracle representation."""
    mono = st.tuples(*[st.integers(0, max_exp)] * nvars)
    return st.dictionaries(mono, small_fractions.filter(lambda x: x != 0), max_size=max_terms)


def dict_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c != 0}


def fraction_det(M) -> Fraction:
    """Gaussian elimination over Fractions."""
    A = [[Fraction(x) for x in row] for row in M]
    n, sign, acc = len(A), 1, Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            sign = -sign
        acc *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            for k in range(c, n):
                A[r][k] -= f * A[c][k]
    return sign * acc


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
