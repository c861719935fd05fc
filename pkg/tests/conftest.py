import sys
from fractions import Fraction

from hypothesis import settings, strategies as st

from lenode.dyadic import Dyadic

settings.register_profile("default", deadline=None, max_examples=200, derandomize=True)
settings.load_profile("default")


def dyadics(max_bits=64, max_exp=16):
    return st.builds(
        Dyadic,
        st.integers(min_value=-(2**max_bits), max_value=2**max_bits),
        st.integers(min_value=0, max_value=max_exp),
    )


def frac(d) -> Fraction:
    """Independent rational view of a Dyadic."""
    return Fraction(d.mantissa, 2**d.exponent)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.LINES:
        terminalreporter.write_line(line)
