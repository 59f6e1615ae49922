from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def unit_rationals(max_den: int = 10_000, open_interval: bool = True):
    """Rationals p/q in (0, 1), or [0, 1] when open_interval is false."""
    lo = 1 if open_interval else 0

    @st.composite
    def build(draw):
        q = draw(st.integers(min_value=2 if open_interval else 1, max_value=max_den))
        p = draw(st.integers(min_value=lo, max_value=q - lo))
        return Fraction(p, q)

    return build()


def rationals(max_num: int = 10_000, max_den: int = 10_000):
    return st.builds(
        Fraction,
        st.integers(min_value=-max_num, max_value=max_num),
        st.integers(min_value=1, max_value=max_den),
    )
