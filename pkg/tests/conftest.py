import sys
from pathlib import Path

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from fraisse_tower.corpus import UR  # noqa: E402
from fraisse_tower.structures import FinStructure  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def ur_structures(draw, min_size=0, max_size=4, universe=None):
    """Structures with one unary U and one binary R on a set of naturals."""
    n = draw(st.integers(min_size, max_size))
    pool = universe or list(range(12))
    elems = draw(st.lists(st.sampled_from(pool), min_size=n, max_size=n, unique=True))
    U = [(x,) for x in elems if draw(st.booleans())]
    R = [(x, y) for x in elems for y in elems if draw(st.integers(0, 3)) == 0]
    return FinStructure(UR, elems, {"U": U, "R": R})


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
