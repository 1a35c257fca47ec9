from fractions import Fraction

from hypothesis import settings, strategies as st

from congested_floc.model import AgentProfile, GroupSpec, Instance

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

F = Fraction


@st.composite
def instances(draw, n_max=8, m_max=3, den_max=12, consistent=True, single_group=False):
    n = draw(st.integers(1, n_max))
    m = 1 if single_group else draw(st.integers(1, min(m_max, n)))
    groups = list(range(m)) + draw(st.lists(st.integers(0, m - 1), min_size=n - m, max_size=n - m))
    groups = draw(st.permutations(groups))
    den = draw(st.integers(1, den_max))
    xs = draw(st.lists(st.integers(0, den), min_size=n, max_size=n))
    specs = []
    for j in range(m):
        size = groups.count(j)
        cap = F(1, size - 1) if size > 1 else F(1)
        if not consistent:
            cap *= 3
        specs.append(GroupSpec(j, cap * F(draw(st.integers(0, 8)), 8)))
    agents = tuple(AgentProfile(F(x, den), g) for x, g in zip(xs, groups))
    return Instance(agents, tuple(specs))


coordinates = st.fractions(min_value=0, max_value=1, max_denominator=60)


# acceptance criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(ok), detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 10):
        ok, detail = ACCEPTANCE.get(n, (False, "did not complete"))
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
