import pytest

from jacobizeros.coeffs import (
    SupportModel,
    make_constant,
    make_periodic2,
    make_rank_one,
    make_section4,
)

ACCEPTANCE_LINES = []

# exact bound state of the free family with b(1) = 3 is 3 + 1/3
RANK_ONE_POINT = 10.0 / 3.0


def families():
    """(name, sequence, exact support model) for every built-in family."""
    return [
        ("constant", make_constant(1, 0), SupportModel(((-2.0, 2.0),))),
        ("periodic2", make_periodic2(3, 1, 0), SupportModel(((-4.0, -2.0), (2.0, 4.0)))),
        (
            "periodic2_bound",
            make_periodic2(1, 2, 0.5),
            SupportModel(((-2.5, -0.5), (1.5, 3.5)), (0.5,)),
        ),
        ("section4", make_section4(), SupportModel(((-5.0, -1.0), (1.0, 5.0)))),
        (
            "rank_one",
            make_rank_one(make_constant(1, 0), 3),
            SupportModel(((-2.0, 2.0),), (RANK_ONE_POINT,)),
        ),
    ]


@pytest.fixture(params=families(), ids=lambda f: f[0])
def family(request):
    return request.param


@pytest.fixture
def record():
    def _record(criterion, passed, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
