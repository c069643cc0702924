import pytest

from tndpq.syntax import AttributeSchema


@pytest.fixture
def loan_schema() -> AttributeSchema:
    return AttributeSchema.of(
        [
            ("Age", tuple(str(n) for n in (18, 27, 35, 50, 65))),
            ("Gen", ("f", "m")),
            ("MS", ("single", "married", "divorced", "widowed")),
            ("Etn", ("white", "black", "asian", "hispanic")),
            ("Loan", ("yes", "no")),
        ]
    )


@pytest.fixture
def small_schema() -> AttributeSchema:
    return AttributeSchema.of([("X", ("a", "b", "c")), ("Y", ("u", "v")), ("Z", ("p", "q", "r"))])
