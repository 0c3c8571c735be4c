import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from emms.instance import new_instance  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def weight_rows(draw, n, beta=Fraction(0)):
    rows = []
    for i in range(n):
        own = beta + (1 - beta) * Fraction(draw(st.integers(0, 10)), 10)
        if n == 1:
            rows.append([Fraction(1)])
            continue
        draws = draw(st.lists(st.integers(0, 5), min_size=n - 1, max_size=n - 1))
        total = sum(draws)
        rest = 1 - own
        others = [rest * d / total for d in draws] if total else [rest / (n - 1)] * (n - 1)
        rows.append(others[:i] + [own] + others[i:])
    return rows


@st.composite
def network_instances(draw, n_max=4, m_max=6, v_max=10, beta=Fraction(0), n_min=1):
    n = draw(st.integers(n_min, n_max))
    m = draw(st.integers(0, m_max))
    values = [draw(st.lists(st.integers(0, v_max), min_size=m, max_size=m)) for _ in range(n)]
    return new_instance(values, draw(weight_rows(n, beta)))


@st.composite
def general_instances(draw, n_max=4, m_max=5, v_max=10):
    n = draw(st.integers(1, n_max))
    m = draw(st.integers(0, m_max))
    cross = [
        [draw(st.lists(st.integers(0, v_max), min_size=m, max_size=m)) for _ in range(n)]
        for _ in range(n)
    ]
    return new_instance(None, cross_values=cross)


@st.composite
def partitions_of(draw, m, n):
    from emms.allocation import Partition

    labels = draw(st.lists(st.integers(0, n - 1), min_size=m, max_size=m))
    return Partition(tuple(tuple(b for b in range(m) if labels[b] == k) for k in range(n)))


@pytest.fixture
def pair():
    from emms.fixtures import symmetric_pair

    return symmetric_pair()
