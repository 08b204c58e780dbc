import random

import pytest

from agcal import rates
from agcal.index_core import HOLDS, Net, big_o, grid_config
from agcal.laws import big_o_laws, limit_laws, order_laws, random_net


@pytest.mark.parametrize("seed", [1, 7])
def test_big_o_laws(seed):
    rep = big_o_laws(n=80, seed=seed)
    assert rep["failures"] == []
    assert all(c > 0 for c in rep["checked"].values())


@pytest.mark.parametrize("seed", [2, 8])
def test_order_laws(seed):
    rep = order_laws(n=60, seed=seed)
    assert rep["failures"] == []
    assert all(c > 0 for c in rep["checked"].values())


@pytest.mark.parametrize("seed", [3, 9])
def test_limit_laws(seed):
    rep = limit_laws(n=80, seed=seed)
    assert rep["failures"] == []
    assert all(c > 0 for c in rep["checked"].values())


def test_reproducible():
    assert big_o_laws(n=20, seed=5) == big_o_laws(n=20, seed=5)


def test_exact_and_numeric_routes_agree():
    """The symbolic decision is confirmed by the sampled route whenever the latter decides."""
    rng = random.Random(11)
    agree = decided = 0
    for _ in range(40):
        x, y = random_net(rng), random_net(rng)
        exact = rates.is_big_o(x, y)
        pts = grid_config().points()
        try:
            diff = [(e, rates.log_abs_at(x, e) - rates.log_abs_at(y, e)) for e in pts]
        except rates.RateError:
            continue
        num = big_o(Net.log_callable(dict(diff).__getitem__), Net.symbolic(rates.parse("1")))
        if num.status in ("Holds", "Fails"):
            decided += 1
            agree += (num.status == HOLDS) == exact
    assert decided >= 20
    assert agree == decided
