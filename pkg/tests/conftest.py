from __future__ import annotations

import pytest

from heegnerpadic.cocycle import HarmonicSpace
from heegnerpadic.lfun import LfunConfig, find_embedding
from heegnerpadic.measure import TeitelbaumMeasure
from heegnerpadic.quat import QuotientGraph, algebra_init

# reference instance: p = 3, N- = 2, N+ = 1, weight 4, K = Q(sqrt(-19))
P, N_MINUS, N_PLUS, WEIGHT, DISC = 3, 2, 1, 4, -19


@pytest.fixture(scope="session")
def order():
    return algebra_init(N_MINUS, N_PLUS, P)[1]


@pytest.fixture(scope="session")
def graph(order):
    return QuotientGraph(order, P)


@pytest.fixture(scope="session")
def space4(graph):
    return HarmonicSpace(graph, WEIGHT - 2)


@pytest.fixture(scope="session")
def form(space4):
    return space4.eigenform()


@pytest.fixture(scope="session")
def mu(form):
    return TeitelbaumMeasure(form)


@pytest.fixture(scope="session")
def emb(graph):
    return find_embedding(graph, DISC)


@pytest.fixture(scope="session")
def lcfg(form, emb, mu):
    return LfunConfig(form, [emb], depth=5, prec=40, measure=mu)
