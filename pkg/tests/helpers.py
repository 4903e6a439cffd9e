"""Network builders shared by the test suite."""

from pathlib import Path

import numpy as np

from netdisrupt.core.models import Network

FIXTURES = Path(__file__).parent / "fixtures"


def labels(n):
    return tuple(str(k) for k in range(n))


def network(values, group=0, name="", mask=None):
    values = np.asarray(values, dtype=float)
    return Network(labels=labels(values.shape[0]), values=values, mask=mask, group=group, name=name)


def star(n=6, group=0):
    """Agent 0 linked to every other agent."""
    values = np.zeros((n, n))
    values[0, 1:] = values[1:, 0] = 1.0
    return network(values, group=group, name="star")


def line(n=6, group=1):
    """Agents linked in a path 0-1-...-(n-1)."""
    values = np.zeros((n, n))
    for k in range(n - 1):
        values[k, k + 1] = values[k + 1, k] = 1.0
    return network(values, group=group, name="line")


def random_symmetric(rng, n):
    a = rng.normal(size=(n, n))
    return (a + a.T) / 2


def random_binary(rng, n, p=None, name="random"):
    """Symmetric 0/1 network with a zero diagonal."""
    p = rng.uniform(0.2, 0.8) if p is None else p
    upper = np.triu(rng.random((n, n)) < p, 1)
    return network((upper | upper.T).astype(float), name=name)


def random_valued(rng, n, levels=(0.0, 1.0, 2.0), name="random"):
    """Symmetric network with off-diagonal values drawn from ``levels``."""
    upper = np.triu(rng.choice(levels, size=(n, n)), 1)
    return network(upper + upper.T, name=name)
