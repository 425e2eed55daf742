import random

import pytest

from atomreconf.core import Geometry, Problem


def random_centered(rng: random.Random, max_w=16, max_h=24, epsilon=0.6):
    """Random centred instance with enough atoms to fill the target band."""
    w = rng.randint(1, max_w)
    h = rng.randint(2, max_h)
    g = Geometry(w, h)
    n_atoms = round(epsilon * w * h)
    h_prime = max(1, min(h - 1, n_atoms // w))
    if n_atoms < w * h_prime:
        n_atoms = w * h_prime
    atoms = rng.sample(g.vertices(), n_atoms)
    return Problem.centered(g, atoms, h_prime)


def random_grid(rng: random.Random, max_side=8, max_targets=10):
    """Arbitrary (non-centred) grid instance."""
    w = rng.randint(1, max_side)
    h = rng.randint(1, max_side)
    verts = Geometry(w, h).vertices()
    k = rng.randint(0, min(max_targets, len(verts)))
    m = rng.randint(k, len(verts))
    return Problem(Geometry(w, h), frozenset(rng.sample(verts, m)), frozenset(rng.sample(verts, k)))


@pytest.fixture
def rng():
    return random.Random(1234)
