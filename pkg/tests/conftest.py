import random

import pytest

from symdet import QQ, Polynomial, RingSpec, prime_field

FP = prime_field(32003)


@pytest.fixture(scope="session")
def fp():
    return FP


@pytest.fixture(scope="session")
def rx3q():
    return RingSpec.make([("x", 3)], QQ)


@pytest.fixture(scope="session")
def rx3p():
    return RingSpec.make([("x", 3)], FP)


def random_poly(ring, rnd: random.Random, max_terms=5, max_deg=3, coeff_bound=9):
    """Small random polynomial with integer coefficients (field-agnostic)."""
    terms = []
    for _ in range(rnd.randint(1, max_terms)):
        exps = [0] * ring.nvars
        for _ in range(rnd.randint(0, max_deg)):
            exps[rnd.randrange(ring.nvars)] += 1
        c = 0
        while c == 0:
            c = rnd.randint(-coeff_bound, coeff_bound)
        terms.append((tuple(exps), c))
    return Polynomial(ring, terms)


def random_homogeneous(ring, rnd: random.Random, degree, max_terms=6, coeff_bound=9):
    terms = []
    for _ in range(rnd.randint(1, max_terms)):
        exps = [0] * ring.nvars
        for _ in range(degree):
            exps[rnd.randrange(ring.nvars)] += 1
        c = 0
        while c == 0:
            c = rnd.randint(-coeff_bound, coeff_bound)
        terms.append((tuple(exps), c))
    return Polynomial(ring, terms)
