import numpy as np


def random_symmetric(rng, n, scale=1.0):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (m + m.T)


def c_gram(dec):
    v = dec.vectors
    return v @ v.T


def as_sets(rows, digits=6):
    return sorted(tuple(sorted(round(float(x), digits) for x in row)) for row in rows)
