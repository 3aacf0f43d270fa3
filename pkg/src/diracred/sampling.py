"""Seeded random rational points that avoid a list of polynomial loci."""
from __future__ import annotations

import random
from fractions import Fraction


def random_rational(rng: random.Random, span: int = 9, max_den: int = 5) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, max_den))


def random_points(dim, count, seed=0, avoid=(), accept=None, max_tries=10_000):
    """``count`` points in Q^dim where no function in ``avoid`` has a pole or zero.

    ``accept`` is an optional predicate on the point (constraint filters).
    """
    rng = random.Random(seed)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"could only draw {len(out)} of {count} admissible sample points")
        p = tuple(random_rational(rng) for _ in range(dim))
        if accept is not None and not accept(p):
            continue
        ok = True
        for f in avoid:
            try:
                if f.evaluate(p) == 0:
                    ok = False
                    break
            except ZeroDivisionError:
                ok = False
                break
        if ok:
            out.append(p)
    return out
