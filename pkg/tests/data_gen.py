"""Random finite support data whose supports realize every Thomason subset."""
import random

from patchdense import SupportDatum, random_poset
from patchdense.support import generates_opens


def random_datum(rng: random.Random, max_size: int = 6, bound: int = 6) -> SupportDatum:
    while True:
        X = random_poset(rng, rng.randint(1, max_size))
        closed = X.closed_sets()
        gens = {f"g{k}": X.up(x) for k, x in enumerate(X.elements)}
        for k in range(rng.randint(0, 3)):
            gens[f"h{k}"] = rng.choice(closed)
        d = SupportDatum(X, gens, name="random")
        if generates_opens(d, bound):
            return d
