import numpy as np

from jetspectra.families import GeneratingFamily


def random_trig_poly_text(rng, degree=5, scale=1.0):
    """Random trigonometric polynomial of the given degree, as DSL text."""
    terms = [repr(float(rng.uniform(-scale, scale)))]
    for m in range(1, degree + 1):
        a = float(rng.uniform(-scale, scale)) / m
        b = float(rng.uniform(-scale, scale)) / m
        terms.append(f"{a!r}*cos({m}*q)")
        terms.append(f"{b!r}*sin({m}*q)")
    return " + ".join(terms)


def random_trig_family(rng, degree=5, scale=1.0):
    return GeneratingFamily(0, [], random_trig_poly_text(rng, degree, scale))


def grid_values(family, n_q):
    qs = np.arange(n_q) * 2 * np.pi / n_q
    return np.broadcast_to(np.asarray(family.value(qs), dtype=float), qs.shape)
