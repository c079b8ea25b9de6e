"""Finitely supported measures and their algebra.

Measures are immutable atom lists with positive weights summing to 1.
Everything here is exact desk-scale arithmetic: mixing, restriction,
conditioning, decomposition along a partition, pushforward, tensor
products, and integration.
"""

from kantorovich import (
    FiniteMeasure,
    condition,
    decompose,
    dirac,
    integrate,
    measures_equal,
    mix,
    pushforward,
    restrict,
    tensor,
)

# --- construction normalizes, merges duplicates, drops zero weights ---------

mu = FiniteMeasure([(0.0,), (0.0,), (1.0,), (2.0,)], [0.2, 0.2, 0.35, 0.25])
print("merged support:", mu.support)
print("weights:", mu.weights)

# --- Dirac and mixtures -------------------------------------------------------

half = mix([(0.5, dirac((0.0,))), (0.5, dirac((1.0,)))])
print("mixture of Diracs:", half)

# mixing a mixture with a Dirac: weights add atomwise
m = mix([(0.5, half), (0.5, dirac((0.0,)))])
print("3/4 at 0, 1/4 at 1:", m)

# --- restriction and conditioning --------------------------------------------

sub = restrict(mu, lambda p: p[0] >= 1)
print("restricted mass:", sub.mass)
cond = condition(mu, lambda p: p[0] >= 1)
print("conditioned:", cond)
print("restrict to nothing:", restrict(mu, lambda p: p[0] > 9))

# --- decomposition along a partition, and the round trip ---------------------

parts = decompose(mu, [lambda p: p[0] < 1, lambda p: p[0] >= 1])
for eps, piece in parts:
    print(f"cell mass {eps:.2f}:", piece)
print("mix(decompose) == original:", measures_equal(mix(parts), mu))

# --- pushforward and tensor ---------------------------------------------------

uniform4 = FiniteMeasure([(float(k),) for k in range(4)], [0.25] * 4)
parity = pushforward(lambda p: (p[0] % 2,), uniform4)
print("parity image:", parity)

prod = tensor(half, dirac("c"))
print("tensor atoms:", prod.support)
print("first marginal recovered:", measures_equal(pushforward(lambda p: p[0], prod), half))

# --- integration ---------------------------------------------------------------

quarters = FiniteMeasure([(0.0,), (2.0,)], [0.25, 0.75])
print("integral of x^2:", integrate(quarters, lambda p: p[0] ** 2))
