"""Shared fixtures-by-hand for the derivation and local-derivation tests.

The Leibniz checks here go straight through convolve on unit elements, so
they share no code path with the solver-based machinery they are used to
cross-check.
"""

from fia.fialg import FiElement, convolve, unit
from fia.poset import parse_poset

CHAIN2 = parse_poset("elements: a b\na < b\n")
CHAIN3 = parse_poset("elements: x y z\nx < y\ny < z\n")
SINGLETON = parse_poset("elements: s\n")
ANTICHAIN2 = parse_poset("elements: a b\n")
DIAMOND = parse_poset("elements: bot a b top\nbot < a\nbot < b\na < top\nb < top\n")
# Height-one four-cycle: the smallest poset with an outer derivation.
CROWN = parse_poset("elements: a b c d\na < c\na < d\nb < c\nb < d\n")


def random_element(poset, ring, rng, fill=0.6):
    entries = {}
    for pair in poset.ipairs:
        if rng.random() < fill:
            v = ring.sample(rng)
            if v != ring.zero:
                entries[pair] = v
    return FiElement(poset, ring, entries)


def all_units(poset, ring):
    els = poset.elements
    return [unit(poset, ring, els[i], els[j]) for i, j in poset.ipairs]


def leibniz_on_units(d) -> bool:
    """d(uv) == d(u)v + u d(v) over every pair of basis units, via convolve."""
    units = all_units(d.poset, d.ring)
    images = [d.apply(u) for u in units]
    for u, du in zip(units, images):
        for v, dv in zip(units, images):
            if d.apply(convolve(u, v)) != convolve(du, v) + convolve(u, dv):
                return False
    return True


def random_derivation(poset, ring, rng, basis):
    """A random combination of the given derivation basis."""
    from fia.deriv import LinearEndo

    d = LinearEndo.zero(poset, ring)
    for b in basis:
        c = ring.sample(rng)
        if c != ring.zero:
            d = d + b.scale(c)
    return d
