"""Independent oracles for the tests: plain numerical-semigroup arithmetic.

Everything here works on sets of integers (value sets of monomial rings and
ideals), with no reference to the lattice engine, so expected values for the
single-branch monomial fixtures are computed by a genuinely different route.
"""


def sg_values(gens, bound):
    """Values of the numerical semigroup <gens> below bound."""
    vals = {0}
    frontier = [0]
    while frontier:
        v = frontier.pop()
        for a in gens:
            w = v + a
            if w < bound and w not in vals:
                vals.add(w)
                frontier.append(w)
    return vals


def sg_conductor(gens, bound=None):
    """Smallest c with [c, infinity) inside the semigroup."""
    if bound is None:
        bound = 2 * max(gens) ** 2 + 2
    vals = sg_values(gens, bound)
    c = bound
    while c - 1 >= 0 and (c - 1) in vals:
        c -= 1
    return c


def sg_gaps(gens):
    bound = sg_conductor(gens) + 1
    vals = sg_values(gens, bound)
    return sorted(set(range(bound)) - vals)


def ideal_values(sgv, ideal_gens, bound):
    """Values of the module sum t^a * ring over the value set sgv."""
    out = set()
    for a in ideal_gens:
        for v in sgv:
            if a + v < bound:
                out.add(a + v)
    return out


def colon_values(avals, bvals, cap, big, lo=-64):
    """{v in [lo, cap) : v + bvals inside avals}.

    ``avals`` must contain every value in [c, big) for its conductor c and
    ``big`` must exceed that conductor; then restricting the test to sums
    below ``big`` is exact (deeper sums are automatically inside)."""
    out = set()
    bb = [b for b in bvals if b < big]
    for v in range(lo, cap):
        if all((v + b) in avals for b in bb if v + b < big):
            out.add(v)
    return out


def end_chain_value_sets(gens, max_steps=16):
    """Iterate S -> End(m_S) on value sets; returns the chain of value sets
    from <gens> to the full set {0,1,2,...} and its length n."""
    bound = 4 * sg_conductor(gens) + 4 * max(gens) + 8
    cur = sg_values(gens, bound)
    chain = [cur]
    full = set(range(bound))
    steps = 0
    while cur != full and steps < max_steps:
        m = {v for v in cur if v > 0}
        mmin = min(m)
        # End(m) value set: {x >= 0 : x + m <= m} within the safe window
        safe = bound - sg_conductor(gens) - max(gens) - 2
        nxt = set()
        for x in range(0, safe):
            if all((x + v) in cur for v in m if x + v < safe):
                nxt.add(x)
        # extend to the bound: everything at and above the visible conductor
        c = safe
        while c - 1 >= 0 and (c - 1) in nxt:
            c -= 1
        nxt |= set(range(c, bound))
        cur = nxt
        chain.append(cur)
        steps += 1
    return chain, steps
