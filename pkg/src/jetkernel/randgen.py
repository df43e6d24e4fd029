"""Seeded random instances for the self-test suites and property tests."""

from __future__ import annotations

import random
from fractions import Fraction

from .factorization import FactorizationPair, composite, lift_plot
from .formal import FormalMorphism, FormalSpace, cartesian_block, compose, linear_map
from .linalg import inverse
from .polyring import Polynomial, make_monomial, monomials_up_to
from .weil import disk, make_weil


def rng_for(seed, suite: str) -> random.Random:
    """Independent Mersenne Twister stream per suite."""
    return random.Random(f"{seed}:{suite}")


def rand_coeff(rng: random.Random, small: int = 5) -> Fraction:
    num = rng.randint(-small, small) or 1
    den = rng.choice((1, 1, 1, 2, 3))
    return Fraction(num, den)


def rand_poly(rng: random.Random, vars, max_deg: int, nterms: int | None = None,
              min_deg: int = 0) -> Polynomial:
    vars = tuple(vars)
    monos = [e for e in monomials_up_to(len(vars), max_deg) if sum(e) >= min_deg]
    if not monos:
        return Polynomial.zero(vars)
    if nterms is None:
        nterms = rng.randint(1, min(6, len(monos)))
    chosen = rng.sample(monos, min(nterms, len(monos)))
    return Polynomial({make_monomial(zip(vars, e)): rand_coeff(rng) for e in chosen}, vars)


def algebra_pool():
    return [
        disk(1, 1), disk(1, 2), disk(2, 1), disk(2, 2),
        make_weil(2, ["x^2", "x*y", "y^3"], vars=("x", "y"), name="Q[x,y]/(x^2,xy,y^3)"),
        make_weil(2, ["x^2 - y^2", "x*y"], vars=("x", "y"), name="Q[x,y]/(x^2-y^2,xy)"),
        make_weil(1, ["x^3"], vars=("x",), name="Q[x]/(x^3)"),
    ]


def rand_invertible(rng: random.Random, n: int) -> list:
    """Product of a lower and an upper unitriangular matrix with rows shuffled."""
    low = [[Fraction(int(i == j)) if i <= j else Fraction(rng.randint(-1, 1))
            for j in range(n)] for i in range(n)]
    up = [[Fraction(int(i == j)) if i >= j else Fraction(rng.randint(-2, 2))
           for j in range(n)] for i in range(n)]
    m = [[sum(low[i][t] * up[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
    rng.shuffle(m)
    return m


def rand_affine_diffeo(rng: random.Random, V: FormalSpace) -> tuple:
    """A random affine automorphism of a Cartesian space and its inverse."""
    n = V.dim
    M = rand_invertible(rng, n)
    b = [Fraction(rng.randint(-2, 2)) for _ in range(n)]
    Minv = inverse(M)
    shift = [-sum(Minv[i][j] * b[j] for j in range(n)) for i in range(n)]
    return linear_map(V, V, M, b), linear_map(V, V, Minv, shift)


def rand_source(rng: random.Random, max_params: int = 2, algebras=None) -> FormalSpace:
    q = rng.randint(0, max_params)
    A = rng.choice(algebras or algebra_pool())
    return FormalSpace(cartesian_block("u", q), A)


def rand_plot(rng: random.Random, src: FormalSpace, K: int, max_deg: int = 3) -> FormalMorphism:
    tgt = FormalSpace.cartesian(cartesian_block("y", K))
    return FormalMorphism(src, tgt, tuple(rand_poly(rng, src.coords, max_deg) for _ in range(K)))


def rand_pair(rng: random.Random, src: FormalSpace, K: int, vdim: int, deg_iota: int = 2,
              deg_f: int = 2) -> FactorizationPair:
    V = FormalSpace.cartesian(cartesian_block("x", vdim))
    iota = FormalMorphism(src, V, tuple(rand_poly(rng, src.coords, deg_iota) for _ in range(vdim)))
    tgt = FormalSpace.cartesian(cartesian_block("y", K))
    f = FormalMorphism(V, tgt, tuple(rand_poly(rng, V.coords, deg_f) for _ in range(K)))
    return FactorizationPair(iota, f)


def equal_composite_partner(rng: random.Random, p: FactorizationPair, extra: int | None = None,
                            deg: int = 2) -> FactorizationPair:
    """A different factorization of the same plot.

    ``iota' = A o (u, eps, g(u, eps))`` for a random affine ``A`` and
    ``f' = f0 o A^-1`` with ``f0 = c + sum (y_g - g) r + sum h(y_t) r'``, where
    ``c`` represents the composite of ``p``.
    """
    src = p.source
    A = src.thickening
    m = src.dim
    s = rng.randint(0, 2) if extra is None else extra
    names = cartesian_block("z", m + s)
    V0 = FormalSpace.cartesian(names)
    g = [rand_poly(rng, src.coords, deg) for _ in range(s)]
    iota0 = FormalMorphism(src, V0, tuple(src.coordinate(c) for c in src.coords) + tuple(g))
    to_v = dict(zip(src.coords, (V0.coordinate(c) for c in names[:m])))
    eps_to_v = {e: to_v[e] for e in src.eps}
    comps = []
    for c in composite(p).components:
        val = c.substitute(to_v, vars=names)
        for j, gj in enumerate(g):
            yj = V0.coordinate(names[m + j])
            val = val + (yj - gj.substitute(to_v, vars=names)) * rand_poly(rng, names, 1)
        for h in A.generators:
            if rng.random() < 0.5:
                val = val + h.substitute(eps_to_v, vars=names) * rand_poly(rng, names, 1)
        comps.append(val)
    f0 = FormalMorphism(V0, p.f.target, tuple(comps))
    D, D_inv = rand_affine_diffeo(rng, V0)
    return FactorizationPair(compose(D, iota0), compose(f0, D_inv))


def perturb(rng: random.Random, p: FactorizationPair) -> tuple:
    """Change one component of ``f`` by a function nonzero on the image; returns ``(pair, k)``."""
    src = p.source
    k = rng.randrange(p.K)
    # pulls back to a standard basis element of the source algebra (times a parameter monomial)
    mono = rng.choice(src.thickening.basis)
    bump = Polynomial({mono: rand_coeff(rng)}, src.coords)
    if src.params and rng.random() < 0.5:
        bump = bump * src.coordinate(rng.choice(src.params))
    target = list(composite(p).components)
    target[k] = target[k] + bump
    q = lift_plot(FormalMorphism(src, p.f.target, tuple(target)))
    return equal_composite_partner(rng, q), k
