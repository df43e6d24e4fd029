"""Seeded property suites; the report is deterministic for a fixed seed."""

from __future__ import annotations

from math import comb

from .errors import IncompatibleConeError, JetKernelError, NotInIdealError
from .factorization import (
    FactorizationPair,
    decide_equivalence,
    composite,
    inject_fault,
    lift_plot,
    witness_d1,
    witness_general,
    witness_point,
)
from .formal import FormalMorphism, FormalSpace, cartesian_block, rectify_affine, rectified_inclusion
from .hadamard import hadamard_expand, taylor_coefficient_via_derivative
from .jets import (
    JetSpace,
    TruncatedProPlot,
    disk_section_to_jet,
    jet_to_disk_section,
    lift_jet_plot,
    plot_to_cone,
    cone_to_plot,
    project,
    prolong,
)
from .polyring import Polynomial
from .randgen import (
    algebra_pool,
    equal_composite_partner,
    perturb,
    rand_coeff,
    rand_pair,
    rand_plot,
    rand_poly,
    rand_source,
    rng_for,
)
from .weil import disk, expected_disk_dim, make_weil, normal_form, ideal_decompose, weil_tensor

PRNG_NAME = "MT19937 (Python random.Random, string-seeded per suite)"
MAX_LISTED_FAILURES = 5


class _Suite:
    def __init__(self, name: str):
        self.name = name
        self.passed = 0
        self.total = 0
        self.failures: list = []

    def check(self, label: str, fn) -> None:
        """Run one instance; ``fn`` returns truthy on success or raises."""
        self.total += 1
        try:
            ok = fn()
            reason = None if ok else {"reason": "property does not hold"}
        except JetKernelError as e:
            ok, reason = False, {"reason": e.code, "message": str(e)}
            if "identity" in e.details:
                reason["identity"] = e.details["identity"]
        if ok:
            self.passed += 1
        elif len(self.failures) < MAX_LISTED_FAILURES:
            self.failures.append({"instance": label, **reason})

    def report(self) -> dict:
        return {"passed": self.passed, "total": self.total, "failures": self.failures}


def _raises(exc_type, fn, **expect) -> bool:
    try:
        fn()
    except exc_type as e:
        return all(e.details.get(k) == v for k, v in expect.items())
    return False


# -- 1. Hadamard -----------------------------------------------------------

def suite_hadamard(rng, s: _Suite, count: int = 500) -> None:
    for i in range(count):
        nx, ny = rng.randint(0, 3), rng.randint(1, 3)
        xs, ys = cartesian_block("x", nx), cartesian_block("y", ny)
        f = rand_poly(rng, xs + ys, 6, nterms=rng.randint(1, 10))

        def run(f=f, xs=xs, ys=ys):
            for l in range(5):
                exp = hadamard_expand(f, xs, ys, l)
                if exp.reconstruct() != f:
                    return False
                for tau in exp.remainders:
                    if sum(tau) != l + 1:
                        return False
            # Taylor part against differentiation at one order
            exp = hadamard_expand(f, xs, ys, 2)
            return all(exp.taylor(sig) == taylor_coefficient_via_derivative(f, xs, ys, sig)
                       for sig in exp.taylor_terms)

        s.check(f"poly {i}", run)


# -- 2. Weil algebras --------------------------------------------------------

def suite_weil(rng, s: _Suite) -> None:
    for d in range(6):
        for k in range(6):
            s.check(f"dim disk({d},{k})",
                    lambda d=d, k=k: disk(d, k).dim == expected_disk_dim(d, k) == comb(d + k, d))
    pool = algebra_pool()
    for i in range(500):
        A = rng.choice(pool)
        a = rand_poly(rng, A.vars, 4)
        b = rand_poly(rng, A.vars, 4)
        s.check(f"homomorphism {i}", lambda A=A, a=a, b=b: (
            normal_form(a * b, A).value == normal_form(
                normal_form(a, A).value * normal_form(b, A).value, A).value
            and normal_form(a + b, A).value
            == normal_form(a, A).value + normal_form(b, A).value))
    for i in range(200):
        A = rng.choice(pool)
        params = cartesian_block("u", rng.randint(0, 1))
        names = params + A.vars
        p = Polynomial.zero(names)
        for h in A.generators:
            p = p + h * rand_poly(rng, names, 2)

        def roundtrip(A=A, p=p):
            mu = ideal_decompose(p, A)
            return sum((h * m for h, m in zip(A.generators, mu)), Polynomial.zero()) == p

        s.check(f"decompose {i}", roundtrip)
    small = [disk(0, 0), disk(1, 1), disk(1, 2), disk(2, 1),
             make_weil(1, ["x^3"], vars=("x",)), make_weil(2, ["x^2", "x*y", "y^2"], vars=("x", "y"))]
    for i in range(50):
        A, B = rng.choice(small), rng.choice(small)
        s.check(f"tensor {i}", lambda A=A, B=B: (
            weil_tensor(A, B).dim == A.dim * B.dim and weil_tensor(A, B).k == A.k + B.k))


# -- 3-5. Witness spans ------------------------------------------------------

def _rectified_instance(rng, src: FormalSpace, K: int, deg: int, p: int, p_prime: int,
                        param_r: bool = True):
    """Rectified pairs with ``f' = f(t, 0) + sum h_i r_i + sum x'_j s_j``."""
    A = src.thickening
    m = src.dim
    V = FormalSpace.cartesian(cartesian_block("v", m + p))
    Vp = FormalSpace.cartesian(cartesian_block("w", m + p_prime))
    iota, iota_p = rectified_inclusion(src, V), rectified_inclusion(src, Vp)
    tgt = FormalSpace.cartesian(cartesian_block("y", K))
    f_comps, fp_comps = [], []
    head = {c: Vp.coordinate(w) for c, w in zip(src.coords, Vp.coords)}
    for _ in range(K):
        fk = rand_poly(rng, V.coords, deg)
        f_comps.append(fk)
        slice_k = fk.substitute({v: (V.coordinate(v) if i < m else 0)
                                 for i, v in enumerate(V.coords)}, vars=V.coords)
        val = slice_k.rename(dict(zip(V.coords[:m], Vp.coords[:m]))).with_vars(Vp.coords)
        for h in A.generators:
            r = rand_poly(rng, Vp.coords if param_r else Vp.coords[:m], 2)
            val = val + h.substitute(head, partial=True, vars=Vp.coords) * r
        for w in Vp.coords[m:]:
            val = val + Vp.coordinate(w) * rand_poly(rng, Vp.coords, 2)
        fp_comps.append(val)
    f = FormalMorphism(V, tgt, tuple(f_comps))
    f_p = FormalMorphism(Vp, tgt, tuple(fp_comps))
    return iota, iota_p, f, f_p


def suite_witness_d1(rng, s: _Suite, count: int = 100) -> None:
    A = disk(1, 1)
    src = FormalSpace((), A)
    t = src.coordinate("e1")

    def paper_instance():
        V = FormalSpace.cartesian(("t", "x"))
        iota = FormalMorphism(src, V, ("e1", "0"))
        R = FormalSpace.cartesian(("y1",))
        f = FormalMorphism(V, R, ("t + x",))
        fp = FormalMorphism(V, R, ("t + x + t^2",))
        sp = witness_d1(iota, iota, f, fp)
        return sp.delta[0] == Polynomial.parse("e1^2") and sp.mu[0][0] == 1

    s.check("delta = t^2 instance", paper_instance)
    for i in range(count - 1):
        p = rng.randint(0, 2)
        V = FormalSpace.cartesian(cartesian_block("x", 1 + p))
        comps = []
        while True:
            lin = [rand_coeff(rng) if rng.random() < 0.7 else 0 for _ in range(V.dim)]
            if any(lin):
                break
        for c in lin:
            comps.append(t * c + rng.randint(-2, 2))
        iota = FormalMorphism(src, V, tuple(comps))
        tgt = FormalSpace.cartesian(cartesian_block("y", 4))
        f = FormalMorphism(V, tgt, tuple(rand_poly(rng, V.coords, 5) for _ in range(4)))
        # the coordinate that restricts to eps after straightening
        D, _ = rectify_affine(iota)
        ell = D.components[0]
        if rng.random() < 0.5:
            iota_p = iota
            fp = FormalMorphism(V, tgt, tuple(fk + ell ** 2 * rand_poly(rng, V.coords, 2)
                                              for fk in f.components))
        else:
            pair = equal_composite_partner(rng, FactorizationPair(iota, f),
                                           extra=rng.randint(0, 1), deg=1)
            iota_p, fp = pair.iota, pair.f
        s.check(f"instance {i}", lambda a=(iota, iota_p, f, fp): bool(witness_d1(*a).verification))


def suite_witness_point(rng, s: _Suite, count: int = 100, negatives: int = 20) -> None:
    algebras = [disk(1, 2), disk(2, 2),
                make_weil(2, ["x^2", "x*y", "y^3"], vars=("x", "y"), name="Q[x,y]/(x^2,xy,y^3)")]
    for i in range(count):
        A = algebras[i % 3]
        src = FormalSpace((), A)
        args = _rectified_instance(rng, src, rng.randint(1, 3), 3, rng.randint(0, 2), rng.randint(0, 2))
        s.check(f"instance {i} over {A.name}", lambda a=args: bool(witness_point(*a).verification))
    for i in range(negatives):
        A = algebras[i % 3]
        src = FormalSpace((), A)
        iota, iota_p, f, fp = _rectified_instance(rng, src, 2, 3, 1, 1)
        e = rng.choice(A.vars)
        bump = fp.source.coordinate(fp.source.coords[A.vars.index(e)]) * rand_coeff(rng)
        bad = FormalMorphism(fp.source, fp.target, (fp.components[0] + bump,) + fp.components[1:])
        s.check(f"negative {i} over {A.name}", lambda a=(iota, iota_p, f, bad): _raises(
            NotInIdealError, lambda: witness_point(*a)))


def suite_witness_general(rng, s: _Suite, count: int = 50) -> None:
    algebras = [disk(1, 1), disk(1, 2), disk(2, 2),
                make_weil(2, ["x^2", "x*y", "y^3"], vars=("x", "y"), name="Q[x,y]/(x^2,xy,y^3)")]
    for i in range(count):
        q = 1 + i % 2
        A = rng.choice(algebras)
        src = FormalSpace(cartesian_block("u", q), A)
        args = _rectified_instance(rng, src, rng.randint(1, 3), 3, rng.randint(0, 1), rng.randint(0, 1))

        s.check(f"instance {i} U=R^{q} {A.name}",
                lambda a=args: bool(witness_general(*a).verification))
    src = FormalSpace((), disk(1, 1))
    for i in range(10):
        args = _rectified_instance(rng, src, 2, 4, rng.randint(0, 2), rng.randint(0, 2))

        def agree(a=args):
            x, y = witness_point(*a), witness_d1(*a)
            return (x.phi.components == y.phi.components and x.alpha == y.alpha
                    and x.alpha_prime == y.alpha_prime)

        s.check(f"point/d1 agreement {i}", agree)


# -- 6-7. Equivalence and lifting --------------------------------------------

def suite_decide(rng, s: _Suite, count: int = 100) -> None:
    for i in range(count):
        src = rand_source(rng)
        p = rand_pair(rng, src, 4, rng.randint(1, 3))
        q = equal_composite_partner(rng, p)
        s.check(f"equal {i}", lambda p=p, q=q: decide_equivalence(p, q).equivalent)
    for i in range(count):
        src = rand_source(rng)
        p = rand_pair(rng, src, 4, rng.randint(1, 3))
        q, k = perturb(rng, p)

        def negative(p=p, q=q, k=k):
            r = decide_equivalence(p, q)
            return not r.equivalent and r.first_differing_component == k

        s.check(f"perturbed {i}", negative)


def suite_lift(rng, s: _Suite, count: int = 200, K: int = 8) -> None:
    for i in range(count):
        plot = rand_plot(rng, rand_source(rng), K)
        s.check(f"plot {i}", lambda plot=plot: composite(lift_plot(plot)).components
                == plot.components)


# -- 8. Jets -----------------------------------------------------------------

def suite_jets(rng, s: _Suite) -> None:
    for i in range(100):
        n, m, k = rng.randint(1, 2), rng.randint(1, 2), rng.randint(0, 4)
        xs = cartesian_block("x", n)
        sec = [rand_poly(rng, xs, 5) for _ in range(m)]
        base = [rng.randint(-2, 2) for _ in range(n)]
        s.check(f"coherence {i}", lambda sec=sec, k=k, base=base, xs=xs:
                project(prolong(sec, k + 1, base, xs)) == prolong(sec, k, base, xs))
    for i in range(200):
        n, m, k = rng.randint(1, 2), rng.randint(1, 2), rng.randint(0, 3)
        A = disk(n, k)
        sec = [normal_form(rand_poly(rng, A.vars, k), A) for _ in range(m)]

        def roundtrip(sec=sec, A=A):
            jet = disk_section_to_jet(sec, A)
            back = jet_to_disk_section(jet, A)
            return back == sec and disk_section_to_jet(back, A) == jet

        s.check(f"disk roundtrip {i}", roundtrip)
    for i in range(100):
        src = rand_source(rng)
        K = rng.randint(1, 6)
        plot = rand_plot(rng, src, K)

        def bijection(plot=plot):
            fam = plot_to_cone(plot)
            return cone_to_plot(fam) == plot and plot_to_cone(cone_to_plot(fam)) == fam

        s.check(f"cone {i}", bijection)
    for i in range(20):
        src = rand_source(rng)
        K = rng.randint(2, 6)
        fam = plot_to_cone(rand_plot(rng, src, K))
        level = rng.randint(2, K)
        j = rng.randrange(level - 1)
        lv = fam.levels[level]
        broken = list(lv.components)
        broken[j] = broken[j] + 1
        levels = list(fam.levels)
        levels[level] = FormalMorphism(src, lv.target, tuple(broken))
        bad = TruncatedProPlot(src, tuple(levels))
        s.check(f"broken cone {i} at level {level}", lambda bad=bad, level=level: _raises(
            IncompatibleConeError, lambda: cone_to_plot(bad), level=level))
    for i in range(50):
        src = rand_source(rng, max_params=1)
        K = 3
        sp = JetSpace(1, 1, K)
        plot = FormalMorphism(src, sp.space(), tuple(rand_poly(rng, src.coords, 3)
                                                     for _ in range(sp.dim)))
        fam = plot_to_cone(plot, [JetSpace(1, 1, k).dim for k in range(K + 1)])
        s.check(f"jet lift {i}", lambda fam=fam: len(lift_jet_plot(fam).verification) == K + 1)


SUITES = (
    ("hadamard", suite_hadamard),
    ("weil", suite_weil),
    ("witness_d1", suite_witness_d1),
    ("witness_point", suite_witness_point),
    ("witness_general", suite_witness_general),
    ("equivalence", suite_decide),
    ("lift_plot", suite_lift),
    ("jets", suite_jets),
)


def run_selftest(seed: int = 0, fault: str | None = None, only=None) -> dict:
    suites = {}
    with inject_fault(fault):
        for name, fn in SUITES:
            if only and name not in only:
                continue
            s = _Suite(name)
            fn(rng_for(seed, name), s)
            suites[name] = s.report()
    ok = all(r["passed"] == r["total"] for r in suites.values())
    return {"prng": PRNG_NAME, "seed": seed, "suites": suites, "ok": ok}
