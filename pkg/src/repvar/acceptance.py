"""The acceptance criteria as runnable checks.

Each ``criterion_N`` returns a :class:`CriterionResult`; failures are
recorded, never raised.  Thresholds come from the stated criteria, except
that the fiber checks scale with ``config.fiber_tol`` so that a deliberately
wrong tolerance produces targeted failures.
"""

from __future__ import annotations

import cmath
import math
import random
import time
import traceback
from dataclasses import dataclass, field

from .config import DEFAULT_CONFIG, Config
from .core.linalg import Mat2, mat_commutator, parallel
from .core.representation import Representation, character_of, evaluate_word
from .core.sampling import random_sl2, random_triangular_pair
from .core.scalars import QQi, random_qqi
from .core.words import FreeWord, commutator, handle_commutator
from . import deform, fibers, irreducibility, sgood, surface_builder, trace_lab


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    runtime: float = 0.0
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.failures[0]})" if self.failures else ""
        return f"[{status}] criterion {self.number:2d}: {self.title} [{self.runtime:.2f}s]{extra}"

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "runtime": round(self.runtime, 3), "details": self.details, "failures": self.failures}


def _timed(number: int, title: str):
    def wrap(fn):
        def run(seed: int = 0, config: Config = DEFAULT_CONFIG) -> CriterionResult:
            res = CriterionResult(number, title, False)
            start = time.perf_counter()
            try:
                fn(res, seed, config)
            except Exception as exc:  # recorded, not raised
                res.failures.append(f"{type(exc).__name__}: {exc}")
                res.details["traceback"] = traceback.format_exc(limit=3)
            res.runtime = time.perf_counter() - start
            budget = res.details.get("runtime_budget")
            if budget is not None and res.runtime > budget:
                res.failures.append(f"runtime {res.runtime:.2f}s exceeds {budget}s")
            res.passed = not res.failures
            return res
        run.__name__ = fn.__name__
        run.__doc__ = title
        return run
    return wrap


def _small_qqi(rng, scale: int = 100, nonzero: bool = True):
    return random_qqi(rng, nonzero=nonzero) / scale


# ---------------------------------------------------------------------------


@_timed(1, "commutator trace identities (diagonal and parabolic forms)")
def criterion_1(res, seed, config):
    res.details["runtime_budget"] = 5.0
    checks = trace_lab.identity_checks(seed, n_exact=500, n_float=500)
    res.details["checks"] = [{"name": c.name, "passed": c.passed, "cases": c.cases,
                              "max_residual": c.max_residual} for c in checks]
    for c in checks:
        if not c.passed:
            res.failures.append(f"{c.name} failed (max residual {c.max_residual:.3e})")


@_timed(2, "reducibility iff tr[A,B] = 2")
def criterion_2(res, seed, config):
    rng = random.Random(seed)
    bad = 0
    for _ in range(200):
        A, B, G = random_triangular_pair(rng, True)
        rep = trace_lab.reducibility_report(A, B)
        v = rep.invariant_line
        ok = rep.reducible and rep.trace_of_commutator == 2 and v is not None
        ok = ok and parallel(A.apply(v), v, 0.0) and parallel(B.apply(v), v, 0.0)
        bad += not ok
    res.details["triangular_misclassified"] = bad
    bad2, n = 0, 0
    while n < 200:
        A, B = random_sl2(rng), random_sl2(rng)
        if mat_commutator(A, B).trace() == 2:
            continue
        n += 1
        bad2 += trace_lab.reducibility_report(A, B).reducible
    res.details["generic_misclassified"] = bad2
    if bad or bad2:
        res.failures.append(f"{bad} triangular and {bad2} generic pairs misclassified")


@_timed(3, "theta round trip")
def criterion_3(res, seed, config):
    rng = random.Random(seed)
    for exact_backend in (True, False):
        worst, wrong = 0.0, 0
        n = 0
        while n < 100:
            A, B = random_sl2(rng, exact_backend), random_sl2(rng, exact_backend)
            t = mat_commutator(A, B).trace()
            if abs(complex(t) - 2) < 1e-6:
                continue
            n += 1
            M = random_sl2(rng, exact_backend)
            back = trace_lab.theta_inverse(A, B, trace_lab.theta_map(A, B, M))
            if exact_backend:
                wrong += back != M
            else:
                worst = max(worst, back.max_dist(M))
        key = "exact" if exact_backend else "float"
        res.details[key] = {"cases": n, "mismatches": wrong, "max_residual": worst}
        if wrong or worst > 1e-9:
            res.failures.append(f"{key}: {wrong} mismatches, max residual {worst:.3e}")


@_timed(4, "S-good two-sheeted character cover")
def criterion_4(res, seed, config):
    rng = random.Random(seed)
    bad_sheets, bad_unique = 0, 0
    for k in range(100):
        co = sgood.random_sgood(rng, tail=k % 3)
        words = sgood.lift_words(co.rank)
        x = character_of(co.representation(), words)
        hits = 0
        for sheet in (1, 2):
            lifted = sgood.lift_character(x, sheet)
            if character_of(lifted.representation(), words).values != x.values:
                bad_sheets += 1
            hits += lifted == co
        bad_unique += hits != 1
    mism = 0
    for _ in range(500):
        co = sgood.random_sgood(rng)
        A, B = co.matrices()
        mism += sgood.character_cover_f(co.a, co.b, co.c) != (A.trace(), B.trace(), (A * B).trace())
    res.details.update(sheet_failures=bad_sheets, non_unique=bad_unique, cover_mismatches=mism)
    if bad_sheets or bad_unique or mism:
        res.failures.append(f"sheets {bad_sheets}, uniqueness {bad_unique}, cover {mism}")


@_timed(5, "Jacobian certificates of the relator map")
def criterion_5(res, seed, config):
    rng = random.Random(seed)
    bad = 0
    for _ in range(500):
        a, c = random_qqi(rng), random_qqi(rng)
        b = random_qqi(rng, nonzero=True)
        if b * b == 1:
            continue
        v = sgood.patch_formula_values(a, b, c)
        bad += v["first_expanded"] != v["first_from_r1"] or v["second_expanded"] != v["second_from_r2"]
    worst = 0.0
    for _ in range(100):
        a, c = complex(rng.gauss(0, 1), rng.gauss(0, 1)), complex(rng.gauss(0, 1), rng.gauss(0, 1))
        b = complex(rng.uniform(0.3, 2), rng.uniform(-1, 1))
        if abs(b * b - 1) < 0.1:
            continue
        fd = sgood.finite_difference_jacobians(a, b, c)
        cf = sgood.g_jacobian_certificates(a, b, c)
        for x, y in zip(fd, cf):
            worst = max(worst, abs(x - y) / max(1.0, abs(y)))
    res.details.update(exact_mismatches=bad, max_relative_fd_error=worst)
    if bad:
        res.failures.append(f"{bad} exact patch identity mismatches")
    if worst > 1e-6:
        res.failures.append(f"finite differences off by {worst:.3e}")


def _random_exact_m(rng):
    while True:
        r = random_qqi(rng, nonzero=True)
        m = r * r
        if m != 1 and m != -1:
            return m, r


@_timed(6, "commutator fibers and sign-flip paths")
def criterion_6(res, seed, config):
    rng = random.Random(seed)
    counts = {"base": 0, "c": 0, "a": 0}
    bad = 0
    for _ in range(200):
        m, r = _random_exact_m(rng)
        M = fibers.diag_target(m)
        pts = [("base", fibers.fiber_base_point(m, r))]
        for kind, fn in (("c", fibers.fiber_family_c), ("a", fibers.fiber_family_a)):
            pts.append((kind, fn(m, *fibers.random_family_params(rng, kind, m, r))))
        for kind, fp in pts:
            counts[kind] += 1
            if fp.residual != 0 or mat_commutator(fp.A, fp.B) != M or fp.B.trace() != (M * fp.B).trace():
                bad += 1
    res.details["exact_points"] = counts
    res.details["exact_failures"] = bad
    if bad:
        res.failures.append(f"{bad} exact fiber points off the fiber or violating tr B = tr MB")
    worst = 0.0
    for _ in range(5):
        m, r = _random_exact_m(rng)
        mf, rf = complex(m), complex(r)
        base = fibers.fiber_base_point(mf, rf)
        for eA, eB in ((1, -1), (-1, 1), (-1, -1)):
            path = fibers.sign_flip_path(mf, rf, eA, eB, 64)
            worst = max(worst, path.info["residual"])
            A1, B1 = path.samples[-1][1]
            A0, B0 = path.samples[0][1]
            if len(path) != 64 or (A0, B0) != (base.A, base.B) or A1 != (base.A if eA > 0 else -base.A) \
                    or B1 != (base.B if eB > 0 else -base.B):
                res.failures.append(f"sign-flip path {eA:+d},{eB:+d} endpoints do not match exactly")
    res.details["sign_flip_max_residual"] = worst
    if worst > config.fiber_tol:
        res.failures.append(f"sign-flip residual {worst:.3e} exceeds {config.fiber_tol:.1e}")


@_timed(7, "path lifting with fixed endpoints")
def criterion_7(res, seed, config):
    res.details["runtime_budget"] = 30.0
    tol = 10 * config.fiber_tol
    rng = random.Random(seed)

    def rsl2():
        a, b, c = (complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(3))
        return Mat2(a, b, c, (1 + b * c) / a)

    worst, lifts = 0.0, 0
    for k in range(20):
        G = rsl2()
        Gi = G.inv()
        m0 = complex(rng.uniform(1.5, 3), rng.uniform(-1, 1))
        m1 = complex(rng.uniform(1.5, 3), rng.uniform(-1, 1))
        Mp = fibers.sample_target_path(lambda t: Mat2(*(G * Mat2.diag(m0 + (m1 - m0) * t) * Gi).entries), 256)
        start = fibers.random_fiber_point(rng, Mp.values[0])
        end = fibers.random_fiber_point(rng, Mp.values[-1])
        try:
            lift = fibers.lift_path_fixed_endpoints(Mp, start, end, tol=config.fiber_tol)
        except fibers.PathLiftError as exc:
            res.failures.append(f"path {k}: {exc} at t = {exc.t}")
            continue
        lifts += 1
        worst = max(worst, lift.info["max_residual"])
        if len(lift) != 257:
            res.failures.append(f"path {k}: {len(lift) - 1} steps instead of 256")
        if lift.samples[0][1] != (start.A, start.B) or lift.samples[-1][1] != (end.A, end.B):
            res.failures.append(f"path {k}: endpoints differ")
    res.details.update(lifted=lifts, max_residual=worst, tolerance=tol)
    if worst > tol:
        res.failures.append(f"in-fiber residual {worst:.3e} exceeds {tol:.1e}")


@_timed(8, "deformation constructors and the parabolic product solve")
def criterion_8(res, seed, config):
    rng = random.Random(seed)
    one = QQi(1)
    bad = {"diagonal": 0, "near_identity": 0, "central": 0, "parabolic": 0}
    n = 0
    while n < 200:
        p, q = random_qqi(rng, nonzero=True), random_qqi(rng, nonzero=True)
        if p * p == 1 or q * q == 1:
            continue
        u, v = _small_qqi(rng), _small_qqi(rng)
        try:
            A, B, K = deform.abelian_diagonal_commutator(p, q, u, v)
        except ValueError:
            continue
        n += 1
        bad["diagonal"] += K != Mat2(one, u, v, 1 + u * v) or not (A.det() == 1 and B.det() == 1)
        r = _small_qqi(rng)
        x, y, z = r * r, _small_qqi(rng), _small_qqi(rng)
        C, D, CD = deform.near_identity_product(x, y, z, sqrt_x=r)
        bad["near_identity"] += CD != Mat2(1 + x, y, z, (1 + y * z) / (1 + x)) or C.det() != 1 or D.det() != 1
    n = 0
    while n < 200:
        a = _small_qqi(rng)
        u = a * _small_qqi(rng, 10)
        v = a * _small_qqi(rng, 10)
        try:
            A, B, K = deform.central_case_commutator(a, u, v, rng.choice((1, -1)), rng.choice((1, -1)))
        except ValueError:
            continue
        n += 1
        bad["central"] += K != Mat2(one, u, v, 1 + u * v)
    n = 0
    while n < 200:
        p, q = random_qqi(rng, nonzero=True), random_qqi(rng)
        u, root = _small_qqi(rng), 1 + _small_qqi(rng)
        v = p * (root * root - 1 - u)
        try:
            target = deform.parabolic_commutator_M(p, u, v)
        except ValueError:
            continue
        n += 1
        sign = rng.choice((1, -1))
        Ap = deform.parabolic_a_prime(p, q, u, v, sign, root)
        Bp = Mat2(one, p, QQi(0), one)
        Bp = Bp if sign == 1 else -Bp
        bad["parabolic"] += mat_commutator(Ap, Bp) != target
    res.details["exact_failures"] = bad
    for k, v in bad.items():
        if v:
            res.failures.append(f"{k}: {v} of 200 exact samples miss the target")
    worst_K, worst_res = 0.0, 0.0
    mags = [10 ** (-8 + 6 * k / 9) for k in range(10)]
    for ma in mags:
        for mc in mags:
            a = ma * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            c = mc * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            b = max(ma, mc) * rng.uniform(0, 1) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            p = cmath.rect(rng.uniform(0.5, 2), rng.uniform(-1, 1))
            q = cmath.rect(rng.uniform(0.5, 2), rng.uniform(-1, 1))
            w, C, D, K = deform.parabolic_product_solve(a, b, c, p, q)
            target = Mat2(1 + a, b, c, (1 + b * c) / (1 + a), check=False)
            worst_res = max(worst_res, (C * D).max_dist(target))
            worst_K = max(worst_K, K)
    res.details.update(sweep_points=len(mags) ** 2, max_K=worst_K, max_product_residual=worst_res)
    if worst_K > 10:
        res.failures.append(f"|w|/(sqrt|c| + |a|) reached {worst_K:.3f}")
    if worst_res > 1e-10:
        res.failures.append(f"product residual {worst_res:.3e}")


@_timed(9, "genus-4 build and certify pipeline")
def criterion_9(res, seed, config):
    res.details["runtime_budget"] = 60.0
    catalog = surface_builder.scc_default_catalog(4, 2)
    res.details["catalog_size"] = len(catalog)
    if len(catalog) < 50:
        res.failures.append(f"catalog has only {len(catalog)} words")
    passed = 0
    for s in range(seed, seed + 50):
        rho = surface_builder.build_representation(4, s)
        cert = surface_builder.certify(rho, catalog, 500, 8, s)
        strict = (cert.passed and cert.relator_residual == 0 and cert.witness_residual == 0
                  and cert.c_image_trace == 2 and not cert.c_image_is_identity and len(cert.real_trace_samples) == 500)
        if strict:
            passed += 1
        else:
            res.failures.append(f"seed {s}: {cert.failures[:2]}")
    res.details["passing_seeds"] = passed


@_timed(10, "dimension table")
def criterion_10(res, seed, config):
    rows = []
    for g in range(2, 7):
        expected = {"whole": 6 * g - 6, "Z_locus": 6 * g - 7}
        if g >= 3:
            expected["kill_nonseparating"] = 6 * g - 9
            for g1 in range(1, g):
                expected[f"kill_separating:{g1}"] = 6 * g - 8 if min(g1, g - g1) == 1 else 6 * g - 9
        for key, want in expected.items():
            query, _, g1 = key.partition(":")
            g1 = int(g1) if g1 else None
            got = surface_builder.dimension_calculator(g, query, g1)
            other = surface_builder.dimension_by_product_formula(g, query, g1)
            rows.append([g, key, got, other, want])
            if not got == other == want:
                res.failures.append(f"genus {g} {key}: {got}, {other}, expected {want}")
    res.details["rows"] = rows


def _conjugated(mats, G):
    Gi = G.inv()
    return [G * M * Gi for M in mats]


def _three_class_set(rng):
    """Generators whose fixed-point pairs are {0, inf}, {inf, 1}, {1, 0}."""
    while True:
        lam, mu, nu = (random_qqi(rng, nonzero=True) for _ in range(3))
        if any(x * x == 1 for x in (lam, mu, nu)):
            continue
        A = Mat2.diag(lam)
        B = Mat2(mu, (1 - mu * mu) / mu, QQi(0), 1 / mu)
        C = Mat2(nu, QQi(0), nu - 1 / nu, 1 / nu)
        gens = [A, B, C]
        extra = rng.randrange(3)
        for _ in range(extra):
            gens.append(rng.choice(gens[:3]) ** 2)
        gens.append(Mat2.identity() if rng.random() < 0.3 else -Mat2.identity())
        rng.shuffle(gens)
        return _conjugated(gens, random_sl2(rng))


@_timed(11, "irreducibility detector")
def criterion_11(res, seed, config):
    rng = random.Random(seed)
    verified, kinds = 0, {"direct": 0, "aba": 0}
    for k in range(200):
        if k % 2:
            gens = _three_class_set(rng)
        else:
            gens = [random_sl2(rng) for _ in range(rng.randint(2, 5))]
        try:
            w = irreducibility.find_irreducible_pair(gens)
        except irreducibility.ReducibleError as exc:
            res.failures.append(f"set {k} wrongly rejected: {exc}")
            continue
        rho = Representation.free(gens)
        t = evaluate_word(rho, commutator(w.c_word, w.d_word)).trace()
        if t == 2 or t != w.trace_value:
            res.failures.append(f"set {k}: witness trace {t} does not verify")
        else:
            verified += 1
            kinds[w.d_form] += 1
    rejected = 0
    for k in range(100):
        n = rng.randint(1, 5)
        mats = []
        for _ in range(n):
            a = random_qqi(rng, nonzero=True)
            mats.append(Mat2(a, random_qqi(rng), QQi(0), 1 / a))
        gens = _conjugated(mats, random_sl2(rng))
        try:
            irreducibility.find_irreducible_pair(gens)
            res.failures.append(f"common-fixed-point set {k} accepted")
        except irreducibility.ReducibleError:
            rejected += 1
    res.details.update(verified=verified, witness_kinds=kinds, rejected=rejected)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def run_all(seed: int = 0, config: Config = DEFAULT_CONFIG, only=None) -> list[CriterionResult]:
    out = []
    for k, fn in enumerate(CRITERIA, start=1):
        if only is None or k in only:
            out.append(fn(seed, config))
    return out
