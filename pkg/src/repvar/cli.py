"""Command-line interface: ``repvar <command> ...``.

Exit codes: 0 success or PASS, 1 FAIL verdict, 2 usage or input error,
3 numeric failure.  All input and output is UTF-8 JSON checked against the
bundled schema.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from functools import lru_cache
from importlib import resources

import jsonschema

from . import acceptance, deform, fibers, irreducibility, sgood, surface_builder, trace_lab
from .config import Config, load_config
from .core.encoding import (mat_from_json, mat_to_json, rep_from_json, rep_to_json, scalar_from_json,
                            scalar_to_json, word_from_json, word_to_json)
from .core.linalg import Mat2
from .core.representation import Character, character_of
from .core.scalars import is_exact, parse_scalar, sqrt

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# schema and I/O


@lru_cache(maxsize=None)
def load_schema() -> dict:
    return json.loads(resources.files("repvar").joinpath("schema.json").read_text(encoding="utf-8"))


def validate(obj, name: str):
    schema = load_schema()
    jsonschema.validate(obj, {"$ref": f"#/$defs/{name}", "$defs": schema["$defs"]})


def _read_json(path: str | None, name: str):
    try:
        if path in (None, "-"):
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        obj = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {name} JSON: {exc}") from None
    try:
        validate(obj, name)
    except jsonschema.ValidationError as exc:
        raise UsageError(f"invalid {name} JSON: {exc.message}") from None
    return obj


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def _write(obj, path: str | None, name: str | None = None):
    if name:
        validate(obj, name)
    text = _dumps(obj) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# encoders


def fiber_point_to_json(fp: fibers.FiberPoint) -> dict:
    return {"A": mat_to_json(fp.A), "B": mat_to_json(fp.B), "target": mat_to_json(fp.target),
            "residual": float(fp.residual)}


def fiber_point_from_json(obj, target: Mat2 | None = None) -> fibers.FiberPoint:
    A, B = mat_from_json(obj["A"]), mat_from_json(obj["B"])
    if target is None:
        target = mat_from_json(obj["target"]) if "target" in obj else None
    if target is None:
        from .core.linalg import mat_commutator
        target = mat_commutator(A, B)
    return fibers.FiberPoint.make(A, B, target)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (bool, int, float, str)) or v is None:
        return v
    if is_exact(v):
        return scalar_to_json(v)
    return str(v)


def path_to_json(path: fibers.MatrixPath) -> dict:
    samples = []
    for t, v in path.samples:
        mats = list(v) if isinstance(v, tuple) else [v]
        samples.append({"t": float(t), "matrices": [mat_to_json(m) for m in mats]})
    return {"samples": samples, "step_bound": float(path.step_bound), "info": _jsonable(path.info)}


def path_from_json(obj) -> fibers.MatrixPath:
    samples = []
    for s in obj["samples"]:
        mats = [mat_from_json(m, check=False) for m in s["matrices"]]
        samples.append((float(s["t"]), mats[0] if len(mats) == 1 else tuple(mats)))
    return fibers.MatrixPath.from_samples(samples)


def certificate_to_json(cert: surface_builder.Certificate) -> dict:
    names = cert.rep.presentation.names

    def word(w):
        return word_to_json(w)

    w = None
    if cert.w is not None:
        w = {k: {"value": scalar_to_json(c.value), "satisfied": c.satisfied, "exactness": c.exactness}
             for k, c in cert.w.items()}
    return {
        "verdict": "PASS" if cert.passed else "FAIL",
        "representation": rep_to_json(cert.rep),
        "seed": cert.seed,
        "exact": cert.exact,
        "w": w,
        "relator_residual": None if cert.relator_residual != cert.relator_residual else cert.relator_residual,
        "kernel_witness_word": word(cert.kernel_witness_word),
        "kernel_witness_text": cert.kernel_witness_word.to_string(names),
        "witness_residual": None if cert.witness_residual != cert.witness_residual else cert.witness_residual,
        "c_image": {"trace": None if cert.c_image_trace is None else scalar_to_json(cert.c_image_trace),
                    "is_identity": cert.c_image_is_identity},
        "handle_one": {"reducible": cert.handle_one_reducible, "nonabelian": cert.handle_one_nonabelian},
        "scc_checks": [{"word": word(wd), "text": wd.to_string(names), "trace": scalar_to_json(t), "killed": k}
                       for wd, t, k in cert.scc_checks],
        "real_trace_samples": [{"word": word(wd), "trace": scalar_to_json(t), "real": r, "allowed": a}
                               for wd, t, r, a in cert.real_trace_samples],
        "sampling": {"catalog_size": cert.catalog_size, "samples": len(cert.real_trace_samples),
                     "max_word_len": cert.max_word_len},
        "failures": list(cert.failures),
    }


# ---------------------------------------------------------------------------
# commands


def cmd_verify_identities(args, config: Config):
    checks = trace_lab.identity_checks(args.seed if args.seed is not None else config.seed,
                                       args.n_exact, args.n_float)
    report = {"passed": all(c.passed for c in checks),
              "checks": [{"name": c.name, "passed": c.passed, "cases": c.cases, "max_residual": c.max_residual}
                         for c in checks]}
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.cases} cases, max residual {c.max_residual:.3e}",
              file=sys.stderr)
    _write(report, args.output, "identity_report")
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_detect_irreducible(args, config: Config):
    rho = rep_from_json(_read_json(args.input, "representation"))
    names = rho.presentation.names
    try:
        w = irreducibility.find_irreducible_pair(rho.images, config.cluster_tol)
    except irreducibility.ReducibleError as exc:
        _write({"irreducible": False, "reason": str(exc)}, args.output, "irreducibility_result")
        return EXIT_FAIL
    _write({"irreducible": True, "c_word": word_to_json(w.c_word), "d_word": word_to_json(w.d_word),
            "c_text": w.c_word.to_string(names), "d_text": w.d_word.to_string(names),
            "trace": scalar_to_json(w.trace_value), "d_form": w.d_form}, args.output, "irreducibility_result")
    return EXIT_OK


def _coords_to_json(co: sgood.SGoodCoords, sheet: int) -> dict:
    return {"a": scalar_to_json(co.a), "b": scalar_to_json(co.b), "c": scalar_to_json(co.c),
            "tail": [mat_to_json(m) for m in co.tail], "representation": rep_to_json(co.representation()),
            "sheet": sheet}


def cmd_lift_character(args, config: Config):
    obj = _read_json(args.input, "representation" if args.from_rep else "character")
    if args.from_rep:
        rho = rep_from_json(obj)
        x = character_of(rho, sgood.lift_words(rho.presentation.num_generators))
    else:
        x = Character(tuple(word_from_json(w) for w in obj["words"]),
                      tuple(scalar_from_json(v) for v in obj["values"]))
    co = sgood.lift_character(x, args.sheet, config.relator_tol)
    _write(_coords_to_json(co, args.sheet), args.output, "sgood_coords")
    return EXIT_OK


def cmd_solve_fiber(args, config: Config):
    m = parse_scalar(args.m)
    if config.backend == "float":
        m = complex(m)
    if args.sqrt_m is not None:
        r = parse_scalar(args.sqrt_m)
        if not is_exact(m):
            r = complex(r)
    else:
        try:
            r = sqrt(m)
        except ValueError:  # not a square in Q(i)
            m = complex(m)
            r = sqrt(m)
    if args.family == "base":
        fp = fibers.fiber_base_point(m, r)
    else:
        import random

        if args.params:
            params = [parse_scalar(p) for p in args.params.split(",")]
            if len(params) != 5:
                raise UsageError("--params takes five comma-separated scalars a,b,c,s,t")
            if not is_exact(m) or not all(is_exact(p) for p in params):
                m, params = complex(m), [complex(p) for p in params]
        else:
            if not is_exact(m):
                raise UsageError("random family parameters need an exact m with an exact square root")
            params = fibers.random_family_params(random.Random(args.seed if args.seed is not None else config.seed),
                                                 args.family, m, r)
        fn = fibers.fiber_family_c if args.family == "c" else fibers.fiber_family_a
        fp = fn(m, *params, tol=config.fiber_tol)
    _write(fiber_point_to_json(fp), args.output, "fiber_point")
    return EXIT_OK


def _resample(path: fibers.MatrixPath, steps: int) -> fibers.MatrixPath:
    """Piecewise-linear resampling of a target path, renormalised to det 1."""
    import cmath

    ts, vals = path.ts, [v.to_float() for v in path.values]
    out = []
    j = 0
    for k in range(steps + 1):
        t = 1.0 if k == steps else k / steps
        while j < len(ts) - 2 and ts[j + 1] < t:
            j += 1
        t0, t1 = ts[j], ts[j + 1]
        s = (t - t0) / (t1 - t0)
        M = vals[j] * (1 - s) + vals[j + 1] * s
        M = M * (1 / cmath.sqrt(M.det()))
        out.append((t, Mat2(*M.entries)))
    return fibers.MatrixPath.from_samples(out)


def cmd_lift_path(args, config: Config):
    path = path_from_json(_read_json(args.path, "matrix_path"))
    if any(isinstance(v, tuple) for v in path.values):
        raise UsageError("a target path has one matrix per sample")
    path = fibers.MatrixPath.from_samples([(t, Mat2(*v.to_float().entries)) for t, v in path.samples])
    if args.steps is not None and args.steps != len(path) - 1:
        path = _resample(path, args.steps)
    start = fiber_point_from_json(_read_json(args.start, "fiber_point"), path.values[0])
    end = fiber_point_from_json(_read_json(args.end, "fiber_point"), path.values[-1])
    lift = fibers.lift_path_fixed_endpoints(path, start, end, tol=config.fiber_tol)
    _write(path_to_json(lift), args.output, "matrix_path")
    return EXIT_OK


def cmd_deform(args, config: Config):
    # the subsurface images are already deformed, so the relator does not hold yet
    rho = rep_from_json(_read_json(args.rep, "representation"), validate=False)
    tobj = _read_json(args.boundary, "boundary_target")
    target = mat_from_json(tobj["matrix"] if isinstance(tobj, dict) else tobj)
    try:
        sub = [int(k) for k in args.subsurface.split(",") if k.strip()]
    except ValueError:
        raise UsageError("--subsurface takes comma-separated generator indices") from None
    out = deform.extend_boundary_deformation(rho.to_float(), sub, deform.BoundaryTarget(target.to_float()),
                                             args.max_norm, config.relator_tol)
    _write(rep_to_json(out), args.output, "representation")
    return EXIT_OK


def cmd_build_rep(args, config: Config):
    rho = surface_builder.build_representation(args.genus, args.seed if args.seed is not None else config.seed)
    if config.backend == "float":
        rho = rho.to_float()
    _write(rep_to_json(rho), args.output, "representation")
    return EXIT_OK


def cmd_certify(args, config: Config):
    rho = rep_from_json(_read_json(args.rep, "representation"), validate=False)
    catalog = None
    if rho.presentation.kind == "surface":
        catalog = surface_builder.scc_default_catalog(rho.presentation.genus, args.catalog_depth)
    cert = surface_builder.certify(rho, catalog, args.samples, args.max_len,
                                   args.seed if args.seed is not None else config.seed,
                                   catalog_depth=args.catalog_depth, tol=config.relator_tol)
    _write(certificate_to_json(cert), args.output, "certificate")
    print(f"{'PASS' if cert.passed else 'FAIL'}: {len(cert.failures)} failure(s)", file=sys.stderr)
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_dims(args, config: Config):
    value = surface_builder.dimension_calculator(args.genus, args.query, args.g1)
    _write(value, args.output)
    return EXIT_OK


def cmd_suite(args, config: Config):
    only = None
    if args.criteria:
        try:
            only = {int(k) for k in args.criteria.split(",")}
        except ValueError:
            raise UsageError("--criteria takes comma-separated numbers") from None
    start = time.perf_counter()
    results = acceptance.run_all(args.seed if args.seed is not None else config.seed, config, only)
    for r in results:
        print(r.line(), file=sys.stderr)
    report = {"passed": all(r.passed for r in results), "seed": args.seed if args.seed is not None else config.seed,
              "runtime": round(time.perf_counter() - start, 3), "config": config.to_dict(),
              "criteria": [_jsonable(r.to_dict()) for r in results]}
    _write(report, args.output, "suite_report")
    return EXIT_OK if report["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="repvar", description="Surface group representations into SL(2, C).")
    p.add_argument("--config", help="config JSON (default: $REPVAR_CONFIG)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("-o", "--output", help="output file (default: stdout)")
        sp.add_argument("--seed", type=int, default=None)
        sp.set_defaults(func=fn)
        return sp

    sp = add("verify-identities", cmd_verify_identities, "randomised trace identity checks")
    sp.add_argument("--n-exact", type=int, default=500)
    sp.add_argument("--n-float", type=int, default=500)

    sp = add("detect-irreducible", cmd_detect_irreducible, "find words C, D with tr[C, D] != 2")
    sp.add_argument("--input", "-i", help="representation JSON (default: stdin)")

    sp = add("lift-character", cmd_lift_character, "lift a character to S-good coordinates")
    sp.add_argument("--input", "-i", help="character JSON (default: stdin)")
    sp.add_argument("--sheet", type=int, choices=(1, 2), default=1)
    sp.add_argument("--from-rep", action="store_true", help="read a representation and use its character")

    sp = add("solve-fiber", cmd_solve_fiber, "a point of the commutator fiber over diag(m, 1/m)")
    sp.add_argument("--m", required=True)
    sp.add_argument("--sqrt-m", default=None)
    sp.add_argument("--family", choices=("base", "c", "a"), default="base")
    sp.add_argument("--params", default=None, help="a,b,c,s,t for the c or a family")

    sp = add("lift-path", cmd_lift_path, "lift a target path with fixed endpoints")
    sp.add_argument("--path", required=True)
    sp.add_argument("--start", required=True)
    sp.add_argument("--end", required=True)
    sp.add_argument("--steps", type=int, default=None)

    sp = add("deform", cmd_deform, "extend a boundary deformation over the complement")
    sp.add_argument("--rep", required=True)
    sp.add_argument("--boundary", required=True)
    sp.add_argument("--subsurface", required=True, help="deformed generator indices, e.g. 0,1,2,3")
    sp.add_argument("--max-norm", type=float, default=0.1)

    sp = add("build-rep", cmd_build_rep, "build an exact representation with tr rho[a1, b1] = 2")
    sp.add_argument("--genus", type=int, default=4)

    sp = add("certify", cmd_certify, "certify a representation")
    sp.add_argument("--rep", default=None, help="representation JSON (default: stdin)")
    sp.add_argument("--catalog-depth", type=int, default=2)
    sp.add_argument("--samples", type=int, default=500)
    sp.add_argument("--max-len", type=int, default=8)

    sp = add("dims", cmd_dims, "dimension counts")
    sp.add_argument("--genus", type=int, required=True)
    sp.add_argument("--query", required=True, choices=surface_builder.QUERIES)
    sp.add_argument("--g1", type=int, default=None)

    sp = add("suite", cmd_suite, "run the acceptance criteria")
    sp.add_argument("--criteria", default=None, help="comma-separated subset, e.g. 1,2,9")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = load_config(args.config)
        return args.func(args, config)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (fibers.PathLiftError, deform.DeformationError, surface_builder.BuildError,
            ArithmeticError, ZeroDivisionError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, KeyError, IndexError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
