"""Batch command line: structure checks, randomized identity suites,
cohomology tables, and BV verification.

Exit code 0 iff every requested check passes / every residual is exactly zero.
Randomized suites are seeded per trial, so results do not depend on the thread
count; failures print the seed and a component-zeroed minimal instance.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor

from .core import QQ, field_from_name
from .cochains import is_normalized, tower_sub
from .braces import brace, brace_relation_residual, closed_leibniz_residual
from .cyclic import (
    cyclic_relation_residual_i,
    cyclic_relation_residual_ii,
    cyclicize,
    delta_leibniz_residual,
    interchange_residuals,
    is_cyclic,
    omega_audit,
)
from .fileformat import ParseError, parse_structure
from .ocha import (
    bv_verify,
    check_l_infinity,
    check_ocha,
    check_unital,
    cohomology,
    hochschild_delta,
    normalized_project,
    q_lemma_suite,
)
from .randgen import (
    random_ce_tower,
    random_graded_space,
    random_nonzero_tower,
    random_symplectic_space,
)


def _load(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_structure(fh.read())


def _emit_report(path: str | None, payload: dict):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")


def _shrink(towers: dict, predicate) -> dict:
    """Zero components one at a time while the failure persists."""
    from .cochains import CochainTower

    current = dict(towers)
    changed = True
    while changed:
        changed = False
        for name, tower in list(current.items()):
            if not isinstance(tower, CochainTower):
                continue
            for lk in list(tower.components):
                comps = {key: val for key, val in tower.components.items()
                         if key != lk}
                smaller = CochainTower(tower.space_z, tower.space_a,
                                       tower.degree, comps, tower.window)
                trial = dict(current)
                trial[name] = smaller
                if not predicate(trial):
                    current = trial
                    changed = True
                    break
    return current


def _describe(towers: dict) -> str:
    lines = []
    for name, tower in sorted(towers.items()):
        try:
            comps = tower.components
        except AttributeError:
            lines.append(f"  {name}: {tower!r}")
            continue
        lines.append(f"  {name}: degree {tower.degree}")
        for lk in sorted(comps):
            for key, vec in sorted(comps[lk].items()):
                lines.append(f"    {lk} {key} -> {tuple(vec)}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# check


def cmd_check(args) -> int:
    bundle = _load(args.file)
    s = bundle.structure()
    results = {}
    if bundle.omega is not None:
        problems = omega_audit(bundle.omega)
        results["omega"] = {"pass": not problems, "detail": problems}
    linf = check_l_infinity(s.l)
    results["l-infinity"] = {"pass": not linf, "detail": linf}
    axiom = check_ocha(s)
    results["ocha"] = {"pass": not axiom, "detail": axiom}
    if s.unit is not None:
        results["unital"] = {"pass": check_unital(s), "detail": []}
    if s.omega is not None:
        results["cyclic"] = {"pass": is_cyclic(s.q, s.omega), "detail": []}
    ok = all(r["pass"] for r in results.values())
    for name, r in results.items():
        print(f"{name}: {'ok' if r['pass'] else 'FAIL'}")
        for line in r["detail"][:5]:
            print(f"  {line}")
    _emit_report(args.report, {"command": "check", "file": args.file,
                               "results": results, "pass": ok})
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# identities


def _trial_rng(seed: int, suite: str, trial: int) -> random.Random:
    return random.Random(f"{seed}:{suite}:{trial}")


def _suite_brace_relation(env, rng):
    sz, sa = env["sz"], env["sa"]
    m, n = rng.randint(0, 2), rng.randint(0, 2)
    towers = {"D": random_nonzero_tower(rng, sz, sa, max_arity=3)}
    for i in range(m):
        towers[f"E{i}"] = random_nonzero_tower(rng, sz, sa, max_arity=1)
    for i in range(n):
        towers[f"F{i}"] = random_nonzero_tower(rng, sz, sa, max_arity=1)

    def run(ts):
        es = [ts[f"E{i}"] for i in range(m)]
        fs = [ts[f"F{i}"] for i in range(n)]
        r1 = brace_relation_residual(ts["D"], es, fs)
        l = env["rand_l"](rng)
        r2 = closed_leibniz_residual(l, ts["D"], es)
        return r1.is_zero() and r2.is_zero()

    return towers, run


def _suite_cyclic_relations(env, rng):
    sz, sa = env["sz"], env["sa"]
    m, n = rng.randint(0, 2), rng.randint(0, 3)
    towers = {"D": random_nonzero_tower(rng, sz, sa, max_arity=3)}
    for i in range(m):
        towers[f"E{i}"] = random_nonzero_tower(rng, sz, sa, max_arity=1)
    for i in range(n):
        towers[f"F{i}"] = random_nonzero_tower(rng, sz, sa, max_arity=1)

    def run(ts):
        es = [ts[f"E{i}"] for i in range(m)]
        fs = [ts[f"F{i}"] for i in range(n)]
        ri = cyclic_relation_residual_i(ts["D"], es, fs, env["w"], env["unit"])
        rii = cyclic_relation_residual_ii(ts["D"], es, fs, env["w"], env["unit"])
        return ri.is_zero() and rii.is_zero()

    return towers, run


def _suite_interchange(env, rng):
    sz, sa = env["sz"], env["sa"]
    w, unit = env["w"], env["unit"]
    use_q = env["q"] is not None and rng.random() < 0.5
    F = env["q"] if use_q else cyclicize(
        random_nonzero_tower(rng, sz, sa, max_arity=2), w)
    n = rng.randint(0, 2)
    towers = {"D": random_nonzero_tower(rng, sz, sa, max_arity=2), "F": F}
    for i in range(n):
        towers[f"E{i}"] = random_nonzero_tower(rng, sz, sa, max_arity=1)
    anchor = rng.randint(0, n)

    def run(ts):
        args = [ts[f"E{i}"] for i in range(n)]
        r1, r2 = interchange_residuals(ts["F"], ts["D"], args, anchor, w, unit)
        return r1.is_zero() and r2.is_zero()

    return towers, run


def _suite_closed_probe(env, rng):
    sz, sa = env["sz"], env["sa"]
    m = rng.randint(0, 2)
    towers = {"D": random_nonzero_tower(rng, sz, sa, max_arity=2)}
    for i in range(m):
        towers[f"E{i}"] = random_nonzero_tower(rng, sz, sa, max_arity=1)

    def run(ts):
        l = env["rand_l"](rng)
        es = [ts[f"E{i}"] for i in range(m)]
        r = delta_leibniz_residual(l, ts["D"], es, env["w"], env["unit"])
        return r.is_zero()

    return towers, run


def _suite_q_lemmas(env, rng):
    sz, sa = env["sz"], env["sa"]
    towers = {
        "D": random_nonzero_tower(rng, sz, sa, max_arity=2),
        "E": random_nonzero_tower(rng, sz, sa, max_arity=2),
    }

    def run(ts):
        report = q_lemma_suite(env["s"], [ts["D"], ts["E"]])
        return all(ok for _name, ok in report)

    return towers, run


def _suite_bv(env, rng):
    sz, sa = env["sz"], env["sa"]
    s = env["s"]
    towers = {
        "D": normalized_project(
            random_nonzero_tower(rng, sz, sa, max_arity=2), s.unit),
        "E": normalized_project(
            random_nonzero_tower(rng, sz, sa, max_arity=2), s.unit),
    }

    def run(ts):
        rep = bv_verify(s, ts["D"], ts["E"])
        return rep.all_zero()

    return towers, run


def _suite_delta_squared(env, rng):
    sz, sa = env["sz"], env["sa"]
    s = env["s"]
    cap = env["cap"]
    towers = {"D": random_nonzero_tower(rng, sz, sa, max_arity=cap,
                                        window=cap)}

    def run(ts):
        dd = hochschild_delta(s, hochschild_delta(s, ts["D"]))
        ok = dd.is_zero()
        if s.unit is not None:
            dn = normalized_project(ts["D"], s.unit)
            ok = ok and is_normalized(hochschild_delta(s, dn), s.unit)
        return ok

    return towers, run


# requirement levels: "none" (spaces only), "pairing" (omega + unit),
# "structure" (valid OCHA), "cyclic-unital" (full BV layer)
SUITES = {
    "brace-relation": (_suite_brace_relation, "none"),
    "cyclic-relations": (_suite_cyclic_relations, "pairing"),
    "interchange": (_suite_interchange, "pairing"),
    "closed-probe": (_suite_closed_probe, "pairing"),
    "q-lemmas": (_suite_q_lemmas, "cyclic-unital"),
    "bv-theorem": (_suite_bv, "cyclic-unital"),
    "delta-squared": (_suite_delta_squared, "structure"),
}


def _run_suite(name, builder, env, seed, trials):
    failures = []
    for t in range(trials):
        rng = _trial_rng(seed, name, t)
        towers, run = builder(env, rng)
        try:
            ok = run(towers)
        except Exception as exc:  # diagnostics beat a stack trace in batch runs
            failures.append((t, towers, f"error: {exc}"))
            continue
        if not ok:
            small = _shrink(towers, lambda ts: run(ts))
            failures.append((t, small, "nonzero residual"))
    return name, trials, failures


def cmd_identities(args) -> int:
    bundle = _load(args.file)
    s = bundle.structure()
    seed = args.seed
    trials = args.trials
    threads = args.threads or int(os.environ.get("OCHABV_THREADS", "1"))

    has_pairing = s.omega is not None and s.unit is not None
    is_structure = s.is_ocha()
    cyclic_unital = (has_pairing and is_structure and s.is_unital()
                     and s.is_cyclic_structure())
    satisfied = {"none": True, "pairing": has_pairing,
                 "structure": is_structure, "cyclic-unital": cyclic_unital}

    def rand_l(rng):
        return random_ce_tower(rng, s.space_z, max_arity=2)

    env = {
        "sz": s.space_z, "sa": s.space_a, "w": s.omega, "unit": s.unit,
        "q": s.q, "s": s, "rand_l": rand_l, "cap": args.cap,
    }
    jobs = []
    skipped = []
    for name, (builder, needs) in SUITES.items():
        if not satisfied[needs]:
            skipped.append((name, needs))
            continue
        jobs.append((name, builder, env, seed, trials))

    if args.dim_a or args.dim_z:
        gen_field = field_from_name(os.environ.get("OCHABV_FIELD", "rational"))
        rng0 = random.Random(seed)
        sa2, w2, unit2 = random_symplectic_space(rng0, args.dim_a or 2,
                                                 field=gen_field)
        sz2 = random_graded_space(rng0, args.dim_z or 2, -2, 2, "z", "Z")
        env2 = {
            "sz": sz2, "sa": sa2, "w": w2, "unit": unit2, "q": None, "s": None,
            "rand_l": lambda rng: random_ce_tower(rng, sz2, max_arity=2),
            "cap": args.cap,
        }
        for name in ("brace-relation", "cyclic-relations", "interchange",
                     "closed-probe"):
            jobs.append((name + "@random-space", SUITES[name][0], env2, seed,
                         trials))

    results = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_run_suite, *job) for job in jobs]
            results = [f.result() for f in futures]
    else:
        results = [_run_suite(*job) for job in jobs]

    ok = True
    report = {}
    for name, n_trials, failures in results:
        status = "PASS" if not failures else "FAIL"
        ok = ok and not failures
        print(f"{status} {name} (trials={n_trials}, seed={seed})")
        for t, towers, why in failures[:3]:
            print(f"  trial {t}: {why}; minimal instance:")
            print(_describe(towers))
        report[name] = {"trials": n_trials, "failures": len(failures)}
    for name, needs in skipped:
        print(f"SKIP {name} (structure lacks: {needs})")
    _emit_report(args.report, {"command": "identities", "file": args.file,
                               "seed": seed, "results": report, "pass": ok})
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# cohomology


def cmd_cohomology(args) -> int:
    bundle = _load(args.file)
    s = bundle.structure()
    lo, hi = args.degrees
    rep = cohomology(s, args.cap, range(lo, hi + 1), normalized=args.normalized)
    print(f"cap {rep.cap}  normalized={rep.normalized}  "
          f"delta^2=0: {rep.square_is_zero}")
    print(f"{'degree':>6} {'dim':>5} {'ker':>5} {'im':>5} {'H':>5}")
    payload = {}
    for d in sorted(rep.degrees):
        slot = rep.degrees[d]
        print(f"{d:>6} {slot.dimension:>5} {slot.kernel:>5} "
              f"{slot.image:>5} {slot.cohomology:>5}")
        payload[str(d)] = {
            "dimension": slot.dimension, "kernel": slot.kernel,
            "image": slot.image, "cohomology": slot.cohomology,
            "representatives": len(slot.representatives),
        }
    ok = rep.square_is_zero and all(
        slot.cohomology == slot.kernel - slot.image
        for slot in rep.degrees.values()
    )
    _emit_report(args.report, {"command": "cohomology", "file": args.file,
                               "cap": args.cap, "normalized": args.normalized,
                               "square_is_zero": rep.square_is_zero,
                               "degrees": payload, "pass": ok})
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# bv


def cmd_bv(args) -> int:
    bundle = _load(args.file)
    s = bundle.structure()
    try:
        D = bundle.towers[args.D]
        E = bundle.towers[args.E]
    except KeyError as exc:
        print(f"unknown tower {exc}")
        return 2
    if args.project:
        D = normalized_project(D, s.unit)
        E = normalized_project(E, s.unit)
    rep = bv_verify(s, D, E)
    checks = {
        "brace-decomposition": rep.lemma_D_E.is_zero(),
        "bv-of-cup": rep.lemma_delta_cup.is_zero(),
        "full-identity": rep.theorem_full.is_zero(),
    }
    if rep.closed_inputs:
        checks["bv-relation-on-closed"] = rep.bv_relation.is_zero()
    ok = all(checks.values())
    for name, passed in checks.items():
        print(f"{name}: {'ok' if passed else 'FAIL'}")
    if rep.closed_inputs:
        print("inputs are delta-closed; primitive components: "
              f"{rep.bv_primitive.bidegrees()}")
    _emit_report(args.report, {"command": "bv", "file": args.file,
                               "D": args.D, "E": args.E, "checks": checks,
                               "pass": ok})
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# entry point


def _degree_range(text: str):
    lo, _, hi = text.partition("..")
    return int(lo), int(hi if hi else lo)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ochabv",
        description="Exact checks for open-closed Hochschild structures: "
                    "axioms, brace/cyclic-brace identities, cohomology, BV.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="omega/L-infinity/OCHA/unital/cyclic audits")
    c.add_argument("file")
    c.add_argument("--report", default=None)
    c.set_defaults(func=cmd_check)

    i = sub.add_parser("identities", help="randomized residual suites")
    i.add_argument("file")
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--trials", type=int, default=25)
    i.add_argument("--dimA", dest="dim_a", type=int, default=None)
    i.add_argument("--dimZ", dest="dim_z", type=int, default=None)
    i.add_argument("--cap", type=int, default=3)
    i.add_argument("--threads", type=int, default=None)
    i.add_argument("--report", default=None)
    i.set_defaults(func=cmd_identities)

    h = sub.add_parser("cohomology", help="capped (normalized) cohomology table")
    h.add_argument("file")
    h.add_argument("--cap", type=int, required=True)
    h.add_argument("--degrees", type=_degree_range, required=True,
                   metavar="d1..d2")
    h.add_argument("--normalized", action="store_true")
    h.add_argument("--report", default=None)
    h.set_defaults(func=cmd_cohomology)

    b = sub.add_parser("bv", help="BV identity residuals for two named towers")
    b.add_argument("file")
    b.add_argument("--D", required=True)
    b.add_argument("--E", required=True)
    b.add_argument("--project", action="store_true",
                   help="apply the normalized projection to the inputs first")
    b.add_argument("--report", default=None)
    b.set_defaults(func=cmd_bv)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
