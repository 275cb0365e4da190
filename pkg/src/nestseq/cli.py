"""Command-line front end: prove, check, transform, oracle."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import derivation as D
from . import formula as F
from . import sequent as S
from .calculus import LOGICS, Calculus, calculus
from .prover import Budget, Proved, Refuted, prove
from .semantics import (
    check_extension,
    check_frame,
    countermodel_from_json,
    countermodel_to_json,
    enumerate_countermodel,
    satisfies_sequent,
)

EXIT = {"proved": 0, "refuted": 1, "unknown": 2}
ERROR = 3


class CliError(Exception):
    pass


# ------------------------------------------------------------- reporting


def make_calc(logic: str, extensions=()) -> Calculus:
    if logic.upper() not in LOGICS:
        raise CliError(f"unknown logic {logic!r}; choose from {', '.join(LOGICS)}")
    return calculus(logic, [e for e in extensions if e])


def result_json(goal: F.Formula, calc: Calculus, r) -> dict:
    out = {
        "status": r.status,
        "logic": calc.logic,
        "extensions": [e.to_dict() for e in calc.extensions],
        "goal": F.show(goal),
        "rounds": r.rounds,
    }
    if isinstance(r, Proved):
        out["derivation"] = D.to_json(r.derivation)
        out["height"] = D.height(r.derivation)
    elif isinstance(r, Refuted):
        out["sequent"] = S.to_json(S.sequent_of_formula(goal))
        out["model"] = countermodel_to_json(r.model, r.iota, r.mu)
    else:
        out["reason"] = r.reason
    return out


def result_text(goal: F.Formula, calc: Calculus, r) -> str:
    head = f"{r.status.upper()}  {calc.name}  {F.show(goal)}  ({r.rounds} rounds)"
    if isinstance(r, Proved):
        return head + "\n" + D.render(r.derivation)
    if isinstance(r, Refuted):
        m = r.model
        lines = [head, "countermodel:"]
        lines.append("  worlds: " + " ".join(m.worlds))
        edges = sorted((a, b) for a, b in m.order if a != b)
        lines.append("  order: " + (", ".join(f"{a}<={b}" for a, b in edges) or "(discrete)"))
        for w in m.worlds:
            atoms = sorted(
                p + (f"({','.join(t)})" if t else "") for p, per in m.valuation.items() for t in per.get(w, ())
            )
            dom = f" D={{{', '.join(sorted(m.domains[w]))}}}" if m.domains else ""
            lines.append(f"  {w}:{dom} {' '.join(atoms) or '-'}")
        if r.mu:
            lines.append("  mu: " + ", ".join(f"{k}->{v}" for k, v in sorted(r.mu.items())))
        return "\n".join(lines)
    return f"{head}\nreason: {r.reason}"


def check_json(data: dict) -> list[str]:
    """Problems with a derivation or refutation record; empty when it verifies."""
    if "status" in data:
        exts = data.get("extensions", [])
        from .calculus import Extension

        calc = make_calc(data["logic"], [Extension.from_dict(e) if isinstance(e, dict) else e for e in exts])
        if data["status"] == "proved":
            problems = check_json({"derivation": data["derivation"], "logic": data["logic"], "extensions": exts})
            if "goal" in data:
                want = S.sequent_of_formula(F.parse(data["goal"]))
                if D.from_json(data["derivation"]).conclusion != want:
                    problems.append("derivation does not conclude the goal")
            return problems
        if data["status"] == "refuted":
            m, iota, mu = countermodel_from_json(data["model"])
            problems = check_frame(m, calc.logic)
            for e in calc.extensions:
                problems += check_extension(m, e)
            seq = S.from_json(data["sequent"]) if "sequent" in data else S.sequent_of_formula(F.parse(data["goal"]))
            if any(n.label not in iota for n in seq.nodes()):
                return problems + ["iota does not cover the sequent"]
            if satisfies_sequent(m, seq, iota, mu):
                problems.append("the model does not falsify the sequent")
            return problems
        return [f"nothing to check for status {data['status']!r}"]
    if "derivation" in data:
        exts = data.get("extensions", [])
        from .calculus import Extension

        calc = make_calc(data.get("logic", "I"), [Extension.from_dict(e) if isinstance(e, dict) else e for e in exts])
        d = D.from_json(data["derivation"])
        return [str(v) for v in D.check(d, calc.with_cut() if data.get("cut") else calc)]
    raise CliError("expected a prove result, a derivation record or a refutation record")


# --------------------------------------------------------------- commands


def _read_text(arg: str | None, file: str | None) -> str:
    if arg is not None:
        return arg
    if file is not None and file != "-":
        with open(file, encoding="utf-8") as fh:
            return fh.read()
    return sys.stdin.read()


def _prove_one(job):
    text, logic, exts, budget, fmt = job
    goal = F.parse(text)
    calc = make_calc(logic, exts)
    r = prove(goal, calc, budget)
    body = json.dumps(result_json(goal, calc, r)) if fmt == "json" else result_text(goal, calc, r)
    return EXIT[r.status], body


def cmd_prove(a) -> int:
    budget = Budget(max_rounds=a.max_rounds, max_size=a.max_size)
    exts = a.extensions or []
    if a.batch:
        with open(a.batch, encoding="utf-8") as fh:
            goals = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
        jobs = [(g, a.logic, exts, budget, a.format) for g in goals]
        if a.jobs > 1:
            with ProcessPoolExecutor(a.jobs) as pool:
                results = list(pool.map(_safe_prove, jobs))
        else:
            results = [_safe_prove(j) for j in jobs]
        for _, body in results:
            print(body)
        return max((c for c, _ in results), default=0)
    code, body = _prove_one((_read_text(a.goal, a.file), a.logic, exts, budget, a.format))
    print(body)
    return code


def _safe_prove(job):
    try:
        return _prove_one(job)
    except (ValueError, CliError) as e:
        msg = {"status": "error", "goal": job[0], "error": str(e)}
        return ERROR, json.dumps(msg) if job[4] == "json" else f"ERROR  {job[0]}: {e}"


def cmd_check(a) -> int:
    data = json.loads(_read_text(None, a.path))
    if a.logic and "logic" not in data:
        data["logic"] = a.logic
    if a.extensions and "extensions" not in data:
        data["extensions"] = a.extensions
    problems = check_json(data)
    if a.format == "json":
        print(json.dumps({"ok": not problems, "problems": problems}))
    else:
        print("OK" if not problems else "INVALID\n" + "\n".join("  " + p for p in problems))
    return 0 if not problems else 1


def cmd_transform(a) -> int:
    from .transform import TransformRequest, apply_request, invert
    from .calculus import Params

    data = json.loads(_read_text(None, a.path))
    calc = make_calc(data.get("logic", a.logic or "I"), data.get("extensions", a.extensions or []))
    req = TransformRequest.from_json(data)
    if req.rule == "invert":
        args = dict(req.args)
        rule = args.pop("of")
        outs = invert(rule, req.derivation, calc, Params.from_json(args))
        payload = {"derivations": [D.to_json(d) for d in outs], "reproved": False}
        texts = [D.render(d) for d in outs]
    else:
        res = apply_request(req, calc, Budget(max_rounds=a.max_rounds, max_size=a.max_size), a.strategy)
        payload = {"derivation": D.to_json(res.derivation), "reproved": res.reproved}
        texts = [D.render(res.derivation)]
    if a.format == "json":
        payload["logic"] = calc.logic
        print(json.dumps(payload))
    else:
        print("\n\n".join(texts))
    return 0


def cmd_oracle(a) -> int:
    goal = F.parse(_read_text(a.goal, a.file))
    logic = a.logic.upper()
    if logic not in LOGICS:
        raise CliError(f"unknown logic {a.logic!r}")
    r = enumerate_countermodel(goal, logic, a.max_worlds, a.max_domain)
    if a.format == "json":
        out = {"found": r.found, "truncated": r.truncated, "checked": r.checked}
        if r.found:
            out["model"] = countermodel_to_json(r.model, {S.ROOT: r.world}, r.mu)
        print(json.dumps(out))
    else:
        if r.found:
            print(f"countermodel at {r.world} among {r.checked} models: {json.dumps(r.model.to_json())}")
        else:
            print(f"no countermodel up to {a.max_worlds} worlds ({r.checked} models{', truncated' if r.truncated else ''})")
    return 1 if r.found else 0


# ------------------------------------------------------------------ main


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nestseq", description="Nested-sequent prover for I, GD, ND, CD, GN, GC.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, logic_default="I"):
        sp.add_argument("--logic", default=logic_default, help="I, GD, ND, CD, GN or GC")
        sp.add_argument(
            "--extensions",
            action="extend",
            type=lambda t: [x for x in t.split(",") if x],
            default=[],
            help="comma-separated: bd2, sym or a JSON/TOML rule file (repeatable)",
        )
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--max-rounds", type=int, default=Budget.max_rounds)
        sp.add_argument("--max-size", type=int, default=Budget.max_size)

    sp = sub.add_parser("prove", help="search for a proof or a countermodel")
    common(sp)
    sp.add_argument("goal", nargs="?", help="formula (reads --file or stdin when omitted)")
    sp.add_argument("--file")
    sp.add_argument("--batch", help="file with one goal per line")
    sp.add_argument("--jobs", type=int, default=1, help="parallel workers for --batch")
    sp.set_defaults(fn=cmd_prove)

    sp = sub.add_parser("check", help="verify a derivation or refutation JSON")
    common(sp, logic_default=None)
    sp.add_argument("path", nargs="?", default="-")
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("transform", help="apply an admissible rule to a derivation JSON")
    common(sp, logic_default=None)
    sp.add_argument("path", nargs="?", default="-")
    sp.add_argument("--strategy", choices=("auto", "permute", "reprove"), default="auto")
    sp.set_defaults(fn=cmd_transform)

    sp = sub.add_parser("oracle", help="brute-force countermodel search")
    common(sp)
    sp.add_argument("goal", nargs="?")
    sp.add_argument("--file")
    sp.add_argument("--max-worlds", type=int, default=3)
    sp.add_argument("--max-domain", type=int, default=2)
    sp.set_defaults(fn=cmd_oracle)
    return p


def run(argv=None) -> int:
    p = parser()
    try:
        a = p.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else ERROR
    try:
        return a.fn(a)
    except (CliError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR


def main() -> None:
    sys.exit(run())
