"""Command-line front end: advdomain <command> [options].

Reports are UTF-8 JSON with sorted keys. Exit codes: 0 success, 1 numerical
failure or verification violation, 2 invalid input.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import discrepancy as disc
from . import rademacher as rad
from . import training as tr
from . import transfer as tf
from . import verify as vf
from .errors import NumericalError, ValidationError
from .linalg import DesignMatrix

GLOBAL_FLAGS = ("seed", "threads", "out", "config", "no_timestamp")
# config files use the flag spelling
CONFIG_ALIASES = {"class": "hclass", "lambda": "lambda_parts"}


class Violation(Exception):
    """A verification check failed."""


def _floats(text: str) -> List[float]:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _emit(report: dict, args) -> None:
    report = dict(report)
    report["command"] = args.command
    report["seed"] = args.seed
    if not args.no_timestamp:
        report["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    text = json.dumps(report, sort_keys=True, indent=2, default=_json_default, ensure_ascii=False) + "\n"
    if args.out:
        out = Path(args.out)
        if out.parent and not out.parent.exists():
            raise ValidationError(f"output directory {out.parent} does not exist")
        out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _hclass(args, kind=None) -> rad.HypothesisClass:
    return rad.HypothesisClass(kind or args.hclass, args.p, args.W, args.A, args.m)


# commands --------------------------------------------------------------------

def cmd_complexity(args) -> int:
    X = DesignMatrix.from_csv(args.data)
    H = _hclass(args)
    n, d = X.n, X.d
    method = args.method
    out: dict = {"class": asdict(H), "n": n, "d": d, "eps": args.eps, "estimates": {}, "checks": {}}
    est = out["estimates"]
    if method == "exact" and n > rad.EXACT_MAX_N:
        raise ValidationError(f"exact enumeration needs n <= {rad.EXACT_MAX_N}; use --method mc")
    kw = {"method": method, "samples": args.samples, "seed": args.seed}
    if H.kind == "two-layer-relu":
        est["adv_upper"] = rad.nn_adv_upper(X, H, args.eps).to_dict()
        est["std_upper"] = rad.nn_adv_upper(X, H, 0.0).to_dict()
        if n <= rad.EXACT_MAX_N:
            est["std_witness"] = rad.relu_complexity_witness(X, H, seed=args.seed).to_dict()
            out["checks"]["upper_dominates_witness"] = est["std_upper"]["value"] >= est["std_witness"]["value"]
        _emit(out, args)
        return 0
    if H.kind == "linear-classification":
        std = rad.std_complexity_classification(X, H, **kw)
        bern = rad.std_upper_bernstein_classification(X, H)
        gap = rad.adv_upper_classification(X, H, args.eps, args.constant_mode, args.c)
        est["adv_lower_gap"] = rad.adv_lower_gap_classification(X, H, **kw).to_dict()
        small = d <= 2 and n <= rad.EXACT_MAX_N
        adv_fn = rad.adv_complexity_classification_exact_small
        std_grid = rad.std_complexity_classification_grid
    else:
        std = rad.std_complexity_regression(X, H, **kw)
        bern = rad.std_upper_bernstein_regression(X, H)
        gap = rad.adv_upper_regression(X, H, args.eps, args.constant_mode, args.c)
        small = d <= 3 and n <= rad.EXACT_MAX_N
        adv_fn = rad.adv_complexity_regression_exact_small
        std_grid = rad.std_complexity_regression_grid
    if isinstance(std, tuple):
        est["std_lower"], est["std_upper"] = std[0].to_dict(), std[1].to_dict()
        std_val, std_err = std[1].value, std[1].stderr
        if small:
            g = std_grid(X, H)
            est["std"] = g.to_dict()
            std_val, std_err = g.value, 0.0
    else:
        est["std"] = std.to_dict()
        std_val, std_err = std.value, std.stderr
    est["std_bernstein"] = bern.to_dict()
    est["adv_gap_upper"] = gap.to_dict()
    checks = out["checks"]
    checks["bernstein_dominates_std"] = bern.value >= std_val - 4 * std_err
    if small:
        a = adv_fn(X, H, args.eps)
        est["adv"] = a.to_dict()
        checks["adv_within_upper"] = a.value <= std_val + 4 * std_err + gap.value
        if H.p <= 2:
            checks["adv_at_least_std"] = a.value >= std_val - rad.GRID_REL_TOL * (1 + std_val) - 4 * std_err
    _emit(out, args)
    return 0


def cmd_bound(args) -> int:
    M, c = args.M, args.confidence
    parts = {"source_risk": args.source_risk, "discrepancy": args.discrepancy,
             "complexity_source": args.complexity_source, "complexity_target": args.complexity_target}
    n_s, n_t = args.n_source, args.n_target
    computed = {}
    if args.source or args.target:
        if not (args.source and args.target):
            raise ValidationError("--source and --target must be given together")
        S, T = DesignMatrix.from_csv(args.source), DesignMatrix.from_csv(args.target)
        H = _hclass(args, "linear-regression")
        n_s, n_t = S.n, T.n
        std_disc = disc.hdh_discrepancy_regression(S, T, H)
        computed["discrepancy_std"] = std_disc
        adversarial = args.kind != "standard"
        if adversarial:
            slack = disc.estimate_adv_disc_from_std(S, T, H, args.eps, variant=args.slack_variant)
            computed["discrepancy_slack"] = slack
            parts["discrepancy"] = std_disc + slack
        else:
            parts["discrepancy"] = std_disc
        for name, D in (("complexity_source", S), ("complexity_target", T)):
            meth = "exact" if D.n <= rad.EXACT_MAX_N else "mc"
            val = rad.std_complexity_regression(D, H, meth, args.samples, args.seed).value
            if adversarial:
                val += rad.adv_upper_regression(D, H, args.eps).value
            parts[name] = val
            computed[name] = val
    if n_s is None or n_t is None:
        raise ValidationError("--n-source and --n-target are required without --source/--target")
    lam = _floats(args.lambda_parts) if args.lambda_parts is not None else None
    if args.kind == "standard":
        rep = disc.assemble_standard_bound(lambda_parts=lam or [0.0, 0.0], n_source=n_s, n_target=n_t,
                                           loss_bound=M, confidence=c, **parts)
    elif args.kind == "adversarial":
        rep = disc.assemble_adversarial_bound(lambda_parts=lam or [0.0, 0.0, 0.0], n_source=n_s, n_target=n_t,
                                              loss_bound=M, confidence=c, **parts)
    else:
        rep = disc.assemble_corollary_bound(lambda_parts=lam or [0.0, 0.0, 0.0], n_source=n_s, n_target=n_t,
                                            loss_bound=M, confidence=c, mode=args.mode, **parts)
    print(rep.table(), file=sys.stderr)
    _emit({"bound": rep.to_dict(), "computed": computed}, args)
    return 0


def cmd_subset_sum(args) -> int:
    inst = tf.SubsetSumInstance.from_json(Path(args.instance))
    res = {}
    solvers = ["bruteforce", "mitm"] if args.solver == "both" else [args.solver]
    for s in solvers:
        v, wit = tf.vstar(inst, s)
        res[s] = {"optimum": v, "witness": wit.tolist()}
    out = {"instance": json.loads(inst.to_json()), "results": res}
    if len(res) == 2:
        b, m = res["bruteforce"], res["mitm"]
        out["agree"] = b == m
        if not out["agree"]:
            _emit(out, args)
            raise Violation("solvers disagree")
    _emit(out, args)
    return 0


def cmd_transfer_check(args) -> int:
    try:
        obj = json.loads(Path(args.pair).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read pair file: {exc}") from None
    need = {"support", "mass_T", "mass_Tprime", "labels", "w"}
    if set(obj) != need:
        raise ValidationError(f"pair JSON needs exactly the keys {sorted(need)}")
    pair = tf.DiscreteDomainPair(obj["support"], obj["mass_T"], obj["mass_Tprime"], obj["labels"])
    cmp = tf.erm_vs_robust_comparison(pair, obj["w"], args.eps, args.solver)
    _emit({"eps": args.eps, "comparison": cmp.to_dict()}, args)
    if not (cmp.robust.holds and cmp.ok):
        raise Violation("risk transfer inequality violated")
    return 0


def _train_config(args) -> tr.TrainConfig:
    return tr.TrainConfig(eps=args.eps, pgd_steps=args.pgd_steps, pgd_step_size=args.pgd_step_size,
                          epochs=args.epochs, learning_rate=args.lr, cosine=not args.no_cosine,
                          l1_mu=args.mu, loss=args.loss, fit_bias=args.bias, seed=args.seed)


def cmd_train(args) -> int:
    data = DesignMatrix.from_csv(args.data)
    data.require_labels()
    cfg = _train_config(args)
    model = tr.train(tr.LinearModel.zeros(data.d, cfg.fit_bias), data, cfg, args.mode)
    out = {"w": model.w.tolist(), "bias": model.bias, "metadata": model.metadata,
           "train": asdict(tr.evaluate(model, data, cfg.eps, cfg))}
    if args.test:
        test = DesignMatrix.from_csv(args.test)
        test.require_labels()
        out["test"] = asdict(tr.evaluate(model, test, cfg.eps, cfg))
    _emit(out, args)
    return 0


def cmd_sweep(args) -> int:
    mus, epss = _floats(args.mu_grid), _floats(args.eps_grid)
    if not mus or not epss:
        raise ValidationError("mu and eps grids must be nonempty")
    if args.reference:
        spec = tr.REFERENCE_SPEC
    else:
        spec = tr.SyntheticDomainSpec(n=args.n, d=args.d, separation=args.separation, cov_scale=args.cov_scale,
                                      rotation=args.rotation, rotation_plane=tuple(int(v) for v in _floats(args.rotation_plane)),
                                      translation=args.translation, nuisance_signal=args.nuisance_signal,
                                      seed=args.seed)
    base = tr.TrainConfig(epochs=args.epochs, learning_rate=args.lr, pgd_steps=args.pgd_steps,
                          pgd_step_size=args.pgd_step_size, loss=args.loss, seed=spec.seed)
    rows = tr.l1_sweep_experiment(spec, mus, epss, base, threads=args.threads)
    text = tr.sweep_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    only = args.only or None
    if only:
        bad = [o for o in only if o not in vf.BATTERIES]
        if bad:
            raise ValidationError(f"unknown battery {bad}; choose from {sorted(vf.BATTERIES)}")
    results = vf.run(only, seed=args.seed, threads=args.threads, golden=args.golden)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.checked} checks, {r.elapsed:.1f}s", file=sys.stderr)
    _emit({"batteries": [r.to_dict() for r in results], "passed": all(r.passed for r in results)}, args)
    if not all(r.passed for r in results):
        raise Violation("verification failed")
    return 0


# parser ----------------------------------------------------------------------

def _add_globals(p, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="seed for all randomness")
    p.add_argument("--threads", type=int, default=d(1), help="worker cap; 1 is bit-reproducible")
    p.add_argument("--out", default=d(None), help="report path (stdout when omitted)")
    p.add_argument("--config", default=d(None), help="JSON file of option defaults")
    p.add_argument("--no-timestamp", action="store_true", default=d(False), help="omit the report timestamp")


def _add_class(p):
    p.add_argument("--class", dest="hclass", default="linear-classification", choices=rad.KINDS)
    p.add_argument("--p", type=float, default=2.0, help="norm order of the weight ball")
    p.add_argument("--W", type=float, default=1.0, help="weight radius")
    p.add_argument("--A", type=float, default=1.0, help="outer l1 radius (ReLU)")
    p.add_argument("--m", type=int, default=1, help="hidden width (ReLU)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="advdomain", description=__doc__.splitlines()[0])
    _add_globals(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complexity", help="standard/adversarial complexity estimates and bounds")
    _add_globals(p, True)
    p.add_argument("--data", required=True)
    _add_class(p)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--method", choices=("exact", "mc"), default="exact")
    p.add_argument("--samples", type=int, default=rad.MC_DEFAULT_SAMPLES)
    p.add_argument("--constant-mode", choices=("appendix", "theorem"), default="appendix")
    p.add_argument("--c", type=float, default=None, help="constant for --constant-mode theorem")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("bound", help="assemble a target-risk bound")
    _add_globals(p, True)
    p.add_argument("--kind", choices=("standard", "adversarial", "corollary"), default="standard")
    p.add_argument("--mode", choices=("statement", "proof"), default="statement")
    p.add_argument("--source-risk", type=float, default=0.0)
    p.add_argument("--discrepancy", type=float, default=0.0)
    p.add_argument("--lambda", dest="lambda_parts", default=None, help="comma-separated lambda terms")
    p.add_argument("--complexity-source", type=float, default=0.0)
    p.add_argument("--complexity-target", type=float, default=0.0)
    p.add_argument("--n-source", type=int, default=None)
    p.add_argument("--n-target", type=int, default=None)
    p.add_argument("--M", type=float, default=1.0, help="loss bound")
    p.add_argument("--confidence", type=float, default=disc.DEFAULT_CONFIDENCE)
    p.add_argument("--source", default=None, help="source CSV; computes discrepancy and complexities")
    p.add_argument("--target", default=None, help="target CSV")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--slack-variant", choices=("statement", "proof"), default="statement")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--W", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=rad.MC_DEFAULT_SAMPLES)
    p.set_defaults(func=cmd_bound, A=1.0, m=1)

    p = sub.add_parser("subset-sum", help="solve V* for a JSON instance")
    _add_globals(p, True)
    p.add_argument("--instance", required=True)
    p.add_argument("--solver", choices=("bruteforce", "mitm", "both"), default="both")
    p.set_defaults(func=cmd_subset_sum)

    p = sub.add_parser("transfer-check", help="robust-to-standard risk transfer on a discrete pair")
    _add_globals(p, True)
    p.add_argument("--pair", required=True, help="JSON with support, mass_T, mass_Tprime, labels, w")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--solver", choices=("auto", "bruteforce", "mitm"), default="auto")
    p.set_defaults(func=cmd_transfer_check)

    def train_opts(p):
        p.add_argument("--epochs", type=int, default=tr.TrainConfig.epochs)
        p.add_argument("--lr", type=float, default=tr.TrainConfig.learning_rate)
        p.add_argument("--pgd-steps", type=int, default=tr.TrainConfig.pgd_steps)
        p.add_argument("--pgd-step-size", type=float, default=tr.TrainConfig.pgd_step_size)
        p.add_argument("--loss", choices=("logistic", "hinge"), default="logistic")

    p = sub.add_parser("train", help="train a linear classifier")
    _add_globals(p, True)
    p.add_argument("--data", required=True)
    p.add_argument("--test", default=None)
    p.add_argument("--mode", choices=("standard", "adversarial"), default="adversarial")
    p.add_argument("--eps", type=float, default=tr.TrainConfig.eps)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--no-cosine", action="store_true")
    p.add_argument("--bias", action="store_true")
    train_opts(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="l1 sweep of robust accuracy drops")
    _add_globals(p, True)
    p.add_argument("--mu-grid", default=",".join(repr(v) for v in tr.REFERENCE_MU_GRID))
    p.add_argument("--eps-grid", default=",".join(repr(v) for v in tr.REFERENCE_EPS_GRID))
    p.add_argument("--reference", action="store_true", help="use the reference domain spec")
    p.add_argument("--n", type=int, default=tr.SyntheticDomainSpec.n)
    p.add_argument("--d", type=int, default=tr.SyntheticDomainSpec.d)
    p.add_argument("--separation", type=float, default=tr.SyntheticDomainSpec.separation)
    p.add_argument("--cov-scale", type=float, default=tr.SyntheticDomainSpec.cov_scale)
    p.add_argument("--rotation", type=float, default=0.0)
    p.add_argument("--rotation-plane", default="0,1")
    p.add_argument("--translation", type=float, default=0.0)
    p.add_argument("--nuisance-signal", type=float, default=0.0)
    train_opts(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the verification batteries")
    _add_globals(p, True)
    p.add_argument("--only", action="append", default=[], help="battery name; repeatable")
    p.add_argument("--golden", default=None, help="golden sweep CSV")
    p.set_defaults(func=cmd_verify)
    return ap


def _subparser(ap, command):
    for action in ap._subparsers._group_actions:
        return action.choices[command]


def _apply_config(ap, args, argv):
    """Config values become defaults, so explicit flags still win."""
    if not args.config:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ValidationError("config must be a JSON object")
    sp = _subparser(ap, args.command)
    known = {a.dest for a in sp._actions} - {"help", "config"}
    cfg = {CONFIG_ALIASES.get(k, k.replace("-", "_")): v for k, v in cfg.items()}
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise ValidationError(f"unknown config keys for {args.command}: {unknown}")
    sp.set_defaults(**{k: v for k, v in cfg.items() if k not in GLOBAL_FLAGS})
    ap.set_defaults(**{k: v for k, v in cfg.items() if k in GLOBAL_FLAGS})
    return ap.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args = _apply_config(ap, args, argv)
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except Violation as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
