"""Command-line driver: quotient graphs, cocycle bases, Hecke data, L-values and
theorem cross-checks, all reported as deterministic JSON on stdout."""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import pickle
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .cocycle import HarmonicSpace
from .lfun import (
    HypothesisViolation,
    LfunConfig,
    aj_value,
    check_heegner,
    class_number,
    find_embedding,
    partial_lfun,
    theorem_check,
)
from .measure import table_to_csv
from .padic import INF, PrecisionLoss
from .quat import QuotientGraph, algebra_init, eichler_mass, shimura_genus

CACHE_ENV = "HEEGNERPADIC_CACHE"
COMMANDS = ("graph", "basis", "hecke", "lfun", "lderiv", "theorem-check", "aj", "phimod-selftest")


class ConfigError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


@dataclass
class RunConfig:
    p: int = 3
    n_minus: int = 2
    n_plus: int = 1
    weight: int = 4
    field_disc: Optional[int] = None
    depth: int = 3
    precision: int = 40
    j: str = "0..n"
    s: str = "1..n+1"
    ell: str = "5,7"
    lam: str = "1"
    csv: Optional[str] = None
    threads: int = 1
    no_cache: bool = False
    seed: int = 0
    count: int = 20

    @property
    def n(self) -> int:
        return self.weight - 2

    def validate(self, command: str) -> None:
        if self.p < 3 or any(self.p % q == 0 for q in range(2, int(self.p ** 0.5) + 1)):
            raise ConfigError(f"p = {self.p} must be an odd prime")
        if command in ("graph", "phimod-selftest"):
            return
        if self.weight % 2 or self.weight < 4:
            raise ConfigError(f"weight {self.weight} unsupported: weight must be even and at least 4 (weight 2 is excluded)")
        if command in ("lfun", "lderiv", "theorem-check", "aj"):
            if self.field_disc is None:
                raise ConfigError("--field-disc is required")
            try:
                check_heegner(self.field_disc, self.p, self.n_minus, self.n_plus)
            except HypothesisViolation as exc:
                raise ConfigError(str(exc)) from exc
            if class_number(self.field_disc) != 1:
                raise ConfigError(f"class number of Q(sqrt({self.field_disc})) is {class_number(self.field_disc)}; only 1 is supported")
            if self.depth < 1:
                raise ConfigError("depth must be at least 1")


def parse_range(text: str, n: int) -> List[int]:
    """'0..n', '1..3', '0,2' or '1'; the symbol n stands for the weight minus two."""
    text = text.replace("n", str(n)).replace(" ", "")
    out = []
    for part in text.split(","):
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(_eval_int(a), _eval_int(b) + 1))
        elif part:
            out.append(_eval_int(part))
    return out


def _eval_int(text: str) -> int:
    total = 0
    for term in text.replace("-", "+-").split("+"):
        if term:
            total += int(term)
    return total


def parse_lambda(text: str) -> Fraction:
    return Fraction(text)


def read_config_file(path: str) -> Dict[str, str]:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"bad config line: {raw!r}")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    fields = RunConfig.__dataclass_fields__
    if args.config:
        for k, v in read_config_file(args.config).items():
            if k not in fields:
                raise ConfigError(f"unknown config key {k}")
            setattr(cfg, k, _coerce(fields[k].type, v))
    for k in fields:
        v = getattr(args, k, None)
        if v is not None and v is not False:
            setattr(cfg, k, v)
    return cfg


def _coerce(typ, v: str):
    t = str(typ)
    if "bool" in t:
        return v.lower() in ("1", "true", "yes")
    if "int" in t:
        return int(v)
    return v


# ------------------------------------------------------------------ cached pipeline

def _cache_dir() -> Optional[Path]:
    d = os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def _cache_key(*parts) -> str:
    h = hashlib.sha256(repr((__version__,) + parts).encode()).hexdigest()[:20]
    return h


def load_graph(cfg: RunConfig) -> QuotientGraph:
    return _cached(("graph", cfg.n_minus, cfg.n_plus, cfg.p), cfg,
                   lambda: QuotientGraph(algebra_init(cfg.n_minus, cfg.n_plus, cfg.p)[1], cfg.p))


def load_space(cfg: RunConfig) -> HarmonicSpace:
    return _cached(("space", cfg.n_minus, cfg.n_plus, cfg.p, cfg.weight), cfg,
                   lambda: HarmonicSpace(load_graph(cfg), cfg.n))


def _cached(key, cfg: RunConfig, build):
    d = None if cfg.no_cache else _cache_dir()
    if d is None:
        return build()
    d.mkdir(parents=True, exist_ok=True)
    path = d / f"{key[0]}-{_cache_key(*key)}.pkl"
    if path.exists():
        with path.open("rb") as fh:
            return pickle.load(fh)
    obj = build()
    tmp = path.with_suffix(".tmp")
    with tmp.open("wb") as fh:
        pickle.dump(obj, fh)
    tmp.replace(path)
    return obj


def _lfun_setup(cfg: RunConfig):
    space = load_space(cfg)
    if space.dimension != 1:
        raise ConfigError(f"cocycle space has dimension {space.dimension}; the L-function commands need a one-dimensional space")
    form = space.eigenform()
    emb = find_embedding(space.graph, cfg.field_disc)
    return LfunConfig(form, [emb], cfg.depth, cfg.precision), emb


def _num(x):
    if x == INF:
        return "inf"
    return int(x) if x == int(x) else str(x)


def _fe(x) -> str:
    return str(x)


# ------------------------------------------------------------------ commands

def cmd_graph(cfg: RunConfig) -> dict:
    g = load_graph(cfg)
    disc = cfg.p * cfg.n_minus
    M = eichler_mass(cfg.n_minus, cfg.n_plus)
    report = g.to_json()
    # each vertex parity carries one Eichler mass; edges carry the level-p refinement
    mass_ok = g.vertex_mass() == 2 * M and g.edge_mass() == (cfg.p + 1) * M
    report.update({
        "connected": g.is_connected(),
        "betti_number": g.betti_number(),
        "genus_oracle": shimura_genus(disc, cfg.n_plus),
        "vertex_mass": str(g.vertex_mass()),
        "edge_mass": str(g.edge_mass()),
        "eichler_mass": str(M),
        "mass_check": mass_ok,
    })
    if not report["connected"] or report["betti_number"] != report["genus_oracle"] or not mass_ok:
        raise InvariantViolation(json.dumps(report, sort_keys=True))
    return report


def cmd_basis(cfg: RunConfig) -> dict:
    sp = load_space(cfg)
    valid = all(b.is_valid() for b in sp.basis)
    report = {
        "weight": cfg.weight,
        "dimension": sp.dimension,
        "field_d": sp.d,
        "basis": [b.to_json() for b in sp.basis],
        "valid": valid,
    }
    if not valid:
        raise InvariantViolation("basis element violates the cocycle relations")
    return report


def cmd_hecke(cfg: RunConfig) -> dict:
    sp = load_space(cfg)
    ells = parse_range(cfg.ell, cfg.n)
    mats = {ell: sp.hecke_matrix(ell) for ell in ells}
    from . import linalg

    commute = True
    for a in ells:
        for b in ells:
            if a < b:
                AB = linalg.matmul(mats[a], mats[b])
                BA = linalg.matmul(mats[b], mats[a])
                commute = commute and all(x == y for r, s in zip(AB, BA) for x, y in zip(r, s))
    report = {
        "weight": cfg.weight,
        "dimension": sp.dimension,
        "operators": {str(ell): [[_fe(x) for x in row] for row in M] for ell, M in mats.items()},
        "commute": commute,
    }
    if sp.dimension == 1:
        report["eigenvalues"] = {str(ell): _fe(M[0][0]) for ell, M in mats.items()}
    if not commute:
        raise InvariantViolation("Hecke operators do not commute")
    return report


def cmd_lfun(cfg: RunConfig) -> dict:
    lc, emb = _lfun_setup(cfg)
    rows = []
    for s in parse_range(cfg.s, cfg.n):
        for m in range(1, cfg.depth + 1):
            I = partial_lfun(lc, emb, s, m)
            rows.append({"s": s, "depth": m, "value": str(I.value), "exact_zero": I.exact})
    if not all(r["exact_zero"] for r in rows if 1 <= r["s"] <= cfg.n + 1):
        raise InvariantViolation("critical value is not an exact zero")
    return {"embedding": emb.to_json(), "values": rows}


def _lderiv_job(args):
    cfg, j = args
    lc, emb = _lfun_setup(cfg)
    out = []
    from .lfun import lderiv_integrand

    phi = lderiv_integrand(emb, cfg.n, j)
    rows = lc.measure.convergence_table(phi, range(1, cfg.depth + 1))
    for row in rows:
        row["j"] = j
        out.append(row)
    return out


def _run_jobs(cfg: RunConfig, fn, items):
    jobs = [(cfg, x) for x in items]
    if cfg.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as ex:
            return list(ex.map(fn, jobs))
    return [fn(job) for job in jobs]


def cmd_lderiv(cfg: RunConfig) -> dict:
    js = parse_range(cfg.j, cfg.n)
    results = _run_jobs(cfg, _lderiv_job, js)
    rows = [r for res in results for r in res]
    if cfg.csv:
        Path(cfg.csv).write_text(table_to_csv([{k: r[k] for k in ("depth", "value", "error", "diff_valuation")} for r in rows]))
    for r in rows:
        r["error"] = _num(r["error"])
        r["diff_valuation"] = None if r["diff_valuation"] is None else _num(r["diff_valuation"])
    return {"values": rows}


def _theorem_job(args):
    cfg, j = args
    lc, emb = _lfun_setup(cfg)
    tc = theorem_check(lc, emb, j, cfg.depth)
    return tc.to_json()


def cmd_theorem_check(cfg: RunConfig) -> dict:
    js = parse_range(cfg.j, cfg.n)
    checks = _run_jobs(cfg, _theorem_job, js)
    _, emb = _lfun_setup(cfg)
    ok = all(c["agreement_valuation"] == "inf" or c["agreement_valuation"] >= cfg.depth for c in checks)
    report = {"embedding": emb.to_json(), "checks": checks, "agreement_at_least_depth": ok}
    if not ok:
        raise InvariantViolation(json.dumps(report, sort_keys=True))
    return report


def cmd_aj(cfg: RunConfig) -> dict:
    lc, emb = _lfun_setup(cfg)
    lam = parse_lambda(cfg.lam)
    rows = []
    for j in parse_range(cfg.j, cfg.n):
        v = aj_value(lc, j, cfg.depth, lam)
        rows.append({"j": j, "lambda": str(lam), "value": str(v), "precision": _num(v.absprec)})
    return {"embedding": emb.to_json(), "Omega": str(emb.omega), "values": rows}


def cmd_phimod_selftest(cfg: RunConfig) -> dict:
    from .phimod import (
        ExtClass, class_from_extension, em2_stalk, extension_from_class, random_instance, slopes, tate_twist, validate,
    )

    rng = random.Random(cfg.seed)
    fails = []
    for i in range(cfg.count):
        n = rng.choice((2, 4))
        D, d = random_instance(rng, n, cfg.p)
        ext = extension_from_class(D, d, n)
        if not validate(ext.E) or class_from_extension(ext, n, base=D) != ExtClass(D, n, d):
            fails.append(i)
    S = em2_stalk(cfg.p)
    stalk_slopes = [str(s) for s in slopes(S)]
    twist_ok = [str(s) for s in slopes(tate_twist(S, 3))] == [str(s + 3) for s in slopes(S)]
    report = {
        "roundtrip_instances": cfg.count,
        "roundtrip_failures": fails,
        "stalk_valid": validate(S).valid,
        "stalk_slopes": stalk_slopes,
        "twist_shift_ok": twist_ok,
    }
    if fails or not report["stalk_valid"] or not twist_ok:
        raise InvariantViolation(json.dumps(report, sort_keys=True))
    return report


HANDLERS = {
    "graph": cmd_graph,
    "basis": cmd_basis,
    "hecke": cmd_hecke,
    "lfun": cmd_lfun,
    "lderiv": cmd_lderiv,
    "theorem-check": cmd_theorem_check,
    "aj": cmd_aj,
    "phimod-selftest": cmd_phimod_selftest,
}


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heegnerpadic", description=__doc__)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="key=value file; flags override it")
    ap.add_argument("--p", type=int)
    ap.add_argument("--n-minus", dest="n_minus", type=int)
    ap.add_argument("--n-plus", dest="n_plus", type=int)
    ap.add_argument("--weight", type=int)
    ap.add_argument("--field-disc", dest="field_disc", type=int)
    ap.add_argument("--depth", type=int)
    ap.add_argument("--precision", type=int)
    ap.add_argument("--j", help="range such as 0..2, 0..n or 1,3")
    ap.add_argument("--s", help="critical points for lfun, e.g. 1..n+1")
    ap.add_argument("--ell", help="Hecke primes, e.g. 3,5,7")
    ap.add_argument("--lam", help="rescaling of the differential omega (rational)")
    ap.add_argument("--csv", help="write the convergence table to this file")
    ap.add_argument("--threads", type=int, help="worker processes for independent evaluations")
    ap.add_argument("--no-cache", dest="no_cache", action="store_true")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--count", type=int)
    return ap


def run(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = make_parser().parse_args(argv)
    report = {"command": args.command, "version": __version__, "warnings": []}
    try:
        cfg = build_config(args)
        cfg.validate(args.command)
        report["config"] = {k: v for k, v in asdict(cfg).items() if k not in ("csv", "threads", "no_cache")}
        report["result"] = HANDLERS[args.command](cfg)
        code = 0
    except ConfigError as exc:
        report["error"] = {"type": "ConfigError", "message": str(exc)}
        code = 2
    except InvariantViolation as exc:
        report["error"] = {"type": "InvariantViolation", "message": str(exc)}
        code = 1
    except PrecisionLoss as exc:
        report["warnings"].append(f"PrecisionLoss: {exc}")
        code = 3
    out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
