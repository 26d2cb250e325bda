"""Command-line studies: identity checks, dynamics, coherent and GK states, quons.

Exit codes: 0 success, 1 a checked property failed, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import acs, dynamics, gk, ladder, quon
from .errors import LadderError, RhoMismatch
from .weights import from_json

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

OPS_COLUMNS = ["identity", "L", "D", "residual"]
CAUCHY_COLUMNS = ["L", "M", "t", "k", "beta", "I_LM_direct", "I_LM_bound"]
SERIES_COLUMNS = ["L", "t", "K", "series_residual"]
COHERENT_COLUMNS = ["L", "z", "exact_relation", "limit_gap", "dQ", "dP", "product",
                    "robertson", "Γ1", "Γ2"]
GK_COLUMNS = ["L", "J", "gamma", "t", "stability_residual", "action_lhs", "action_rhs",
              "resolution_residual"]
QUON_COLUMNS = ["family", "q", "n", "recursion", "closed_form", "rel_error"]

DEFAULT_TOLERANCES = {"exact": 1e-12, "numeric": 1e-8, "quadrature": 1e-6}


class ConfigError(Exception):
    pass


@dataclass
class StudyConfig:
    sequence: dict | None = None
    ambient_margin: int = 4
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out: str | None = None
    format: str = "csv"
    seed: int = 0
    jobs: int = 1

    def validate(self):
        if self.ambient_margin < 3:
            raise ConfigError("ambient_margin must be at least 3")
        if any(not (v > 0) for v in self.tolerances.values()):
            raise ConfigError("tolerances must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be positive")

    def sequence_for(self, n_needed: int):
        if self.sequence is None:
            raise ConfigError("no sequence given (use --sequence or the config file)")
        seq = from_json(self.sequence, n_max=max(n_needed, 2))
        seq.require(n_needed + 1)
        return seq


def _load_config(args) -> StudyConfig:
    cfg = StudyConfig()
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        cfg.sequence = raw.get("sequence")
        cfg.ambient_margin = int(raw.get("ambient_margin", cfg.ambient_margin))
        cfg.tolerances.update(raw.get("tolerances", {}))
        output = raw.get("output", {})
        cfg.out = output.get("path")
        cfg.format = output.get("format", cfg.format)
    if getattr(args, "sequence", None):
        try:
            cfg.sequence = json.loads(args.sequence)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed sequence JSON: {exc}") from None
    if args.margin is not None:
        cfg.ambient_margin = args.margin
    if args.out is not None:
        cfg.out = args.out
    if args.format is not None:
        cfg.format = args.format
    cfg.seed = args.seed
    cfg.jobs = args.jobs
    cfg.validate()
    return cfg


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, complex):
        return repr(v)
    return str(v)


def _csv_table(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, complex):
        return repr(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def _render(cfg: StudyConfig, tables: dict[str, tuple[list, list]]) -> str:
    if cfg.format == "json":
        payload = {name: [dict(zip(cols, map(_json_value, row))) for row in rows]
                   for name, (cols, rows) in tables.items()}
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"
    return "\n".join(_csv_table(cols, rows) for cols, rows in tables.values())


def _emit(cfg: StudyConfig, tables) -> None:
    text = _render(cfg, tables)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _map(cfg: StudyConfig, fn, tasks):
    """Evaluate ``fn`` over ``tasks``; results come back in task order."""
    tasks = list(tasks)
    if cfg.jobs == 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        return list(pool.map(fn, tasks))


def _flatten(chunks):
    return [row for chunk in chunks for row in chunk]


def cmd_ops_check(cfg: StudyConfig, args) -> int:
    tol = cfg.tolerances["exact"]
    Ls = range(args.Lmax + 1)
    x = cfg.sequence_for(args.Lmax + cfg.ambient_margin)
    if cfg.ambient_margin < 4:
        raise ConfigError("ops-check needs ambient_margin >= 4")

    def run(L):
        D = L + cfg.ambient_margin
        rows = [(name, L, D, res) for name, res in ladder.identity_suite(x, L, D).items()]
        # seeded spot check: <A_L u, v> = <u, A_L^+ v>
        rng = np.random.default_rng([cfg.seed, L])
        u = rng.standard_normal(D) + 1j * rng.standard_normal(D)
        v = rng.standard_normal(D) + 1j * rng.standard_normal(D)
        pair = ladder.make_AL(x, L, D)
        gap = abs(np.vdot(pair.A @ u, v) - np.vdot(u, pair.A_dag @ v))
        rows.append(("<A_L u, v> = <u, A_L^+ v>", L, D, float(gap) / (np.linalg.norm(u) * np.linalg.norm(v))))
        return sorted(rows)

    rows = _flatten(_map(cfg, run, Ls))
    _emit(cfg, {"identities": (OPS_COLUMNS, rows)})
    return EXIT_OK if all(r[3] < tol for r in rows) else EXIT_FAIL


def cmd_dynamics(cfg: StudyConfig, args) -> int:
    cutoffs = list(args.L) + list(args.M)
    top = max(cutoffs, default=0)
    D = top + max(cfg.ambient_margin, 3)
    x = cfg.sequence_for(D)
    spec_for = lambda k: dynamics.SeminormSpec(args.beta, k)  # noqa: E731

    cauchy_tasks = sorted((L, M, t, k) for L in args.L for M in args.M for t in args.t
                          for k in args.k if L <= M)

    def cauchy(task):
        L, M, t, k = task
        gap = dynamics.cauchy_gap(x, L, M, t, spec_for(k), D)
        return (L, M, t, k, args.beta, gap.direct, gap.bound)

    X = ladder.make_A_ambient(x, D)
    series_tasks = sorted((L, t, K) for L in args.L for t in args.t for K in args.K)

    def series(task):
        L, t, K = task
        res = dynamics.series_vs_exact(X, ladder.hamiltonian_HL(x, L, D), t, K)
        return (L, t, K, res.residual)

    cauchy_rows = _map(cfg, cauchy, cauchy_tasks)
    series_rows = _map(cfg, series, series_tasks)
    _emit(cfg, {"cauchy": (CAUCHY_COLUMNS, cauchy_rows),
                "series": (SERIES_COLUMNS, series_rows)})
    slack = 1e-10
    return EXIT_OK if all(r[5] <= r[6] + slack for r in cauchy_rows) else EXIT_FAIL


def _parse_complex(text: str) -> complex:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise ConfigError(f"bad complex number {text!r}; use re,im") from None
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise ConfigError(f"bad complex number {text!r}; use re,im")
    return complex(parts[0], parts[1])


def cmd_coherent(cfg: StudyConfig, args) -> int:
    tol = cfg.tolerances["exact"]
    z = _parse_complex(args.z)
    Ls = range(max(args.Lmin, 2), args.Lmax + 1)
    x = cfg.sequence_for(args.Lmax + cfg.ambient_margin)
    strategy = None if args.strategy == "psi" else acs.B0Strategy(args.strategy)

    def run(L):
        D = L + cfg.ambient_margin
        A = ladder.make_AL(x, L, D).A
        if strategy is None:
            eig = acs.eigen_residual(x, z, L, D)
            exact, gap = eig.exact_relation, eig.limit_gap
            state = None
        else:
            cur = acs.upsilon_state(x, z, L, strategy, D)
            prev = acs.upsilon_state(x, z, L - 1, strategy, D).state.coeffs
            state = cur.state.coeffs
            lhs = A @ state
            exact = float(np.linalg.norm(lhs - z * cur.ratio * prev))
            gap = float(np.linalg.norm(lhs - z * state))
        rep = acs.uncertainty_report(x, z, L, D, state=state)
        return (L, z, exact, gap, rep.dQ, rep.dP, rep.product, rep.robertson_bound,
                rep.gamma1, rep.gamma2)

    rows = _map(cfg, run, Ls)
    _emit(cfg, {"coherent": (COHERENT_COLUMNS, rows)})
    ok = all(r[2] < tol and r[6] >= r[7] - tol for r in rows)
    return EXIT_OK if ok else EXIT_FAIL


def _gk_spec(args, levels: int) -> tuple[gk.GKSpec, bool]:
    try:
        eps = (np.arange(levels, dtype=float) if args.eps == "harmonic"
               else np.asarray(json.loads(args.eps), dtype=float))
        if args.rho == "factorial":
            rho = np.exp([math.lgamma(n + 1) for n in range(eps.size)])
            rho[0] = 1.0
        else:
            rho = np.asarray(json.loads(args.rho), dtype=float)
    except (json.JSONDecodeError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad --eps/--rho: {exc}") from None
    return gk.GKSpec(eps, rho, args.omega), args.rho == "factorial"


def cmd_gk(cfg: StudyConfig, args) -> int:
    tol = cfg.tolerances["exact"]
    spec, factorial_rho = _gk_spec(args, args.Lmax + cfg.ambient_margin + 1)
    Ls = list(range(args.Lmin, args.Lmax + 1))
    for L in Ls:
        spec.require(L + cfg.ambient_margin)

    def resolution(L):
        if not factorial_rho:
            return None
        try:
            return gk.gk_resolution_check(spec, L, lambda u: np.exp(-u),
                                          moment_tol=cfg.tolerances["quadrature"]).residual_vs_QL1
        except LadderError:
            return None

    res_by_L = dict(zip(Ls, _map(cfg, resolution, Ls)))
    tasks = sorted((L, J, g, t) for L in Ls for J in args.J for g in args.gamma for t in args.t)

    def run(task):
        L, J, g, t = task
        D = L + cfg.ambient_margin
        stab = gk.temporal_stability_residual(spec, J, g, L, t, D)
        try:
            act = gk.action_identity_value(spec, J, g, L)
            lhs, rhs = act.lhs, act.rhs
        except RhoMismatch:
            lhs = rhs = None
        return (L, J, g, t, stab, lhs, rhs, res_by_L[L])

    rows = _map(cfg, run, tasks)
    _emit(cfg, {"gk": (GK_COLUMNS, rows)})
    return EXIT_OK if all(r[4] < tol for r in rows) else EXIT_FAIL


def cmd_quons(cfg: StudyConfig, args) -> int:
    tol = cfg.tolerances["exact"]
    for fam in args.family:
        if fam not in quon.BUILTIN_F:
            raise ConfigError(f"unknown family {fam!r}")
    tasks = sorted((fam, q) for fam in args.family for q in args.q)

    def run(task):
        fam, q = task
        if q == 0:
            raise ConfigError("q must be non-zero")
        rec = quon.general_sequence(quon.QMutatorSpec(q, fam), args.nmax)
        rows = []
        for n in range(args.nmax + 1):
            closed = quon.CLOSED_FORMS[fam](q, n)
            err = abs(rec[n] - closed) / abs(closed) if closed else abs(rec[n])
            rows.append((fam, q, n, float(rec[n]), closed, err))
        return rows

    rows = _flatten(_map(cfg, run, tasks))
    _emit(cfg, {"quons": (QUON_COLUMNS, rows)})
    return EXIT_OK if all(r[5] < tol for r in rows) else EXIT_FAIL


COMMANDS = {
    "ops-check": cmd_ops_check,
    "dynamics": cmd_dynamics,
    "coherent": cmd_coherent,
    "gk": cmd_gk,
    "quons": cmd_quons,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON study config")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--seed", type=int, default=0, help="seed for randomized spot checks")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps")
    common.add_argument("--margin", type=int, help="ambient dimension minus cutoff")

    seq = argparse.ArgumentParser(add_help=False)
    seq.add_argument("--sequence", help='weight sequence JSON, e.g. \'{"kind": "harmonic"}\'')

    parser = argparse.ArgumentParser(prog="boundedladder", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ops-check", parents=[common, seq], help="operator identity catalogue")
    p.add_argument("--Lmax", type=int, default=10)

    p = sub.add_parser("dynamics", parents=[common, seq], help="Cauchy gaps and series residuals")
    p.add_argument("--L", type=int, nargs="*", default=[0, 1, 2, 3, 4, 5])
    p.add_argument("--M", type=int, nargs="*", default=[6])
    p.add_argument("--t", type=float, nargs="*", default=[1.0])
    p.add_argument("--k", type=int, nargs="*", default=[1])
    p.add_argument("--K", type=int, nargs="*", default=[40])
    p.add_argument("--beta", type=float, default=1.0)

    p = sub.add_parser("coherent", parents=[common, seq], help="quasi-coherent state sweep over L")
    p.add_argument("--z", default="1,0", help="re,im")
    p.add_argument("--Lmin", type=int, default=2)
    p.add_argument("--Lmax", type=int, default=20)
    p.add_argument("--strategy", default="psi",
                   choices=["psi", "constant", "z_power", "sqrt_ratio"])

    p = sub.add_parser("gk", parents=[common], help="truncated Gazeau-Klauder states")
    p.add_argument("--eps", default="harmonic", help='JSON array or "harmonic"')
    p.add_argument("--rho", default="factorial", help='JSON array or "factorial"')
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--J", type=float, nargs="*", default=[1.0])
    p.add_argument("--gamma", type=float, nargs="*", default=[0.0])
    p.add_argument("--t", type=float, nargs="*", default=[1.0])
    p.add_argument("--Lmin", type=int, default=0)
    p.add_argument("--Lmax", type=int, default=10)

    p = sub.add_parser("quons", parents=[common], help="recursion vs closed-form quon weights")
    p.add_argument("--q", type=float, nargs="*", default=[-0.5, 0.3, 0.9, 1.3])
    p.add_argument("--family", nargs="*", default=["one", "q_pow_neg2n"])
    p.add_argument("--nmax", type=int, default=30)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, LadderError, KeyError, TypeError, ValueError) as exc:
        print(f"boundedladder: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
