"""Command-line front end: error tables, surfaces, kernel samples, property
suites and rate checks.

Exit codes: 0 success, 1 property failure, 2 configuration error,
3 computation error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .activations import ActivationParameterError, parse_activation
from .analysis import (
    ErrorTable,
    compare_operators,
    empirical_order,
    jackson_bound,
    lipschitz_rate,
    sup_norm_error,
)
from .kernel import (
    KernelDecayError,
    KernelProfile,
    MomentInfiniteError,
    absolute_moment,
    phi,
    truncation_radius,
)
from .lattice import BoxDomain, LatticeError, build_lattice, uniform_grid
from .operators import OPERATOR_KINDS, evaluate_on_grid
from .properties import run_suite
from .targets import BOUNDED, ExpressionError, RangeViolation, parse_target

EXIT_OK, EXIT_PROPERTY, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2, 3
COMMANDS = ("compare", "surface", "kernel", "verify", "rates")
BUILTIN_TARGETS = ("table1", "identity", "cosine_bump")
VALIDATION_SAMPLES = 10_000


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    activation: str = "logistic"
    target: str = "table1"
    domain: str | None = None
    n: str | None = None
    kind: str | None = None
    grid: int | None = None
    alpha: float = 2.0
    beta: float = 1.0
    delta_exp: float | None = None
    tail_eps: float = 1e-15
    out: str | None = None
    seed: int = 0
    threads: int | None = None
    trials: int = 1000
    full_lattice: bool = False
    extended: bool = False
    inject_error: float = 0.0


CONFIG_KEYS = {f.name for f in fields(RunConfig)} - {"command"}


def _parser():
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = common.add_argument_group("common options")
    g.add_argument("--config", help="JSON file with option values; flags override it")
    g.add_argument("--activation", help="catalog name, e.g. logistic or power_tail:gamma=0.4")
    g.add_argument("--target", help="table1, identity, cosine_bump, const:<c> or an expression in y1..yr")
    g.add_argument("--domain", help="box as a1,b1[,a2,b2,...]")
    g.add_argument("--n", help="comma-separated list of n")
    g.add_argument("--kind", help="operator: " + ", ".join(OPERATOR_KINDS))
    g.add_argument("--grid", type=int, help="grid points per axis")
    g.add_argument("--alpha", type=float, help="moment order in the rate bound (default 2)")
    g.add_argument("--beta", type=float, help="Lipschitz exponent of the target (default 1)")
    g.add_argument("--delta-exp", dest="delta_exp", type=float,
                   help="delta_n = n^-delta_exp (default alpha/(alpha+beta))")
    g.add_argument("--tail-eps", dest="tail_eps", type=float, help="kernel tail epsilon (default 1e-15)")
    g.add_argument("--out", help="output file (kernel: output prefix)")
    g.add_argument("--seed", type=int, help="random seed (default 0)")
    g.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    g.add_argument("--trials", type=int, help="random trials per property (verify)")
    g.add_argument("--full-lattice", dest="full_lattice", action="store_true",
                   help="visit every lattice point instead of the kernel window")
    g.add_argument("--extended", action="store_true",
                   help="allow targets outside [0,1] through the sign/reciprocal extension")
    g.add_argument("--inject-error", dest="inject_error", type=float,
                   help="rates test mode: add this amount to every observed error")

    p = argparse.ArgumentParser(prog="maxmin-nn", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "compare": "sup-norm errors of the three box operators for several n",
        "surface": "operator values on a grid as plot-ready CSV",
        "kernel": "samples of phi and of the bivariate rho",
        "verify": "seeded property suites",
        "rates": "Jackson-type bound against observed error for several n",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return p


def load_config(argv):
    """Merge defaults, the optional JSON file and the flags into a RunConfig."""
    argv = list(argv)
    # let "--domain -2,2" through; argparse would read the value as an option
    for i, tok in enumerate(argv[:-1]):
        if tok == "--domain" and argv[i + 1].startswith("-"):
            argv[i : i + 2] = [f"--domain={argv[i + 1]}", ""]
    ns = vars(_parser().parse_args([a for a in argv if a != ""]))
    values = {}
    path = ns.pop("config", None)
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        data = {k.replace("-", "_"): v for k, v in data.items()}
        unknown = sorted(set(data) - CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        values.update(data)
    values.update(ns)
    if isinstance(values.get("n"), (list, tuple)):
        values["n"] = ",".join(str(v) for v in values["n"])
    elif isinstance(values.get("n"), int):
        values["n"] = str(values["n"])
    return RunConfig(**values)


# validation


@dataclass
class Resolved:
    """A RunConfig turned into library objects."""

    act: object
    profile_dim: int
    target: object
    domain: BoxDomain
    ns: list
    kind: str


def _parse_ns(text):
    if text is None:
        return []
    try:
        ns = [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--n must be comma-separated integers, got {text!r}") from None
    if any(n < 1 for n in ns):
        raise ConfigError("every n must be a positive integer")
    if len(set(ns)) != len(ns):
        raise ConfigError("n values must be distinct")
    return sorted(ns)


def _check_range(h, domain, seed, extended):
    """Sample the target on the domain; unit-interval violations are config errors."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(domain.lower, domain.upper, size=(VALIDATION_SAMPLES, domain.dimension))
    pts[: 2**domain.dimension] = np.array(np.meshgrid(*domain.intervals, indexing="ij")).reshape(
        domain.dimension, -1
    ).T
    vals = h.raw(pts)
    if not np.all(np.isfinite(vals)):
        raise ConfigError(f"target {h.description} is not finite on {domain}")
    outside = (vals < 0) | (vals > 1)
    if np.any(outside) and not extended:
        v = vals[outside][0]
        raise ConfigError(
            f"target {h.description} takes value {v:.6g} outside [0, 1] on {domain}; "
            "pass --extended to use the extended max-min operator"
        )
    return bool(np.any(outside))


def resolve(cfg):
    if cfg.grid is not None and cfg.grid < 2:
        raise ConfigError("--grid needs at least 2 points per axis")
    if cfg.threads is not None and cfg.threads < 1:
        raise ConfigError("--threads must be at least 1")
    if not cfg.tail_eps > 0:
        raise ConfigError("--tail-eps must be positive")
    if cfg.trials < 1:
        raise ConfigError("--trials must be positive")
    act = parse_activation(cfg.activation)
    domain = BoxDomain.parse(cfg.domain) if cfg.domain else None
    name = cfg.target.strip()
    r = domain.dimension if domain else None
    if name in BUILTIN_TARGETS and name != "table1":
        r = r or (1 if name == "identity" else 2)
    h = parse_target(name, r, domain, BOUNDED if cfg.extended else "unit_interval")
    if domain is None:
        if h.domain is not None:
            domain = h.domain
        elif name == "cosine_bump":
            domain = BoxDomain.cube(-2.0, 2.0, h.dimension)
        else:
            domain = BoxDomain.cube(0.0, 1.0, h.dimension)
    if h.on_whole_space and name != "cosine_bump" and cfg.kind != "quasi_max_min":
        # constants and expressions live on the requested box
        h = h.on(domain)
    out_of_unit = _check_range(h, domain, cfg.seed, cfg.extended)
    kind = cfg.kind or ("quasi_max_min" if h.on_whole_space else "max_min")
    if kind not in OPERATOR_KINDS:
        raise ConfigError(f"unknown operator kind {kind!r}")
    if cfg.extended and kind == "max_min":
        kind = "extended_max_min"
    if out_of_unit and kind in ("max_min", "quasi_max_min"):
        raise ConfigError(f"{kind} needs a target with values in [0, 1]")
    ns = _parse_ns(cfg.n)
    if kind != "quasi_max_min":
        for n in ns:
            build_lattice(n, domain)
    return Resolved(act, h.dimension, h, domain, ns, kind)


# commands


def _profile(res, cfg):
    return KernelProfile(res.act, res.profile_dim, cfg.tail_eps)


def _max_min_kind(res):
    return "extended_max_min" if res.kind == "extended_max_min" else "max_min"


def cmd_compare(cfg, res):
    if not res.ns:
        raise ConfigError("compare needs --n")
    if res.target.on_whole_space:
        raise ConfigError("compare runs the box operators; give a target with a box domain")
    prof = _profile(res, cfg)
    grid = cfg.grid or 151
    if res.kind == "extended_max_min":
        rows = []
        for n in res.ns:
            errs = []
            for kind in ("classical", "max_product", "extended_max_min"):
                f = evaluate_on_grid(kind, res.target, n, res.domain, prof, grid, cfg.full_lattice, cfg.threads)
                errs.append(sup_norm_error(f, res.target))
            rows.append((n, *errs))
        table = ErrorTable(rows, {"target": res.target.description, "grid": grid})
    else:
        table = compare_operators(res.target, res.ns, res.domain, prof, grid, cfg.threads, cfg.full_lattice)
    out = Path(cfg.out or "compare.csv")
    out.write_text(table.to_csv(), encoding="utf-8", newline="\n")
    print(table.format())
    print(f"wrote {out}", file=sys.stderr)
    return EXIT_OK


def cmd_surface(cfg, res):
    if len(res.ns) != 1:
        raise ConfigError("surface needs exactly one n")
    prof = _profile(res, cfg)
    f = evaluate_on_grid(
        res.kind, res.target, res.ns[0], res.domain, prof, cfg.grid or 101, cfg.full_lattice, cfg.threads
    )
    f.metadata["sup_error"] = sup_norm_error(f, res.target)
    out = Path(cfg.out or "surface.csv")
    meta = f.write(out)
    print(f"{res.kind} n={res.ns[0]} grid={f.shape} sup error {f.metadata['sup_error']:.6g}")
    print(f"wrote {out} and {meta}", file=sys.stderr)
    return EXIT_OK


def _write_rows(path, header, rows):
    lines = [",".join(header)] + [",".join(repr(float(x)) for x in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def cmd_kernel(cfg, res):
    act = res.act
    dom = BoxDomain.parse(cfg.domain) if cfg.domain else BoxDomain.cube(-4.0, 4.0, 2)
    a, b = dom.intervals[0]
    box = dom if dom.dimension == 2 else BoxDomain(((a, b), (a, b)))
    grid = cfg.grid or 81
    ys = np.linspace(a, b, 4 * (grid - 1) + 1)
    prefix = cfg.out or "kernel"
    phi_path, rho_path = Path(f"{prefix}_phi.csv"), Path(f"{prefix}_rho.csv")
    _write_rows(phi_path, ("y", "phi"), zip(ys, phi(act, ys)))
    ax = uniform_grid(box, grid)
    g1, g2 = np.meshgrid(*ax, indexing="ij")
    rho = phi(act, g1) * phi(act, g2)
    _write_rows(rho_path, ("y1", "y2", "rho"), zip(g1.ravel(), g2.ravel(), rho.ravel()))
    try:
        w = f"{truncation_radius(act, 2, cfg.tail_eps):.6g}"
    except KernelDecayError:
        w = "inf"
    print(f"activation {act.name}")
    print(f"phi(0) = {phi(act, 0.0)!r}")
    print(f"phi(1) = {phi(act, 1.0)!r}")
    print(f"rho max on grid = {float(rho.max())!r}")
    print(f"window half-width (r=2, eps={cfg.tail_eps:g}) = {w}")
    print(f"wrote {phi_path} and {rho_path}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(cfg, res):
    report = run_suite(res.act, cfg.seed, cfg.trials, None if cfg.tail_eps == 1e-15 else cfg.tail_eps)
    text = "\n".join(report.lines())
    print(text)
    if cfg.out:
        Path(cfg.out).write_text(text + "\n", encoding="utf-8", newline="\n")
    print("all properties pass" if report.passed else "property failures found")
    return EXIT_OK if report.passed else EXIT_PROPERTY


def _modulus_domain(res):
    if not res.target.on_whole_space:
        return res.domain
    # the modulus over R^r is estimated on a box twice as wide as the evaluation box
    lo, hi = res.domain.lower, res.domain.upper
    half = (hi - lo).max()
    mid = (lo + hi) / 2
    return BoxDomain(tuple((m - half, m + half) for m in mid))


def cmd_rates(cfg, res):
    if len(res.ns) < 3:
        raise ConfigError("rates needs at least three values of n")
    prof = _profile(res, cfg)
    rate = lipschitz_rate(cfg.alpha, cfg.beta)
    dexp = cfg.delta_exp if cfg.delta_exp is not None else rate.delta_exponent
    moment = absolute_moment(prof, cfg.alpha, 200 if prof.dimension <= 2 else 50)
    mod_dom = _modulus_domain(res)
    samples, violations = [], []
    lines = []
    for n in res.ns:
        f = evaluate_on_grid(res.kind, res.target, n, res.domain, prof, cfg.grid or 101, cfg.full_lattice, cfg.threads)
        err = sup_norm_error(f, res.target) + cfg.inject_error
        rep = jackson_bound(
            res.target, n, n**-dexp, cfg.alpha, prof, moment, mod_dom, cfg.beta, observed_error=err
        )
        samples.append((n, err))
        if rep.violated:
            violations.append(n)
        line = json.dumps(dict(asdict(rep), violated=rep.violated), sort_keys=True)
        lines.append(line)
        print(line)
    slope = empirical_order(samples)
    summary = {
        "empirical_order": slope,
        "predicted_rate": rate.rate,
        "moment": moment.value,
        "moment_resolution": moment.resolution,
        "violations": violations,
        "kind": res.kind,
    }
    lines.append(json.dumps(summary, sort_keys=True))
    print(lines[-1])
    if cfg.out:
        Path(cfg.out).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    for n in violations:
        print(f"bound violated at n={n}", file=sys.stderr)
    return EXIT_PROPERTY if violations else EXIT_OK


HANDLERS = {
    "compare": cmd_compare,
    "surface": cmd_surface,
    "kernel": cmd_kernel,
    "verify": cmd_verify,
    "rates": cmd_rates,
}

CONFIG_ERRORS = (
    ConfigError,
    ActivationParameterError,
    ExpressionError,
    LatticeError,
    RangeViolation,
    MomentInfiniteError,
)


def main(argv=None):
    try:
        cfg = load_config(sys.argv[1:] if argv is None else argv)
        res = resolve(cfg) if cfg.command != "kernel" else Resolved(
            parse_activation(cfg.activation), 2, None, None, [], "max_min"
        )
    except SystemExit as exc:  # argparse usage errors
        return EXIT_CONFIG if exc.code else EXIT_OK
    except (*CONFIG_ERRORS, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return HANDLERS[cfg.command](cfg, res)
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"error: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
