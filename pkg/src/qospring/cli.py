"""Command line: figure data as CSV, parameter sweeps, and the validation report.

    qospring figure --figure 1 --out fig1.csv
    qospring sweep --observable P0 --mu 0,0.1,0.3 --nbar 4,25 --out sweep.csv
    qospring validate --level quick

Set ``QOSPRING_THREADS`` to cap the BLAS thread pool.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from dataclasses import dataclass, fields, replace

import numpy as np

from . import backaction, dynamics
from .model import DEFAULT_EPS, SourceState, SpringParams, TimeGrid, TruncationError
from .oracle import DEFAULT_BASIS, MAX_BASIS

OBSERVABLES = ("P0", "P0_classical", "Vx", "Vp", "Vx_classical", "ReA", "ImA")

FIGURES = {
    1: dict(observable="P0", mu=0.1, nbar=4.0, tau_max=20.0, scaling=2 * math.pi),
    2: dict(observable="P0", mu=0.3, nbar=25.0, tau_max=30.0, scaling=2 * math.pi),
    3: dict(observable="Vx", mu=0.1, nbar=4.0, tau_max=20.0, scaling=2 * math.pi),
    4: dict(observable="Vx", mu=0.3, nbar=25.0, tau_max=30.0, scaling=2 * math.pi),
    5: dict(observable="ImA", mu=0.3, nbar=25.0, tau_max=1.0, scaling=16 * math.pi),
}


class ConfigError(ValueError):
    def __init__(self, name: str, message: str):
        super().__init__(f"--{name.replace('_', '-')}: {message}")
        self.field = name


@dataclass(frozen=True)
class RunConfig:
    mu: float = 0.1
    nbar: float = 4.0
    omega: float = 1.0
    tau_max: float = 20.0
    points: int = 2000
    scaling: float = 2 * math.pi
    basis_size: int = DEFAULT_BASIS
    eps: float = DEFAULT_EPS
    observable: str = "P0"
    mode: str = backaction.PARTIAL_TRACE
    out: str = "-"

    def __post_init__(self):
        checks = {
            "mu": (self.mu >= 0, "must be >= 0"),
            "nbar": (self.nbar >= 0, "must be >= 0"),
            "omega": (self.omega > 0, "must be > 0"),
            "tau_max": (self.tau_max > 0, "must be > 0"),
            "points": (self.points >= 1, "must be >= 1"),
            "scaling": (self.scaling > 0, "must be > 0"),
            "basis_size": (4 <= self.basis_size <= MAX_BASIS, f"must lie in [4, {MAX_BASIS}]"),
            "eps": (0 < self.eps < 1, "must lie in (0, 1)"),
            "observable": (self.observable in OBSERVABLES, f"must be one of {', '.join(OBSERVABLES)}"),
            "mode": (self.mode in backaction.MODES, f"must be one of {', '.join(backaction.MODES)}"),
        }
        for name, (ok, message) in checks.items():
            value = getattr(self, name)
            if isinstance(value, float) and not math.isfinite(value):
                ok = False
            if not ok:
                raise ConfigError(name, f"{message}, got {value!r}")

    def grid(self) -> TimeGrid:
        if self.points == 1:
            return TimeGrid(np.zeros(1), self.scaling)
        return TimeGrid.linspace(self.tau_max, self.points, self.scaling)


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def evaluate(cfg: RunConfig) -> np.ndarray:
    """Values of the configured observable on the configured grid."""
    params = SpringParams(cfg.mu, cfg.omega)
    t = cfg.grid().times(cfg.omega)
    if cfg.observable == "P0_classical":
        return dynamics.survival_classical(params, cfg.nbar, t)
    if cfg.observable == "Vx_classical":
        return dynamics.variance_x_classical(params, cfg.nbar, t)
    try:
        source = SourceState.from_nbar(cfg.nbar, eps=cfg.eps)
    except TruncationError as exc:
        raise ConfigError("nbar", str(exc)) from exc
    if cfg.observable == "P0":
        return dynamics.survival_probability(params, source, t)
    if cfg.observable == "Vx":
        return dynamics.variance_x(params, source, t)
    if cfg.observable == "Vp":
        return dynamics.variance_p(params, source, t)
    d = backaction.mean_displacement(params, source, t, mode=cfg.mode)
    return d.real if cfg.observable == "ReA" else d.imag


def metadata(cfg: RunConfig, **extra) -> str:
    items = dict(extra)
    for f in fields(cfg):
        if f.name in ("out", "basis_size"):
            continue
        value = getattr(cfg, f.name)
        items[f.name] = fmt(value) if isinstance(value, float) else value
    return "# " + " ".join(f"{k}={v}" for k, v in items.items())


def write_atomic(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


PLOT_TEMPLATE = '''"""Plot {csv} (generated by qospring)."""
import matplotlib.pyplot as plt
import numpy as np

tau, value = np.loadtxt({csv!r}, delimiter=",", comments="#", skiprows={skip}, unpack=True)
fig, ax = plt.subplots(figsize=(6, 3.5))
ax.plot(tau, value, lw=0.8)
ax.set_xlabel(r"$\\tau$  ($\\omega t = {scaling:.6g}\\,\\tau$)")
ax.set_ylabel({ylabel!r})
fig.tight_layout()
fig.savefig({png!r}, dpi=150)
'''

YLABELS = {"P0": "$P_0$", "P0_classical": "$P_{cl}$", "Vx": "$V_x$", "Vp": "$V_p$",
           "Vx_classical": "$V_x$ (classical)", "ReA": r"Re$\langle a\rangle$",
           "ImA": r"Im$\langle a\rangle$"}


def figure_csv(figure: int, overrides: dict) -> tuple[RunConfig, str]:
    base = dict(FIGURES[figure])
    cfg = replace(RunConfig(**base), **overrides)
    changed = sorted(k for k, v in overrides.items() if base.get(k, getattr(RunConfig, k)) != v)
    extra = {"figure": figure, "overrides": ",".join(changed) or "none"}
    if cfg.observable == "Vx":
        extra["classical_min"] = fmt(dynamics.variance_x_classical_min(SpringParams(cfg.mu, cfg.omega), cfg.nbar))
    values = evaluate(cfg)
    lines = [metadata(cfg, **extra), "tau,value"]
    lines += [f"{fmt(a)},{fmt(b)}" for a, b in zip(cfg.grid().tau, values)]
    return cfg, "\n".join(lines) + "\n"


def sweep_csv(base: RunConfig, mus, nbars) -> str:
    lines = [metadata(base, sweep_mu=",".join(map(fmt, mus)), sweep_nbar=",".join(map(fmt, nbars))),
             "mu,nbar,tau,value"]
    tau = base.grid().tau
    for mu in mus:
        for nbar in nbars:
            cfg = replace(base, mu=mu, nbar=nbar)
            values = evaluate(cfg)
            m, n = fmt(mu), fmt(nbar)
            lines += [f"{m},{n},{fmt(a)},{fmt(b)}" for a, b in zip(tau, values)]
    return "\n".join(lines) + "\n"


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("list must not be empty")
    return values


def _add_run_flags(p: argparse.ArgumentParser, with_params: bool = True):
    if with_params:
        p.add_argument("--mu", type=float)
        p.add_argument("--nbar", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--tau-max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--scaling", type=float, help="omega t = scaling * tau")
    p.add_argument("--eps", type=float, help="Poisson truncation tail")
    p.add_argument("--mode", choices=backaction.MODES, help="back-action reading of <a>")
    p.add_argument("--out", default="-", help="output CSV path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qospring", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure", help="write the data behind one figure")
    fig.add_argument("--figure", type=int, required=True, choices=sorted(FIGURES))
    _add_run_flags(fig)
    fig.add_argument("--plot-script", help="also write a matplotlib script to this path")

    sw = sub.add_parser("sweep", help="long-format sweep over mu and nbar")
    sw.add_argument("--observable", choices=OBSERVABLES, default="P0")
    sw.add_argument("--mu", type=_float_list, required=True)
    sw.add_argument("--nbar", type=_float_list, required=True)
    _add_run_flags(sw, with_params=False)

    val = sub.add_parser("validate", help="closed forms against the brute-force oracle")
    val.add_argument("--level", choices=("quick", "full"), default="quick")
    val.add_argument("--basis-size", type=int, help="oracle Fock basis size")
    return parser


def _overrides(args, names) -> dict:
    out = {}
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            out[name] = value
    return out


def _limit_threads():
    value = os.environ.get("QOSPRING_THREADS")
    if not value:
        return None
    from threadpoolctl import threadpool_limits
    return threadpool_limits(int(value))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _limit_threads()
    try:
        if args.command == "figure":
            overrides = _overrides(args, ("mu", "nbar", "omega", "tau_max", "points", "scaling", "eps", "mode"))
            cfg, text = figure_csv(args.figure, overrides)
            write_atomic(args.out, text)
            if args.plot_script:
                csv = args.out if args.out != "-" else "figure.csv"
                png = os.path.splitext(csv)[0] + ".png"
                write_atomic(args.plot_script, PLOT_TEMPLATE.format(
                    csv=csv, skip=1, scaling=cfg.scaling, ylabel=YLABELS[cfg.observable], png=png))
            return 0
        if args.command == "sweep":
            overrides = _overrides(args, ("omega", "tau_max", "points", "scaling", "eps", "mode"))
            base = RunConfig(observable=args.observable, **overrides)
            for name, values in (("mu", args.mu), ("nbar", args.nbar)):
                for v in values:
                    replace(base, **{name: v})
            write_atomic(args.out, sweep_csv(base, args.mu, args.nbar))
            return 0
        from .validation import report, timed_validation
        checks, elapsed = timed_validation(args.level, args.basis_size)
        print(report(checks, elapsed))
        return 0 if all(c.passed for c in checks) else 1
    except ConfigError as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"qospring: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
