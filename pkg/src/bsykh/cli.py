"""Command-line front end.

Subcommands: twopoint, spectral, sff, otoc, chaos-scan, mc, verify.
All rates are reported in units of gamma0 and times in units of 1/gamma0,
matching the natural axes of the model.  A config file (UTF-8 lines
``key = value``, ``#`` comments, keys named like the long flags) may supply
any option; command-line flags override it.

Exit codes: 0 success, 2 usage error, 3 compute failure, 4 I/O failure.
"""

import argparse
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__, chaos, montecarlo, sff, svgplot, tables, twopoint, verify
from .models import ModelParams

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COMPUTE = 3
EXIT_IO = 4

COMMANDS = ("twopoint", "spectral", "sff", "otoc", "chaos-scan", "mc", "verify")
MULTI_U_COMMANDS = ("twopoint", "spectral")


@dataclass(frozen=True)
class RunConfig:
    command: str
    gamma0: float = 1.0
    q: tuple = (4,)
    u_over_gamma0: tuple = (1.0,)
    t_max: float = 10.0
    points: int = 401
    omega_max: float = 8.0
    u_max: float = 6.0
    u_points: int = 121
    dt: float = 0.0          # 0 selects an automatic step
    n_sites: int = 4
    n_samples: int = 64
    master_seed: int = 12345
    output: str = ""
    format: str = "csv"
    plot: bool = False


def runconfig_to_meta(cfg: RunConfig) -> dict:
    meta = asdict(cfg)
    meta["q"] = list(cfg.q)
    meta["u_over_gamma0"] = list(cfg.u_over_gamma0)
    meta["version"] = __version__
    return meta


def runconfig_from_meta(meta: dict) -> RunConfig:
    names = {f.name for f in fields(RunConfig)}
    kw = {k: v for k, v in meta.items() if k in names}
    kw["q"] = tuple(kw["q"])
    kw["u_over_gamma0"] = tuple(kw["u_over_gamma0"])
    return RunConfig(**kw)


def _int_list(text):
    try:
        return tuple(int(tok) for tok in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _float_list(text):
    try:
        return tuple(float(tok) for tok in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}")


def _build_parser():
    p = argparse.ArgumentParser(
        prog="bsykh",
        description="Brownian SYK-Hubbard model: two-point function, spectrum, "
                    "spectral form factor, OTOC growth, and a finite-N Monte-Carlo "
                    "oracle.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", default=None, metavar="FILE",
                   help="key = value option file; command line overrides it")
    p.add_argument("--gamma0", type=float, default=None,
                   help="decay-rate unit (default 1.0); J = gamma0 * 2^(q-1)")
    p.add_argument("--q", type=_int_list, default=None,
                   help="body count (comma list allowed for chaos-scan), default 4")
    p.add_argument("--u-over-gamma0", type=_float_list, default=None,
                   help="Hubbard strength in units of gamma0; comma list allowed "
                        "for twopoint/spectral (default 1)")
    p.add_argument("--t-max", type=float, default=None,
                   help="time/T range in units of 1/gamma0 (default 10)")
    p.add_argument("--points", type=int, default=None,
                   help="grid point count (default 401)")
    p.add_argument("--omega-max", type=float, default=None,
                   help="spectral grid half-width in units of gamma0 (default 8)")
    p.add_argument("--u-max", type=float, default=None,
                   help="chaos-scan U/gamma0 upper limit (default 6)")
    p.add_argument("--u-points", type=int, default=None,
                   help="chaos-scan grid count (default 121)")
    p.add_argument("--dt", type=float, default=None,
                   help="step for otoc/mc in units of 1/gamma0 (default: automatic)")
    p.add_argument("--n-sites", type=int, default=None, help="mc sites N (default 4)")
    p.add_argument("--n-samples", type=int, default=None,
                   help="mc disorder samples (default 64)")
    p.add_argument("--seed", dest="master_seed", type=int, default=None,
                   help="mc master seed (default 12345)")
    p.add_argument("--output", default=None, help="output file (default <command>.<format>)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--plot", action="store_true", default=None,
                   help="also write an SVG plot next to the output file")
    return p


_CONFIG_KEYS = {
    "gamma0": float, "q": _int_list, "u-over-gamma0": _float_list,
    "t-max": float, "points": int, "omega-max": float, "u-max": float,
    "u-points": int, "dt": float, "n-sites": int, "n-samples": int,
    "seed": int, "output": str, "format": str, "plot": lambda s: s.lower() == "true",
}
_CONFIG_DEST = {
    "u-over-gamma0": "u_over_gamma0", "t-max": "t_max", "omega-max": "omega_max",
    "u-max": "u_max", "u-points": "u_points", "n-sites": "n_sites",
    "n-samples": "n_samples", "seed": "master_seed",
}


def _load_config_file(path):
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, val = line.partition("=")
            key = key.strip().replace("_", "-")
            val = val.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown option {key!r}")
            values[_CONFIG_DEST.get(key, key)] = _CONFIG_KEYS[key](val)
    return values


def parse_args(argv) -> RunConfig:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    settings = {}
    if ns.config is not None:
        try:
            settings.update(_load_config_file(ns.config))
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        cli_val = getattr(ns, f.name, None)
        if cli_val is not None:
            settings[f.name] = cli_val
    cfg = RunConfig(command=ns.command, **settings)
    _validate(cfg, parser)
    return cfg


def _validate(cfg, parser):
    if cfg.points < 2 or cfg.u_points < 2:
        parser.error(f"grid counts must be >= 2 (points={cfg.points}, "
                     f"u-points={cfg.u_points})")
    for name in ("gamma0", "t_max", "omega_max", "u_max"):
        v = getattr(cfg, name)
        if not np.isfinite(v) or v <= 0:
            parser.error(f"--{name.replace('_', '-')} must be positive and finite, got {v}")
    if any(q < 2 for q in cfg.q):
        parser.error(f"--q values must be >= 2, got {cfg.q}")
    if any(u < 0 for u in cfg.u_over_gamma0):
        parser.error(f"--u-over-gamma0 must be nonnegative, got {cfg.u_over_gamma0}")
    if cfg.command != "chaos-scan" and len(cfg.q) != 1:
        parser.error(f"--q accepts a list only for chaos-scan, got {cfg.q}")
    if cfg.command not in MULTI_U_COMMANDS and len(cfg.u_over_gamma0) != 1:
        parser.error(f"--u-over-gamma0 accepts a list only for "
                     f"{'/'.join(MULTI_U_COMMANDS)}, got {cfg.u_over_gamma0}")


def _output_paths(cfg):
    out = cfg.output or f"{cfg.command}.{cfg.format}"
    base, _ = os.path.splitext(out)
    return out, base + ".svg"


def _check_writable(path):
    parent = os.path.dirname(os.path.abspath(path)) or "."
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise OSError(f"output directory not writable: {parent}")
    if os.path.exists(path) and not os.access(path, os.W_OK):
        raise OSError(f"output file not writable: {path}")


def _params(cfg, q=None, u=None):
    return ModelParams.with_gamma0(cfg.gamma0,
                                   int(q if q is not None else cfg.q[0]),
                                   float(u if u is not None else cfg.u_over_gamma0[0]))


def _suffix(u, multi):
    return f"_u{u:g}" if multi else ""


def _run_twopoint(cfg):
    g0 = cfg.gamma0
    tg = np.linspace(0.0, cfg.t_max, cfg.points)
    columns = {"t_gamma0": tg}
    curves = []
    multi = len(cfg.u_over_gamma0) > 1
    for u in cfg.u_over_gamma0:
        p = _params(cfg, u=u)
        closed = twopoint.greens_closed(p, tg / g0)
        numeric = np.array([twopoint.greens_numeric(p, float(t)) for t in tg / g0])
        s = _suffix(u, multi)
        columns[f"g_numeric{s}"] = numeric
        columns[f"g_closed{s}"] = closed
        columns[f"abs_diff{s}"] = np.abs(numeric - closed)
        curves.append((f"U/gamma0 = {u:g}", tg, numeric))
    plot = ("gamma0 t", "G(t)", "two-point function", curves, ())
    return columns, {}, plot


def _run_spectral(cfg):
    g0 = cfg.gamma0
    wg = np.linspace(-cfg.omega_max, cfg.omega_max, cfg.points)
    columns = {"omega_over_gamma0": wg}
    curves = []
    multi = len(cfg.u_over_gamma0) > 1
    for u in cfg.u_over_gamma0:
        p = _params(cfg, u=u)
        closed = g0 * twopoint.spectral_closed(p, wg * g0)
        numeric = np.array([g0 * twopoint.spectral_numeric(p, float(w)) for w in wg * g0])
        s = _suffix(u, multi)
        columns[f"rho_gamma0_numeric{s}"] = numeric
        columns[f"rho_gamma0_closed{s}"] = closed
        columns[f"abs_diff{s}"] = np.abs(numeric - closed)
        curves.append((f"U/gamma0 = {u:g}", wg, closed))
    plot = ("omega / gamma0", "rho * gamma0", "spectral function", curves, ())
    return columns, {}, plot


def _run_sff(cfg):
    g0 = cfg.gamma0
    tg = np.linspace(0.0, cfg.t_max, cfg.points)
    p = _params(cfg)
    results = [sff.maximize_sff(p, float(t) / g0) for t in tg]
    columns = {
        "T_gamma0": tg,
        "ln_sff_over_n": [r.value for r in results],
        "lambda_star_over_gamma0": [r.lambda_star / g0 for r in results],
        "g_star": [r.g_star for r in results],
        "saddle_label": [r.saddle_label for r in results],
    }
    curves = [(f"U/gamma0 = {cfg.u_over_gamma0[0]:g}", tg,
               np.array([r.value for r in results]))]
    plot = ("gamma0 T", "ln SFF / N", "spectral form factor", curves, ())
    return columns, {}, plot


def _run_otoc(cfg):
    g0 = cfg.gamma0
    p = _params(cfg)
    kappa = chaos.lyapunov(p)
    tb = chaos.branching_time(p)
    gamma, _ = twopoint.decay_and_frequency(p)
    dt = cfg.dt / g0 if cfg.dt > 0 else 0.01 / max(g0, p.U, kappa)
    t, out = chaos.otoc_volterra_matrix(p, cfg.t_max / g0, dt)
    total = out[:, 0, :].sum(axis=1)
    columns = {
        "t_gamma0": t * g0,
        "otoc_flavor_sum": total,
        "otoc_00": out[:, 0, 0],
    }
    meta = {"kappa_over_gamma0": kappa / g0, "t_branch_gamma0": tb * g0,
            "bound_product": tb * (kappa + gamma), "dt_gamma0": dt * g0}
    grow = total > 0
    curves = [(f"U/gamma0 = {cfg.u_over_gamma0[0]:g}", t[grow] * g0,
               np.log(total[grow]))]
    plot = ("gamma0 t", "ln OTOC", "flavor-summed OTOC", curves, ())
    return columns, meta, plot


def _run_chaos_scan(cfg):
    du = cfg.u_max / cfg.u_points
    u_grid = np.linspace(du, cfg.u_max, cfg.u_points)
    scan = chaos.scan_chaos(cfg.q, u_grid, gamma0=cfg.gamma0)
    columns = {
        "q": [r.q for r in scan.results],
        "u_over_gamma0": [r.u_over_gamma0 for r in scan.results],
        "kappa_over_gamma0": [r.kappa / cfg.gamma0 for r in scan.results],
        "t_branch_gamma0": [r.t_branch * cfg.gamma0 for r in scan.results],
        "bound_product": [r.bound_product for r in scan.results],
    }
    meta = {
        "peak_by_q": {str(q): list(v) for q, v in sorted(scan.peak_by_q.items())},
        "n_failures": len(scan.failures),
    }
    curves = []
    for q in cfg.q:
        pts = [(r.u_over_gamma0, r.bound_product) for r in scan.results if r.q == q]
        if pts:
            xs, ys = zip(*pts)
            curves.append((f"q = {q}", np.array(xs), np.array(ys)))
    plot = ("U / gamma0", "t_B (kappa + Gamma)", "branching-time bound", curves, (2.0,))
    return columns, meta, plot


def _run_mc(cfg):
    g0 = cfg.gamma0
    q = int(cfg.q[0])
    j = g0 * 2.0 ** (q - 1)
    u = cfg.u_over_gamma0[0] * g0
    dt = cfg.dt / g0 if cfg.dt > 0 else 0.05 / max(j, u)
    mc_cfg = montecarlo.McConfig(n_sites=cfg.n_sites, q=q, J=j, U=u, dt=dt,
                                 t_max=cfg.t_max / g0, n_samples=cfg.n_samples,
                                 master_seed=cfg.master_seed)
    est = montecarlo.greens_mc(mc_cfg)
    p = _params(cfg)
    closed = twopoint.greens_closed(p, est.t_grid)
    columns = {
        "t_gamma0": est.t_grid * g0,
        "g_mc": est.mean,
        "g_std_error": est.std_error,
        "g_closed": closed,
        "abs_diff": np.abs(est.mean - closed),
    }
    meta = {"mc_dt_gamma0": dt * g0, "mc_n_steps": mc_cfg.n_steps,
            "hilbert_dim": mc_cfg.dim}
    curves = [("disorder mean", est.t_grid * g0, est.mean),
              ("closed form", est.t_grid * g0, closed)]
    plot = ("gamma0 t", "G(t)", f"Monte-Carlo oracle, N = {cfg.n_sites}", curves, ())
    return columns, meta, plot


_RUNNERS = {
    "twopoint": _run_twopoint,
    "spectral": _run_spectral,
    "sff": _run_sff,
    "otoc": _run_otoc,
    "chaos-scan": _run_chaos_scan,
    "mc": _run_mc,
}


def _run_verify(out=sys.stdout):
    report = verify.run_all()
    failed = 0
    for name, ok, detail in report:
        if ok:
            out.write(f"ok   {name}\n")
        else:
            failed += 1
            out.write(f"FAIL {name}: {detail}\n")
    out.write(f"verify: {len(report)} checks, {failed} failed\n")
    return EXIT_OK if failed == 0 else EXIT_COMPUTE


def main(argv=None) -> int:
    cfg = parse_args(argv)
    if cfg.command == "verify":
        return _run_verify()
    out_path, svg_path = _output_paths(cfg)
    try:
        _check_writable(out_path)
        if cfg.plot:
            _check_writable(svg_path)
    except OSError as exc:
        print(f"bsykh: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        columns, meta_extra, plot = _RUNNERS[cfg.command](cfg)
    except Exception as exc:
        print(f"bsykh: compute failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    meta = runconfig_to_meta(cfg)
    meta.update(meta_extra)
    try:
        if cfg.format == "csv":
            tables.write_csv(out_path, columns)
        else:
            tables.write_json(out_path, meta, columns)
        if cfg.plot:
            xlabel, ylabel, title, curves, hlines = plot
            svgplot.line_plot(svg_path, curves, xlabel, ylabel, title, hlines)
    except OSError as exc:
        print(f"bsykh: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
