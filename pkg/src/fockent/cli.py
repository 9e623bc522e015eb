"""Command-line harness: every command writes CSV/JSON outputs plus a manifest.json."""
from __future__ import annotations

import csv
import functools
import hashlib
import json
import math
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from importlib import metadata
from pathlib import Path

import click
import numpy as np
import scipy

from .analysis import symmetry_scan, wigner
from .devices import BeamSplitter, GeneralBilinear, TwoModeSqueezer, device_from_dict
from .entanglement import compare
from .errors import TruncationError
from .fock import rotate
from .search import SearchConfig, maximize_generated_entropy, minimize_generated_entropy
from .states import GeneralizedKL, HigherCat, generalized_kl_with_report, state_from_dict
from .verify import SUITES, fig2_family, kl_admissible, run_suite

EXIT_VALIDATION = 2
EXIT_TRUNCATION = 3
EXIT_VERIFY = 4

SWEEP_PARAMETERS = ("theta", "phi", "psi", "r", "delta_phi")


def _fmt(x) -> str:
    return "%.17g" % x


def _versions() -> str:
    try:
        own = metadata.version("fockent")
    except metadata.PackageNotFoundError:
        own = "unknown"
    return f"fockent {own}; numpy {np.__version__}; scipy {scipy.__version__}; python {platform.python_version()}"


def _config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _write_manifest(out: Path, command: str, config: dict, outputs: list[Path], t0: float, **extra) -> Path:
    manifest = {
        "command": command,
        "config_hash": _config_hash(config),
        "config": config,
        "versions": _versions(),
        "outputs": [str(p) for p in outputs],
        "wall_time_ms": int(round((time.perf_counter() - t0) * 1000)),
    }
    manifest.update(extra)
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, default=_json_default) + "\n")
    return path


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _load_config(config_path, inline: str | None) -> dict:
    if config_path and inline:
        raise click.UsageError("give either --config or an inline JSON argument, not both")
    try:
        if config_path:
            return json.loads(Path(config_path).read_text())
        if inline:
            return json.loads(inline)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc}") from None
    raise click.UsageError("a JSON config is required (--config FILE or inline argument)")


def _exit_codes(fn):
    """Map library errors onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except TruncationError as exc:
            click.echo(f"truncation error: {exc}", err=True)
            sys.exit(EXIT_TRUNCATION)
        except (ValueError, TypeError, KeyError, FileNotFoundError) as exc:
            click.echo(f"invalid input: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)

    return wrapper


def _common(fn):
    fn = click.option("--seed", type=int, default=0, show_default=True, help="RNG seed.")(fn)
    fn = click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True, help="Worker threads.")(fn)
    fn = click.option("--cutoff", type=click.IntRange(min=0), default=None, help="Override the Fock cutoff.")(fn)
    fn = click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".", show_default=True, help="Output directory.")(fn)
    fn = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON config file.")(fn)
    return fn


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


@click.group()
@click.version_option(package_name="fockent")
def main():
    """Two-mode Fock-space entanglement experiments."""


# ---------------------------------------------------------------------------


@main.command()
@click.argument("spec", required=False)
@_common
@_exit_codes
def state(spec, config_path, out_dir, cutoff, threads, seed):
    """Write the Fock amplitudes of a single-mode state as CSV (n, re, im, prob)."""
    t0 = time.perf_counter()
    cfg = _load_config(config_path, spec)
    psi = state_from_dict(cfg).build(cutoff)
    out = _outdir(out_dir)
    path = out / "amplitudes.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "re", "im", "prob"])
        for n, z in enumerate(psi.amps):
            w.writerow([n, _fmt(z.real), _fmt(z.imag), _fmt(abs(z) ** 2)])
    _write_manifest(out, "state", {"spec": cfg, "cutoff": cutoff}, [path], t0)
    click.echo(str(path))


# ---------------------------------------------------------------------------


def _sweep_point(device, psi_a, psi_b, parameter, value):
    if parameter == "delta_phi":
        # rotating mode b by delta/2 shifts its squeezing phase by delta
        psi_b = rotate(psi_b, value / 2.0)
    elif parameter in ("theta", "phi") and isinstance(device, BeamSplitter):
        device = replace(device, **{parameter: value})
    elif parameter == "r" and isinstance(device, (TwoModeSqueezer, GeneralBilinear)):
        device = replace(device, r=value)
    elif parameter == "psi":
        device = replace(device, psi=value)
    else:
        raise ValueError(f"parameter {parameter!r} does not apply to a {device.kind}")
    return compare(psi_a, psi_b, device, loss_tol=1e-6)


@main.command()
@_common
@_exit_codes
def sweep(config_path, out_dir, cutoff, threads, seed):
    """Exact vs second-order entropy along a one-parameter sweep.

    The config holds ``device``, ``state_a``, ``state_b`` and
    ``sweep = {parameter, start, stop, points}``; ``parameter`` is a device
    field (theta, phi, psi, r) or ``delta_phi``, an extra phase-space
    rotation of mode b by ``delta_phi / 2``.
    """
    t0 = time.perf_counter()
    cfg = _load_config(config_path, None)
    device = device_from_dict(cfg["device"])
    psi_a = state_from_dict(cfg["state_a"]).build(cutoff)
    psi_b = state_from_dict(cfg["state_b"]).build(cutoff)
    # both modes on a common cutoff
    dim = max(psi_a.cutoff, psi_b.cutoff)
    psi_a, psi_b = psi_a.resized(dim), psi_b.resized(dim)
    sw = cfg["sweep"]
    parameter = sw["parameter"]
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"sweep parameter must be one of {SWEEP_PARAMETERS}")
    points = int(sw["points"])
    if points < 1:
        raise ValueError("sweep needs at least one point")
    values = np.linspace(float(sw["start"]), float(sw["stop"]), points)

    def job(v):
        try:
            return _sweep_point(device, psi_a, psi_b, parameter, v)
        except TruncationError as exc:
            raise TruncationError(f"at {parameter} = {float(v)!r}: {exc}") from None

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(job, values))
    else:
        results = [job(v) for v in values]

    out = _outdir(out_dir)
    path = out / "sweep.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([parameter, "H_exact", "H_predicted", "ratio", "leaked_weight"])
        for v, r in zip(values, results):
            w.writerow([_fmt(v), _fmt(r.exact), _fmt(r.predicted_second_order),
                        _fmt(r.ratio_exact_over_strength_sq), _fmt(r.leaked_weight)])
    hs = [r.exact for r in results]
    _write_manifest(
        out, "sweep", {"config": cfg, "cutoff": cutoff}, [path], t0,
        argmin=float(values[int(np.argmin(hs))]), argmax=float(values[int(np.argmax(hs))]),
    )
    click.echo(str(path))


# ---------------------------------------------------------------------------


def _preset_states(preset: str):
    """``(tag, spec, symmetry order, leak tolerance)`` for the preset families."""
    if preset == "fig1":
        return [(f"cat_n{n}", HigherCat(5.0, n, tuple([0.0] * n)), n, None) for n in (2, 5, 8)]
    if preset == "fig2":
        out = []
        for k, l, eta in fig2_family():
            # k == l with |eta| = 1 is not normalizable; it is drawn truncated
            # at the given cutoff and its discarded weight is recorded
            tol = None if kl_admissible(k, l, eta) else 1.0
            out.append((f"kl_{k}_{l}_{eta:g}", GeneralizedKL(k, l, eta), k + l, tol))
        return out
    raise ValueError(f"unknown preset {preset!r}")


@main.command(name="wigner")
@click.argument("spec", required=False)
@click.option("--preset", type=click.Choice(["fig1", "fig2"]), default=None, help="Preset families: fig1 compass cats (alpha=5, n=2,5,8), fig2 generalized (k, l, eta) states.")
@click.option("--extent", type=float, default=None, help="Grid half-width (default from the state).")
@click.option("--points", type=click.IntRange(min=3), default=201, show_default=True)
@click.option("--symmetry", type=click.IntRange(min=1), default=None, help="Report the n-fold rotation deviation.")
@_common
@_exit_codes
def wigner_cmd(spec, preset, extent, points, symmetry, config_path, out_dir, cutoff, threads, seed):
    """Wigner grids as CSV (x, p, W) and binary (nx, ny, version header + doubles)."""
    t0 = time.perf_counter()
    if preset:
        if spec or config_path:
            raise click.UsageError("--preset replaces the state spec")
        jobs = _preset_states(preset)
        cfg = {"preset": preset}
    else:
        cfg = _load_config(config_path, spec)
        jobs = [("state", state_from_dict(cfg), symmetry, None)]
    default_cut = 120 if preset == "fig2" else None
    out = _outdir(out_dir)
    outputs, info = [], {}
    for tag, st, order, tol in jobs:
        cut = cutoff if cutoff is not None else (default_cut if tol is not None else None)
        if isinstance(st, GeneralizedKL) and tol is not None:
            psi, rep = generalized_kl_with_report(st.k, st.l, st.eta, st.seed, cut, leak_tol=tol)
            leaked = rep.leaked_weight
        else:
            psi = st.build(cut)
            leaked = 0.0
        grid = wigner(psi, extent, points)
        csv_path, bin_path = out / f"wigner_{tag}.csv", out / f"wigner_{tag}.bin"
        grid.to_csv(csv_path)
        grid.to_binary(bin_path)
        outputs += [csv_path, bin_path]
        entry = {
            "spec": st.to_dict(), "cutoff": psi.cutoff, "integral": grid.integral,
            "min": float(grid.values.min()), "max": float(grid.values.max()),
            "undersampled": grid.undersampled, "leaked_weight": leaked,
        }
        if order:
            entry["symmetry_order"] = order
            entry["symmetry_deviation"] = symmetry_scan(psi, order, grid.x_values.max(), min(points, 101))
        info[tag] = entry
    _write_manifest(out, "wigner", {"config": cfg, "cutoff": cutoff, "extent": extent, "points": points}, outputs, t0, grids=info)
    for p in outputs:
        click.echo(str(p))


# ---------------------------------------------------------------------------


@main.command()
@click.argument("suite", type=click.Choice(sorted(SUITES)))
@_common
def verify(suite, config_path, out_dir, cutoff, threads, seed):
    """Run an acceptance suite; exit 4 if any check fails."""
    t0 = time.perf_counter()
    results = run_suite(suite, threads=threads)
    for r in results:
        click.echo(r.line())
    out = _outdir(out_dir)
    path = out / f"verify_{suite}.json"
    report = {"suite": suite, "passed": all(r.passed for r in results), "checks": [r.to_dict() for r in results]}
    path.write_text(json.dumps(report, indent=2, default=_json_default) + "\n")
    _write_manifest(out, "verify", {"suite": suite}, [path], t0)
    if not report["passed"]:
        sys.exit(EXIT_VERIFY)


# ---------------------------------------------------------------------------


@main.command()
@click.option("--mode", type=click.Choice(["max", "min"]), default="max", show_default=True)
@_common
@_exit_codes
def search(mode, config_path, out_dir, cutoff, threads, seed):
    """Extremize the second-order entropy over product inputs at fixed N.

    Config fields: ``N``, ``cutoff``, ``device``, ``restarts``, ``max_iters``,
    ``step_tolerance``. ``--cutoff``, ``--seed`` and ``--threads`` override
    the file.
    """
    t0 = time.perf_counter()
    cfg = _load_config(config_path, None)
    cfg = dict(cfg, seed=seed, threads=threads)
    if cutoff is not None:
        cfg["cutoff"] = cutoff
    if "cutoff" not in cfg:
        cfg["cutoff"] = int(math.ceil(cfg.get("N", 0))) + 12
    config = SearchConfig.from_dict(cfg)
    run = maximize_generated_entropy if mode == "max" else minimize_generated_entropy
    result = run(config)
    out = _outdir(out_dir)
    path = out / f"search_{mode}.json"
    body = {"config": config.to_dict(), "mode": mode, "result": result.to_dict()}
    body["result"]["best_value_over_strength_sq"] = result.best_value / config.device.strength**2
    path.write_text(json.dumps(body, indent=2, default=_json_default) + "\n")
    # thread count does not change results, so it stays out of the hash
    hashed = {k: v for k, v in config.to_dict().items() if k != "threads"}
    _write_manifest(out, "search", {"config": hashed, "mode": mode}, [path], t0)
    click.echo(f"best value / strength^2 = {body['result']['best_value_over_strength_sq']:.10g}")


if __name__ == "__main__":
    main()
