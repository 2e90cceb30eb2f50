"""Command-line front end.

Index ranges are written ``lo:hi``, inclusive and 1-based. Series go out
as CSV with an ``i,value`` header; summaries and fits go out as JSON with
stable keys.
"""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from . import diffs, render, stats
from .config import CACHE_ENV_VAR, make_engine, resolve_config
from .diffs import DiffSpec
from .pips import PipSpec, pip_range

_CTX = {"help_option_names": ["--help"]}


def _parse_range(text: str) -> tuple[int, int]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise click.BadParameter(f"expected 'lo:hi' or 'n', got {text!r}") from None
    if lo > hi:
        raise click.BadParameter(f"empty range {text!r}")
    return lo, hi


def _jsonify(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _emit_json(payload) -> None:
    click.echo(json.dumps(payload, default=_jsonify))


def _emit_series(start: int, values, fmt: str) -> None:
    if fmt == "json":
        _emit_json([int(v) for v in values])
        return
    click.echo("i,value")
    for offset, v in enumerate(values):
        click.echo(f"{start + offset},{int(v)}")


def _run(fn):
    try:
        fn()
    except click.ClickException:
        raise
    except (ValueError, OverflowError, OSError) as exc:
        raise click.ClickException(str(exc)) from exc


@click.group(context_settings=_CTX)
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
              help="Config file with 'key = value' lines.")
@click.option("--cache", "cache_path", type=click.Path(dir_okay=False),
              help=f"Checkpoint cache path (or set {CACHE_ENV_VAR}).")
@click.option("--universe-bound", type=int, help="Largest prime value the engine may reach.")
@click.option("--segment-span", type=int, help="Maximum sieve segment width.")
@click.option("--checkpoint-stride", type=int, help="Primes between checkpoints.")
@click.option("--output-dir", type=click.Path(file_okay=False), help="Directory for output files.")
@click.option("--threads", type=int, help="Worker threads for cache building.")
@click.pass_context
def main(ctx, config_file, cache_path, universe_bound, segment_span,
         checkpoint_stride, output_dir, threads):
    """Prime-indexed primes, their finite differences, and gridplots."""
    ctx.obj = resolve_config(
        config_file=config_file,
        cache_path=cache_path,
        universe_bound=universe_bound,
        segment_span=segment_span,
        checkpoint_stride=checkpoint_stride,
        output_dir=output_dir,
        threads=threads,
    )


@main.command()
@click.option("--limit", type=int, required=True, help="Sieve primes up to this value.")
@click.option("--path", type=click.Path(dir_okay=False), default=None,
              help="Where to write the checkpoint file.")
@click.pass_obj
def cache(cfg, limit, path):
    """Build the checkpoint cache and print a JSON summary."""

    def go():
        target = path or cfg.cache_path or os.path.join(cfg.output_dir, "primes.pipc")
        engine = make_engine(cfg)
        summary = engine.build_cache(limit, target)
        _emit_json({
            "count": summary.count,
            "max": summary.max_prime,
            "checkpoints": summary.checkpoints,
            "stride": summary.stride,
            "path": summary.path,
        })

    _run(go)


@main.command(name="pip")
@click.option("-k", type=int, required=True, help="Prime-index order.")
@click.option("-s", type=int, default=0, help="Index-set shift.")
@click.option("-i", "irange", required=True, help="Index range lo:hi.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.pass_obj
def pip_cmd(cfg, k, s, irange, fmt):
    """Emit PIP values over an index range."""

    def go():
        lo, hi = _parse_range(irange)
        engine = make_engine(cfg)
        series = pip_range(engine, PipSpec(k=k, s=s), lo, hi)
        _emit_series(series.start, series.values, fmt)

    _run(go)


@main.command()
@click.option("-h", "spacing", type=int, default=1, help="Difference spacing.")
@click.option("-n", "order", type=int, default=2, help="Difference order.")
@click.option("-s", "shift", type=int, default=0, help="Index-set shift.")
@click.option("-k", type=int, required=True, help="Prime-index order.")
@click.option("-i", "irange", required=True, help="Index range lo:hi.")
@click.option("--filter", "filt", type=click.Choice(["none", "sign", "quant256"]),
              default="none")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.pass_obj
def daleth(cfg, spacing, order, shift, k, irange, filt, fmt):
    """Emit finite differences of a PIP sequence."""

    def go():
        lo, hi = _parse_range(irange)
        engine = make_engine(cfg)
        series = diffs.diff_range(
            engine, DiffSpec(h=spacing, n=order, s=shift, k=k), lo, hi
        )
        if filt == "sign":
            series = diffs.sign_filter(series)
        elif filt == "quant256":
            series = diffs.quantize256(series)
        _emit_series(series.start, series.values, fmt)

    _run(go)


@main.group(name="stats")
def stats_group():
    """Statistical analyses of differenced PIP sequences."""


def _spec_options(fn):
    fn = click.option("-h", "--h", "--spacing", "spacing", type=int, default=1,
                      help="Difference spacing.")(fn)
    fn = click.option("-n", "--n", "--order", "order", type=int, default=2,
                      help="Difference order.")(fn)
    fn = click.option("-s", "--s", "--shift", "shift", type=int, default=0,
                      help="Index-set shift.")(fn)
    return fn


@stats_group.command()
@_spec_options
@click.option("--k", "k", type=int, required=True, help="Prime-index order.")
@click.option("--T", "-T", "t_len", type=int, required=True, help="Sample length.")
@click.option("--w", type=int, required=True, help="Window width.")
@click.option("--y", type=int, required=True, help="Window step.")
@click.option("--filter", "filt", type=click.Choice(["none", "sign"]), default="none")
@click.pass_obj
def rolling(cfg, spacing, order, shift, k, t_len, w, y, filt):
    """Rolling mean and variance as CSV."""

    def go():
        engine = make_engine(cfg)
        series = diffs.diff_range(engine, DiffSpec(h=spacing, n=order, s=shift, k=k),
                                  1, t_len)
        if filt == "sign":
            series = diffs.sign_filter(series)
        moments = stats.rolling_moments(series, w=w, y=y)
        click.echo("i,mean,variance")
        for i, mu, var in moments.rows():
            click.echo(f"{i},{mu!r},{var!r}")

    _run(go)


@stats_group.command()
@_spec_options
@click.option("--k", "krange", required=True, help="Order range lo:hi.")
@click.option("--T", "-T", "t_len", type=int, required=True, help="Sample length.")
@click.pass_obj
def corr(cfg, spacing, order, shift, krange, t_len):
    """Pairwise correlation matrix as JSON."""

    def go():
        k_lo, k_hi = _parse_range(krange)
        engine = make_engine(cfg)
        ks = list(range(k_lo, k_hi + 1))
        specs = [DiffSpec(h=spacing, n=order, s=shift, k=k) for k in ks]
        matrix = stats.corr_matrix(engine, specs, t_len)
        _emit_json({"k": ks, "T": t_len, "matrix": matrix.tolist()})

    _run(go)


@stats_group.command()
@_spec_options
@click.option("--k", "k", type=int, required=True, help="Prime-index order.")
@click.option("--T", "-T", "t_len", type=int, required=True, help="Sample length.")
@click.option("--bin-width", type=float, default=1.0)
@click.option("--lo", type=float, required=True, help="Lower value bound.")
@click.option("--hi", type=float, required=True, help="Upper value bound.")
@click.option("--norm", type=click.Choice(["counts", "pdf"]), default="counts")
@click.pass_obj
def hist(cfg, spacing, order, shift, k, t_len, bin_width, lo, hi, norm):
    """Histogram of a differenced sequence as CSV."""

    def go():
        engine = make_engine(cfg)
        series = diffs.diff_range(engine, DiffSpec(h=spacing, n=order, s=shift, k=k),
                                  1, t_len)
        h = stats.histogram(series, bin_width=bin_width, lo=lo, hi=hi, normalization=norm)
        click.echo("center,count")
        for center, count in h.rows():
            click.echo(f"{center!r},{count!r}")

    _run(go)


@stats_group.command()
@_spec_options
@click.option("--k", "k", type=int, required=True, help="Prime-index order.")
@click.option("--T", "-T", "t_len", type=int, required=True, help="Sample length.")
@click.pass_obj
def laplace(cfg, spacing, order, shift, k, t_len):
    """Laplace fit (with a normal fit for comparison) as JSON."""

    def go():
        engine = make_engine(cfg)
        series = diffs.diff_range(engine, DiffSpec(h=spacing, n=order, s=shift, k=k),
                                  1, t_len)
        lap = stats.fit_laplace(series)
        gau = stats.fit_gaussian(series)
        _emit_json({"laplace": lap.as_dict(), "gaussian": gau.as_dict(),
                    "excess_kurtosis": stats.excess_kurtosis(series)})

    _run(go)


@stats_group.command()
@_spec_options
@click.option("--k", "krange", required=True, help="Order range lo:hi.")
@click.option("--T", "-T", "t_list", required=True,
              help="Sample length, single value or one per k (comma-separated).")
@click.option("--r2-space", type=click.Choice(["log", "linear"]), default="log")
@click.pass_obj
def zeros(cfg, spacing, order, shift, krange, t_list, r2_space):
    """Zero counts per k plus an exponential density fit, as JSON."""

    def go():
        k_lo, k_hi = _parse_range(krange)
        ks = list(range(k_lo, k_hi + 1))
        ts = [int(part) for part in t_list.split(",")]
        if len(ts) == 1:
            ts = ts * len(ks)
        if len(ts) != len(ks):
            raise click.ClickException("need one T per k (or a single T)")
        engine = make_engine(cfg)
        counts = [
            stats.count_zeros(engine, DiffSpec(h=spacing, n=order, s=shift, k=k), t)
            for k, t in zip(ks, ts)
        ]
        densities = [c / t for c, t in zip(counts, ts)]
        fit = stats.exponential_fit(ks, densities, r2_space=r2_space)
        _emit_json({"k": ks, "T": ts, "counts": counts, "densities": densities,
                    "fit": fit.as_dict()})

    _run(go)


@stats_group.command()
@_spec_options
@click.option("--imax", type=int, required=True, help="Number of rows to scan.")
@click.option("--k", "krange", required=True, help="Order range lo:hi.")
@click.pass_obj
def outliers(cfg, spacing, order, shift, imax, krange):
    """Sign-majority outlier census as JSON."""

    def go():
        k_lo, k_hi = _parse_range(krange)
        engine = make_engine(cfg)
        total, positions = stats.outlier_census(
            engine, imax, k_lo, k_hi, DiffSpec(h=spacing, n=order, s=shift, k=k_lo)
        )
        _emit_json({"total": total, "positions": [list(p) for p in positions]})

    _run(go)


@main.command(name="render")
@click.option("-h", "spacing", type=int, default=1, help="Difference spacing.")
@click.option("-n", "order", type=int, default=2, help="Difference order.")
@click.option("-s", "shift", type=int, default=0, help="Index-set shift.")
@click.option("-k", "krange", required=True, help="Order range lo:hi, one row per k.")
@click.option("-i", "irange", required=True, help="Index range lo:hi.")
@click.option("--style", type=click.Choice(["sign3", "jet256"]), default="sign3")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--band-width", type=int, default=1)
@click.option("--row-height", type=int, default=40)
@click.option("--gap", type=int, default=8)
@click.pass_obj
def render_cmd(cfg, spacing, order, shift, krange, irange, style, out,
               band_width, row_height, gap):
    """Render a gridplot to a PPM file; row metadata goes to stdout."""

    def go():
        k_lo, k_hi = _parse_range(krange)
        i_lo, i_hi = _parse_range(irange)
        engine = make_engine(cfg)
        rows = []
        for k in range(k_lo, k_hi + 1):
            pips = pip_range(engine, PipSpec(k=k, s=shift), i_lo, i_hi + order * spacing)
            values = diffs.finite_difference(pips.values, order, spacing)
            if style == "sign3":
                levels = np.sign(values)
            else:
                levels = diffs.quantize256(values)
            q_first = int(pips.values[0])
            q_last = int(pips.values[i_hi - i_lo])
            rows.append(render.GridRow(k=k, levels=levels, q_range=(q_first, q_last)))
        image = render.render_gridplot(rows, style=style, band_width=band_width,
                                       row_height=row_height, gap=gap)
        render.write_ppm(image, out)
        _emit_json({
            "path": out,
            "width": image.width,
            "height": image.height,
            "rows": [
                {"k": k, "q_first": qr[0], "q_last": qr[1]}
                for k, qr in image.meta
            ],
        })

    _run(go)


if __name__ == "__main__":
    main()
