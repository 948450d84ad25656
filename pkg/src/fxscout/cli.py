"""Command-line front door for corpus operations, search, and the service.

Exit codes: 0 success, 1 IO error, 2 validation/usage error, 3 property
failure (eval-metric found violations). Output is plain uncolored text, so
NO_COLOR is honored by construction.
"""

from __future__ import annotations

import json
import sys
import time

import click
import numpy as np

from .config import EngineConfig, load_config
from .corpus import (FAMILIES, IngestionError, build_index,
                     consistency_report, generate_synthetic_corpus,
                     load_index, save_index)
from .effects import ValidationError, read_corpus, write_corpus
from .kinematics import Kinematics
from .metrics import MetricParams, kinematic_distance
from .search import SearchConstraint, search_topk
from .semantics import describe, make_providers


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_index_or_die(path):
    try:
        return load_index(path)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(1, f"cannot read index: {exc}")
    except IngestionError as exc:
        _fail(2, str(exc))


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Engine config file (JSON); FXSCOUT_CONFIG also works.")
@click.pass_context
def main(ctx, config_path):
    """Particle effect exploration engine."""
    try:
        ctx.obj = load_config(config_path)
    except (OSError, ValueError) as exc:
        _fail(2, f"bad config: {exc}")


@main.group()
def corpus():
    """Corpus generation, indexing, and statistics."""


@corpus.command("generate")
@click.option("--families", default=",".join(sorted(FAMILIES)),
              show_default=True, help="Comma-separated family names.")
@click.option("--size", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
def corpus_generate(families, size, seed, out_path):
    """Write a synthetic corpus as JSON lines."""
    try:
        defs = generate_synthetic_corpus(
            [f.strip() for f in families.split(",") if f.strip()],
            size, seed)
    except IngestionError as exc:
        _fail(2, str(exc))
    try:
        write_corpus(defs, out_path)
    except OSError as exc:
        _fail(1, str(exc))
    click.echo(f"wrote {len(defs)} effects to {out_path}")


@corpus.command("build-index")
@click.option("--in", "in_path", type=click.Path(), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--alpha", type=float, default=None,
              help="Duration-factor weight override.")
@click.option("--sigma", default="auto", show_default=True,
              help="'auto' (median pairwise distance) or a number.")
@click.pass_obj
def corpus_build_index(config: EngineConfig, in_path, out_path, alpha, sigma):
    """Build a search index (kinematics + embeddings + sigma)."""
    if alpha is not None:
        config = config.replace(alpha=alpha)
    if sigma != "auto":
        try:
            config = config.replace(sigma=float(sigma))
        except ValueError:
            _fail(2, "--sigma must be 'auto' or a number")
    try:
        defs = read_corpus(in_path)
    except OSError as exc:
        _fail(1, str(exc))
    except (ValueError, ValidationError) as exc:
        _fail(2, str(exc))
    try:
        index = build_index(defs, make_providers(config), config)
        save_index(index, out_path)
    except IngestionError as exc:
        _fail(2, str(exc))
    except OSError as exc:
        _fail(1, str(exc))
    for effect_id, message in index.errors:
        click.echo(f"skipped {effect_id}: {message}", err=True)
    click.echo(f"indexed {len(index.ids)} effects "
               f"(sigma={index.sigma:.6f}) to {out_path}")


@corpus.command("stats")
@click.option("--index", "index_path", type=click.Path(), required=True)
def corpus_stats(index_path):
    """Tab-separated consistency table per theme."""
    index = _load_index_or_die(index_path)
    click.echo("scope\ttheme\tcount\tduration\tshape\ttrail")
    for row in consistency_report(index):
        click.echo(f"{row['scope']}\t{row['theme']}\t{row['count']}\t"
                   f"{row['duration']:.6f}\t{row['shape']:.6f}\t"
                   f"{row['trail']:.6f}")


def _format_transformation(t) -> str:
    return (f"{t.axis_reorientation} scale={t.scale:.6f} "
            f"duration_scale={t.duration_scale:.6f}")


@main.command("search")
@click.option("--index", "index_path", type=click.Path(), required=True)
@click.option("--text", default=None)
@click.option("--kinematics-file", type=click.Path(), default=None,
              help="JSON file holding a kinematics document.")
@click.option("--weight", "-w", type=float, default=0.5, show_default=True)
@click.option("--k", type=int, default=None,
              help="Result count (defaults to the configured top_k).")
@click.option("--format", "fmt", type=click.Choice(["text", "json-lines"]),
              default="text", show_default=True)
@click.pass_obj
def cmd_search(config: EngineConfig, index_path, text, kinematics_file,
               weight, k, fmt):
    """One-shot top-k search against an index."""
    if text is None and kinematics_file is None:
        _fail(2, "need --text and/or --kinematics-file")
    if not 0.0 <= weight <= 1.0:
        _fail(2, "--weight must lie in [0, 1]")
    index = _load_index_or_die(index_path)
    llm, embedder = make_providers(config)
    kinematics = None
    if kinematics_file is not None:
        try:
            with open(kinematics_file, encoding="utf-8") as fh:
                kinematics = Kinematics.from_dict(json.load(fh))
        except OSError as exc:
            _fail(1, str(exc))
        except (ValueError, KeyError) as exc:
            _fail(2, f"bad kinematics file: {exc}")
    try:
        semantic = describe(text, llm, embedder) if text else None
        constraint = SearchConstraint(semantic=semantic,
                                      kinematics=kinematics, w=weight)
        results = search_topk(constraint, index, k, config=config)
    except ValueError as exc:
        _fail(2, str(exc))
    for rank, r in enumerate(results, start=1):
        if fmt == "json-lines":
            click.echo(json.dumps({"rank": rank, **r.to_dict()},
                                  sort_keys=True))
        else:
            click.echo(f"{rank}\t{r.effect_id}\t{r.similarity:.6f}\t"
                       f"{_format_transformation(r.best_transformation)}")


@main.command("eval-metric")
@click.option("--index", "index_path", type=click.Path(), required=True)
@click.option("--pairs", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_obj
def cmd_eval_metric(config: EngineConfig, index_path, pairs, seed):
    """Check metric properties on random pairs; exit 3 on violations.

    The report on stdout is deterministic for a fixed seed; wall-clock
    timings go to stderr.
    """
    index = _load_index_or_die(index_path)
    if len(index.ids) < 2:
        _fail(2, "index needs at least 2 effects")
    params = MetricParams.from_config(config, sigma=index.sigma)
    rng = np.random.default_rng(seed)
    violations = 0
    timings = []
    for _ in range(pairs):
        a, b = rng.choice(len(index.ids), size=2, replace=False)
        ka = index.entries[index.ids[a]].representation.kinematics
        kb = index.entries[index.ids[b]].representation.kinematics
        start = time.perf_counter()
        d_ab = kinematic_distance(ka, kb, params)
        timings.append((time.perf_counter() - start) * 1000.0)
        d_ba = kinematic_distance(kb, ka, params)
        if d_ab < 0 or d_ba < 0:
            violations += 1
        if abs(d_ab - d_ba) > 1e-9 * max(1.0, d_ab):
            violations += 1
        if kinematic_distance(ka, ka, params) > 1e-9:
            violations += 1
    click.echo(f"pairs: {pairs}")
    click.echo(f"violations: {violations}")
    p50, p90 = np.percentile(timings, [50, 90])
    click.echo(f"timing p50: {p50:.2f} ms, p90: {p90:.2f} ms", err=True)
    if violations:
        sys.exit(3)


@main.command("serve")
@click.option("--index", "index_path", type=click.Path(), required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.pass_obj
def cmd_serve(config: EngineConfig, index_path, host, port):
    """Run the HTTP session service."""
    import uvicorn

    from .service import create_app

    index = _load_index_or_die(index_path)
    app = create_app(index, make_providers(config), config)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
