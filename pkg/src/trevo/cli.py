"""Command-line front door.

Exit codes: 0 success (for `validate`: no error diagnostics), 1 validation
or query failure, 2 usage error (handled by click).  Diagnostics go to
standard error.
"""

from __future__ import annotations

import csv as csv_mod
import json
import os
import sys

import click

from . import api, patterns, summaries, synth
from .dataset import read_dataset, validate_dataset, write_dataset
from .errors import TrevoError


def _load(directory: str, strict: bool):
    try:
        return read_dataset(directory, strict=strict)
    except (TrevoError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@click.group()
def main():
    """Phylogenetic trait analytics: validate, rank, bin, simulate, serve."""


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--lenient", is_flag=True, help="Relax the leaf-known/internal-uncertain split.")
def validate(directory: str, lenient: bool):
    """Check a dataset directory; exit 0 iff no error diagnostics."""
    ds = _load(directory, strict=not lenient)
    diagnostics = validate_dataset(ds, strict=not lenient)
    for diag in diagnostics:
        click.echo(str(diag), err=True)
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        click.echo(f"{len(errors)} error(s)", err=True)
        sys.exit(1)
    click.echo(f"ok: {len(ds.tree.leaves)} leaves, {len(ds.trait_defs)} traits")


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--preset", default="convergence", show_default=True,
              type=click.Choice([p for p, _, _ in patterns.PRESETS]))
@click.option("--trait", default=None, help="Primary continuous trait (default: first).")
@click.option("--alpha", default=0.5, show_default=True)
@click.option("--min-distance", default=0.0, show_default=True)
@click.option("--top", default=20, show_default=True)
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "csv"]))
def rank(directory: str, preset: str, trait: str | None, alpha: float,
         min_distance: float, top: int, fmt: str):
    """Rank all leaf pairs under a preset pattern."""
    ds = _load(directory, strict=True)
    if trait is None:
        if not ds.continuous_traits:
            click.echo("error: dataset has no continuous trait", err=True)
            sys.exit(1)
        trait = ds.continuous_traits[0]
    query = patterns.preset_query(preset, trait)
    if alpha != 0.5 or min_distance != 0.0:
        from dataclasses import replace
        query = replace(query, alpha=alpha, min_distance=min_distance)
    try:
        ranked = patterns.score_all_pairs(ds, query)
    except TrevoError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    if fmt == "json":
        click.echo(json.dumps(api.rank_json(ds, ranked, trait, top), indent=2))
    else:
        shown = ranked[:top]
        writer = csv_mod.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["rank", "leaf_a", "leaf_b", "score", "distance_time",
                         "topo_edges", "delta", "closeness", "top_rank_frequency"])
        for rp in shown:
            writer.writerow([rp.rank, rp.leaf_a, rp.leaf_b, repr(rp.score),
                             repr(rp.metrics.distance_time), rp.metrics.topo_edges,
                             repr(rp.metrics.delta), repr(rp.metrics.closeness),
                             rp.top_rank_frequency])


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--selection-trait", default=None, help="Trait to filter leaves by.")
@click.option("--states", default=None, help="Comma-separated states (discrete trait).")
@click.option("--range", "value_range", default=None,
              help="lo:hi closed range (continuous trait).")
@click.option("--clade", default=None, help="Select a clade by node id instead.")
@click.option("--k", default=8, show_default=True)
@click.option("--traits", default=None, help="Comma-separated traits to summarize (default: all).")
@click.option("--format", "fmt", default="json", type=click.Choice(["json"]))
def bins(directory: str, selection_trait: str | None, states: str | None,
         value_range: str | None, clade: str | None, k: int,
         traits: str | None, fmt: str):
    """Bin a selection by time and print per-bin trait summaries."""
    ds = _load(directory, strict=True)
    try:
        if clade is not None:
            sel = summaries.select_clade(ds, clade)
        elif selection_trait is not None:
            rng = None
            if value_range is not None:
                lo, hi = value_range.split(":", 1)
                rng = (float(lo), float(hi))
            sel = summaries.select_by_trait(
                ds, selection_trait,
                states=set(states.split(",")) if states else None,
                value_range=rng,
            )
        else:
            sel = summaries.select_clade(ds, ds.tree.root)
        trait_list = traits.split(",") if traits else list(ds.traits.trait_names)
        binning = summaries.bin_by_time(ds, sel, k)
    except TrevoError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(json.dumps(api.bins_json(ds, binning, trait_list, seed=0), indent=2))


@main.command()
@click.option("--leaves", default=64, show_default=True)
@click.option("--traits", "n_traits", default=6, show_default=True)
@click.option("--sigma", default=1.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--inject-convergence", "inject", is_flag=True,
              help="Deform one pair from distinct root subtrees into a convergent pattern.")
@click.option("--inject-strength", default=0.9, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def simulate(leaves: int, n_traits: int, sigma: float, seed: int, inject: bool,
             inject_strength: float, out: str):
    """Write a deterministic synthetic dataset directory."""
    cfg = synth.SimConfig(
        n_leaves=leaves, n_traits=n_traits, sigma=sigma, seed=seed,
        inject=synth.InjectSpec(strength=inject_strength) if inject else None,
    )
    ds, pair = synth.make_dataset(cfg)
    meta = (
        f"synthetic dataset\nleaves={leaves} traits={n_traits} "
        f"sigma={sigma!r} seed={seed}\n"
    )
    if pair is not None:
        meta += f"injected_pair={pair[0]},{pair[1]} strength={inject_strength!r}\n"
    write_dataset(ds, out, meta=meta)
    click.echo(f"wrote {out}")
    if pair is not None:
        click.echo(f"injected pair: {pair[0]} {pair[1]}")


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--port", default=8080, show_default=True,
              help="Overridden by the TREVO_PORT environment variable.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static", "static_dir", default=None,
              type=click.Path(exists=True, file_okay=False),
              help="Directory with the UI bundle to serve at /.")
@click.option("--lenient", is_flag=True)
def serve(directory: str, port: int, host: str, static_dir: str | None, lenient: bool):
    """Serve the HTTP API (and optionally the UI bundle) for a dataset."""
    import uvicorn

    ds = _load(directory, strict=not lenient)
    port = int(os.environ.get("TREVO_PORT", port))
    app = api.create_app(ds, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
