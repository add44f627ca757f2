"""Command-line pipeline: generate, score, revise, analyze, correlate, guidance-demo.

Every command is a pure function of (inputs, flags, seed) and emits a
`<output>.manifest.json` recording flags and content hashes. Exit codes:
0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import io
from .boxes import PostProcessConfig, post_process
from .generate import ConfigError, GeneratorConfig, benchmark_stats, build_benchmark
from .guidance import GuidanceError, GuidanceSpec, ToyDenoiser, toy_denoise_loop
from .revise import build_enforce_pair, diagnose
from .scene import SceneError
from .scoring import evaluate
from .stats import (
    GROUP_KEYS,
    StatsError,
    group_scores,
    kendall_tau,
    krippendorff_alpha,
    pearson,
    relation_direction_accuracy,
    spearman,
)
from .template import TemplateError
from .vocab import CompatibilityTable, VocabError, default_table

DATA_ERRORS = (
    io.FormatError,
    SceneError,
    VocabError,
    TemplateError,
    StatsError,
    GuidanceError,
    ValueError,
    OSError,
)


@click.group()
def cli():
    """Structured-scene benchmark generation and alignment scoring."""


def _load_table(path):
    return CompatibilityTable.from_file(path) if path else default_table()


@cli.command()
@click.option("--count", type=int, required=True, help="Number of benchmark entries.")
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed.")
@click.option("--relation-probability", "-p", type=float, default=0.05, show_default=True)
@click.option("--max-instances", type=int, default=5, show_default=True)
@click.option("--max-relations", type=int, default=6, show_default=True)
@click.option("--max-categories", type=int, default=5, show_default=True)
@click.option("--compat-table", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--output", "-o", type=click.Path(dir_okay=False), required=True)
@click.option("--stats/--no-stats", default=True, show_default=True)
def generate(count, seed, relation_probability, max_instances, max_relations, max_categories,
             compat_table, output, stats):
    """Build a benchmark file of seeded structured scenes and prompts."""
    if count < 1:
        raise click.UsageError(f"--count must be >= 1, got {count}")
    try:
        config = GeneratorConfig(
            relation_probability=relation_probability,
            max_instances=max_instances,
            max_relations=max_relations,
            max_categories=max_categories,
            table=_load_table(compat_table),
        )
    except ConfigError as exc:
        raise click.UsageError(str(exc))
    entries = build_benchmark(config, count, seed)
    io.write_benchmark(output, entries)
    io.write_manifest(
        output,
        "generate",
        {
            "count": count, "seed": seed, "relation_probability": relation_probability,
            "max_instances": max_instances, "max_relations": max_relations,
            "max_categories": max_categories, "compat_table": compat_table,
        },
        [compat_table] if compat_table else [],
    )
    if stats:
        s = benchmark_stats(entries)
        click.echo(json.dumps({
            "entries": s.size,
            "total_instances": s.total_instances,
            "category_counts": s.category_counts,
            "relation_counts": s.relation_counts,
            "max_same_category": s.max_same_category,
        }))


def _post_cfg(confidence, dedup_iou, min_side, offset):
    return PostProcessConfig(confidence, dedup_iou, min_side, offset)


@cli.command()
@click.option("--benchmark", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--detections", type=click.Path(exists=True, file_okay=False), required=True,
              help="Directory of per-image detection record files named <id>.json.")
@click.option("--confidence-threshold", type=float, default=0.3, show_default=True)
@click.option("--dedup-iou", type=float, default=0.9, show_default=True)
@click.option("--min-side", type=float, default=5.0, show_default=True)
@click.option("--offset-coefficient", type=float, default=0.1, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), required=True)
def score(benchmark, detections, confidence_threshold, dedup_iou, min_side,
          offset_coefficient, output):
    """Score a benchmark against per-image detection records."""
    cfg = _post_cfg(confidence_threshold, dedup_iou, min_side, offset_coefficient)
    entries = io.read_benchmark(benchmark)
    det_dir = Path(detections)
    rows, inputs, missing_count = [], [benchmark], 0
    for entry in entries:
        record = det_dir / f"{entry.id}.json"
        if record.exists():
            _, raw = io.read_detections(record)
            inputs.append(str(record))
            missing = False
        else:
            raw, missing = [], True
            missing_count += 1
        dets = post_process(raw, cfg)
        report = evaluate(entry.scene, dets, cfg)
        rows.append(io.report_row_record(entry, report, missing=missing))
    if missing_count:
        click.echo(f"warning: {missing_count} entries had no detection record "
                   "(scored as empty detections)", err=True)
    aggregate = io.write_score_report(output, rows)
    io.write_manifest(output, "score", {
        "benchmark": benchmark, "detections": detections,
        "confidence_threshold": confidence_threshold, "dedup_iou": dedup_iou,
        "min_side": min_side, "offset_coefficient": offset_coefficient,
    }, inputs)
    click.echo(json.dumps(aggregate))


@cli.command()
@click.option("--report", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--benchmark", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), required=True)
def revise(report, benchmark, output):
    """Emit enforce pairs (c1, c2) for every misaligned prompt in a score report."""
    entries = {e.id: e for e in io.read_benchmark(benchmark)}
    rows, _ = io.read_score_report(report)
    out_rows = []
    for row in rows:
        entry = entries.get(row["id"])
        if entry is None:
            raise io.FormatError(f"{report}: no benchmark entry with id {row['id']}")
        mis = diagnose(_report_from_row(row))
        if mis.empty:
            continue
        pair = build_enforce_pair(mis)
        out_rows.append({"id": entry.id, "c1": pair.c1, "c2": pair.c2, "seed": entry.seed})
    notice = None if out_rows else "all prompts aligned; nothing to enforce"
    io.write_enforce_pairs(output, out_rows, notice=notice)
    io.write_manifest(output, "revise", {"report": report, "benchmark": benchmark},
                      [report, benchmark])
    if notice:
        click.echo(notice)


def _report_from_row(row: dict):
    # Rebuild the ScoreReport surface diagnose() needs from a serialized row.
    from .scoring import ColorVerdict, RelationVerdict, ScoreReport

    return ScoreReport(
        bias=row["bias"],
        acc=row["acc"],
        align_score=row["align_score"],
        normalizer=row["normalizer"],
        matching=tuple(m["target"] for m in row["matching"]),
        color_verdicts=tuple(
            ColorVerdict(tuple(v["instance"]), v["required"], v["detected"], v["ok"])
            for v in row["color_verdicts"]
        ),
        relation_verdicts=tuple(
            RelationVerdict(
                tuple(v["subject"]), tuple(v["object"]), v["kind"],
                tuple(v["detected"]) if v["detected"] is not None else None, v["ok"],
            )
            for v in row["relation_verdicts"]
        ),
        counts={cat: tuple(pair) for cat, pair in row["counts"].items()},
    )


@cli.command()
@click.option("--report", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--group-by", type=click.Choice(sorted(GROUP_KEYS) + ["relation-kind"]),
              required=True)
@click.option("--fix-total", type=int, default=None,
              help="Only rows with this total instance count.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), required=True)
def analyze(report, group_by, fix_total, output):
    """Aggregate a score report into a grouped plain-text table."""
    raw_rows, _ = io.read_score_report(report)
    rows = io.report_rows_for_stats(raw_rows)
    lines = []
    if group_by == "relation-kind":
        accuracy = relation_direction_accuracy(rows)
        lines.append("kind\taccuracy")
        lines.extend(f"{kind}\t{value:.6f}" for kind, value in accuracy.items())
    else:
        grouped = group_scores(rows, group_by, fix_total=fix_total)
        lines.append(f"{group_by}\tcount\tmean_acc\tmean_bias\tmean_align_score")
        for value, metrics in grouped.groups.items():
            lines.append(
                f"{value}\t{metrics['count']}\t{metrics['mean_acc']:.6f}"
                f"\t{metrics['mean_bias']:.6f}\t{metrics['mean_align_score']:.6f}"
            )
        for note in grouped.omitted:
            click.echo(f"note: {note}", err=True)
    io.atomic_write_text(output, "\n".join(lines) + "\n")
    io.write_manifest(output, "analyze",
                      {"report": report, "group_by": group_by, "fix_total": fix_total}, [report])
    click.echo("\n".join(lines))


@cli.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="TSV file; first line is a header naming the columns.")
@click.option("--mode", type=click.Choice(["rank", "alpha"]), default="rank", show_default=True)
@click.option("--x-col", default=None, help="Metric column (rank mode; default: first column).")
@click.option("--y-col", default=None, help="Rating column (rank mode; default: second column).")
@click.option("--output", "-o", type=click.Path(dir_okay=False), required=True)
def correlate(input_path, mode, x_col, y_col, output):
    """Correlation statistics: Pearson/Spearman/Kendall, or Krippendorff's alpha.

    In alpha mode every column is one annotator; empty cells are missing."""
    with open(input_path, encoding="utf-8") as fh:
        header = fh.readline().strip().split("\t")
        body = [line.rstrip("\n").split("\t") for line in fh if line.strip()]
    if mode == "rank":
        xi = header.index(x_col) if x_col else 0
        yi = header.index(y_col) if y_col else 1
        x = [float(r[xi]) for r in body]
        y = [float(r[yi]) for r in body]
        result = {
            "pearson": pearson((x, y)),
            "spearman": spearman((x, y)),
            "kendall_tau": kendall_tau((x, y)),
            "n": len(x),
        }
    else:
        columns = [[float(r[i]) if r[i] != "" else None for r in body] for i in range(len(header))]
        result = {
            "krippendorff_alpha": krippendorff_alpha(columns, level="interval"),
            "annotators": len(header),
            "items": len(body),
        }
    text = json.dumps(result, indent=2) + "\n"
    io.atomic_write_text(output, text)
    io.write_manifest(output, "correlate",
                      {"input": input_path, "mode": mode, "x_col": x_col, "y_col": y_col},
                      [input_path])
    click.echo(text, nl=False)


@cli.command("guidance-demo")
@click.option("--mode", type=click.Choice(["cfg", "rte", "negative", "positive"]), required=True)
@click.option("--w", type=float, required=True)
@click.option("--wprime", type=float, default=None,
              help="Paired-prompt weight; defaults to w/2 (non-canonical default).")
@click.option("--fixture", type=click.Path(exists=True, dir_okay=False), required=True,
              help="JSON fixture: matrix A, embeddings, x0, conditions, eta.")
@click.option("--steps", type=int, default=10, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), required=True)
def guidance_demo(mode, w, wprime, fixture, steps, output):
    """Run the linear toy denoiser and emit the per-step state table (TSV)."""
    if steps < 1:
        raise click.UsageError(f"--steps must be >= 1, got {steps}")
    with open(fixture, encoding="utf-8") as fh:
        doc = json.load(fh)
    toy = ToyDenoiser(
        matrix=np.asarray(doc["matrix"], dtype=np.float64),
        embeddings={k: np.asarray(v, dtype=np.float64) for k, v in doc["embeddings"].items()},
    )
    conditions = doc.get("conditions", {})
    spec = GuidanceSpec(
        mode=mode, w=w, w_prime=w / 2 if wprime is None else wprime,
        c0=conditions.get("c0"), c1=conditions.get("c1"), c2=conditions.get("c2"),
    )
    trajectory = toy_denoise_loop(
        toy, spec, np.asarray(doc["x0"], dtype=np.float64), steps,
        eta=float(doc.get("eta", 0.1)), record=True,
    )
    lines = ["step\t" + "\t".join(f"x{i}" for i in range(trajectory.shape[1]))]
    for step, state in enumerate(trajectory):
        lines.append(f"{step}\t" + "\t".join(f"{v:.12g}" for v in state))
    io.atomic_write_text(output, "\n".join(lines) + "\n")
    io.write_manifest(output, "guidance-demo",
                      {"mode": mode, "w": w, "wprime": wprime, "fixture": fixture, "steps": steps},
                      [fixture])
    click.echo(lines[-1])


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(1)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        sys.exit(1)
    except DATA_ERRORS as exc:
        click.echo(f"data error: {exc}", err=True)
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
