"""Command line: fit, scree, profile, assign, ternary, hull.

Every subcommand writes its artifacts into ``--out-dir``. Failures print a
JSON object on stderr and exit with 2 (usage), 3 (data) or 4 (fit).
"""

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (
    assignments,
    composition_query,
    convex_hull_2d,
    dominant_pair,
    nearest_observations,
    percentile_profile,
    point_in_hull,
    sample_rows,
    ternary_coordinates,
    threshold_cohort,
)
from .core import INIT_STRATEGIES, FitConfig, fit
from .errors import (
    ArchetypalError,
    ConfigurationError,
    ConvergenceError,
    FitError,
    InputError,
    NotEnoughPointsError,
)
from .io import RunManifest, file_digest, ingest_csv, model_from_dict, read_model_document, save_model, write_csv
from .scaling import SCALING_METHODS, standardize
from .selection import scree, suggest_elbow

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_CONVERGENCE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _default_seed():
    value = os.environ.get("ARCHETYPES_SEED")
    if value is None:
        return 0
    try:
        return int(value)
    except ValueError:
        raise UsageError(f"ARCHETYPES_SEED must be an integer, got {value!r}") from None


def _columns(text):
    return [c.strip() for c in text.split(",") if c.strip()] if text else None


def _add_input(p, required=True):
    p.add_argument("--input", required=required, help="CSV file with a header row")
    p.add_argument("--columns", help="comma-separated numeric columns (default: all numeric)")
    p.add_argument("--label-column", help="column holding row labels, e.g. Name")
    p.add_argument("--delimiter", default=",")


def _add_fit_flags(p):
    _add_input(p)
    p.add_argument("--scale", choices=SCALING_METHODS, default="zscore")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=None, help="default: $ARCHETYPES_SEED or 0")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--init", choices=INIT_STRATEGIES, default="furthest-sum")
    p.add_argument("--penalty-weight", type=float, default=None)


def build_parser():
    parser = _Parser(prog="archetypal", description="Archetypal analysis of tabular data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit k archetypes")
    _add_fit_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("scree", help="fit k = 1..k_max and suggest an elbow")
    _add_fit_flags(p)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("profile", help="percentile profile of each archetype")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("assign", help="alpha table, nearest observations and cohorts")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--archetype", type=int, help="1-based archetype for a threshold cohort")
    p.add_argument("--threshold", type=float, help="cohort keeps rows with alpha above this")
    p.add_argument("--pair", help="P,S: rows mixing only archetypes P and S with P dominant")
    p.add_argument("--sample", type=int, help="seeded random subset of this size")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("ternary", help="ternary-plot coordinates of a k = 3 model")
    p.add_argument("--model", required=True)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("hull", help="2-D convex hull with optional archetype overlay")
    _add_input(p)
    p.add_argument("--model")
    p.add_argument("--out-dir", required=True)
    return parser


def _ingest(args):
    data = ingest_csv(args.input, _columns(args.columns), args.label_column, args.delimiter)
    return data


def _config(args, k):
    seed = args.seed if args.seed is not None else _default_seed()
    return FitConfig(
        k=k,
        restarts=args.restarts,
        max_iterations=args.max_iter,
        rel_tolerance=args.tol,
        penalty_weight=args.penalty_weight,
        init=args.init,
        seed=seed,
    )


def _scaled(data, method):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        scaled, params = standardize(data, method)
    notes = [str(w.message) for w in caught]
    return scaled, params, notes


def _manifest(args, command, data, config=None, scaling=None):
    return RunManifest(
        command=command,
        input_path=str(args.input) if getattr(args, "input", None) else None,
        input_digest=file_digest(args.input) if getattr(args, "input", None) else None,
        selected_columns=list(data.column_names) if data is not None else [],
        label_column=getattr(args, "label_column", None),
        delimiter=getattr(args, "delimiter", ","),
        scaling_method=scaling,
        fit_config=_config_dict(config) if config is not None else {},
        tool_version=__version__,
    )


def _config_dict(config):
    return {
        "k": config.k,
        "restarts": config.restarts,
        "max_iterations": config.max_iterations,
        "rel_tolerance": config.rel_tolerance,
        "penalty_weight": config.penalty_weight,
        "init": config.init,
        "seed": config.seed,
    }


def _out_dir(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_fit(args):
    data = _ingest(args)
    scaled, params, notes = _scaled(data, args.scale)
    config = _config(args, args.k)
    model = fit(scaled, config)
    out = _out_dir(args)
    save_model(
        out / "model.json",
        model,
        row_labels=list(data.row_labels) if data.row_labels is not None else None,
        data={
            "columns": list(data.column_names),
            "label_column": args.label_column,
            "delimiter": args.delimiter,
            "n": data.n,
        },
        warnings=notes,
    )
    _manifest(args, "fit", data, config, args.scale).save(out / "manifest.json")


def cmd_scree(args):
    data = _ingest(args)
    scaled, _, _ = _scaled(data, args.scale)
    config = _config(args, 1)
    series = scree(scaled, args.k_max, config)
    out = _out_dir(args)
    write_csv(
        out / "scree.csv",
        ["k", "rss", "rss_rel", "spread", "converged_fraction"],
        [
            [e.k, e.best_rss, e.best_rss_rel, e.restart_rss_spread, e.converged_fraction]
            for e in series.entries
        ],
    )
    try:
        elbow = suggest_elbow(series)
        doc = {"suggested_k": elbow.k, "scores": {str(k): s for k, s in elbow.scores.items()}}
    except NotEnoughPointsError as err:
        doc = {"suggested_k": None, "scores": {}, "note": str(err)}
    doc["errors"] = {str(e.k): e.error for e in series.entries if e.error}
    (out / "elbow.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    _manifest(args, "scree", data, config, args.scale).save(out / "manifest.json")


def _load(args):
    doc = read_model_document(args.model)
    return doc, model_from_dict(doc)


def _model_data(doc, path):
    info = doc.get("data") or {}
    data = ingest_csv(path, info.get("columns"), info.get("label_column"), info.get("delimiter", ","))
    if info.get("n") is not None and data.n != info["n"]:
        raise InputError(f"{path} has {data.n} rows but the model was fitted on {info['n']}")
    return data, info.get("label_column") or "label"


def cmd_profile(args):
    doc, model = _load(args)
    data, _ = _model_data(doc, args.input)
    profile = percentile_profile(model, data)
    out = _out_dir(args)
    write_csv(
        out / "percentiles.csv",
        ["archetype", *profile.column_names],
        [[j + 1, *profile.values[j]] for j in range(model.k)],
    )


def _alpha_rows(model, data, rows, label_name):
    meta = list(data.metadata)
    table = assignments(model, data).rows
    header = [label_name, *meta, *(f"alpha_{j + 1}" for j in range(model.k)), "nearest", "max_alpha"]
    body = [
        [table[i].label, *(data.metadata[c][i] for c in meta), *table[i].alpha,
         table[i].nearest + 1, table[i].max_alpha]
        for i in rows
    ]
    return header, body


def cmd_assign(args):
    doc, model = _load(args)
    data, label_name = _model_data(doc, args.input)
    out = _out_dir(args)
    seed = args.seed if args.seed is not None else _default_seed()

    if (args.archetype is None) != (args.threshold is None):
        raise UsageError("--archetype and --threshold must be given together")
    if args.archetype is not None and args.pair is not None:
        raise UsageError("--pair cannot be combined with --archetype/--threshold")

    if args.archetype is not None:
        if not 1 <= args.archetype <= model.k:
            raise UsageError(f"--archetype must be in 1..{model.k}")
        rows = threshold_cohort(model, data, args.archetype - 1, args.threshold)
        name = "cohort.csv"
    elif args.pair is not None:
        try:
            primary, secondary = (int(v) - 1 for v in args.pair.split(","))
        except ValueError:
            raise UsageError("--pair expects two archetype numbers, e.g. 1,2") from None
        if not (0 <= primary < model.k and 0 <= secondary < model.k) or primary == secondary:
            raise UsageError(f"--pair needs two distinct archetypes in 1..{model.k}")
        rows = composition_query(model, data, dominant_pair(primary, secondary), sort_by=primary)
        name = "composition.csv"
    else:
        rows = list(range(data.n))
        name = "assignments.csv"
        nearest = nearest_observations(model, data)
        header, body = _alpha_rows(model, data, nearest, label_name)
        write_csv(out / "nearest.csv", ["archetype", *header], [[j + 1, *r] for j, r in enumerate(body)])

    if args.sample is not None:
        rows = sample_rows(rows, args.sample, seed)
    header, body = _alpha_rows(model, data, rows, label_name)
    write_csv(out / name, header, body)


def cmd_ternary(args):
    doc, model = _load(args)
    if model.k != 3:
        raise UsageError(f"ternary needs a k = 3 model, got k = {model.k}")
    coords = ternary_coordinates(model)
    labels = doc.get("row_labels") or [str(i + 1) for i in range(len(coords))]
    out = _out_dir(args)
    write_csv(
        out / "ternary.csv",
        ["label", "x", "y", "alpha_1", "alpha_2", "alpha_3"],
        [[labels[i], *coords[i], *model.alpha[i]] for i in range(len(coords))],
    )


def cmd_hull(args):
    data = _ingest(args)
    if data.m != 2:
        raise UsageError(f"hull needs exactly 2 columns, got {data.m}: {list(data.column_names)}")
    points = np.asarray(data.values)
    hull = convex_hull_2d(points)
    x_name, y_name = data.column_names
    rows = [
        ["hull", order + 1, i + 1, data.label(i), points[i, 0], points[i, 1], ""]
        for order, i in enumerate(hull.vertex_indices)
    ]
    if args.model:
        _, model = _load(args)
        if model.column_names is not None and tuple(model.column_names) != tuple(data.column_names):
            raise UsageError(
                f"model columns {list(model.column_names)} differ from {list(data.column_names)}"
            )
        Z = model.archetypes_original()
        tol = 1e-9 * max(1.0, float(np.abs(points).max()))
        for j, z in enumerate(Z):
            position = point_in_hull(hull, points, z, tol=tol)
            rows.append(["archetype", j + 1, "", f"Archetype {j + 1}", z[0], z[1], position.value])
    out = _out_dir(args)
    write_csv(out / "hull.csv", ["kind", "order", "row", "label", x_name, y_name, "position"], rows)
    _manifest(args, "hull", data).save(out / "manifest.json")


COMMANDS = {
    "fit": cmd_fit,
    "scree": cmd_scree,
    "profile": cmd_profile,
    "assign": cmd_assign,
    "ternary": cmd_ternary,
    "hull": cmd_hull,
}


def _fail(kind, message, code):
    json.dump({"error": kind, "message": message, "exit_code": code}, sys.stderr)
    sys.stderr.write("\n")
    return code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as err:
        return _fail("usage", str(err), EXIT_USAGE)
    except (FitError, ConvergenceError) as err:
        return _fail(type(err).__name__, str(err), EXIT_CONVERGENCE)
    except ConfigurationError as err:
        return _fail("configuration", str(err), EXIT_USAGE)
    except (InputError, ArchetypalError, OSError) as err:
        return _fail(type(err).__name__, str(err), EXIT_DATA)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
