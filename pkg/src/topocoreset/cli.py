"""Command-line pipeline: project -> score -> select, plus perturb.

Subcommands are resumable from their input files, so ``pipeline`` is
literally the three phases run back to back through the same artifacts.
Configuration comes from a flat ``key=value`` file (dots namespace the
module, e.g. ``manifold.n_neighbors=15``) overridden by repeated
``--set key=value`` flags; a master seed derives every module seed.

Exit codes: 0 success, 2 configuration error, 3 data/file error,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from .density import DensityConfig, density_scores
from .io import (
    CorpusError,
    EmbeddingMatrix,
    LabelVector,
    load_embeddings,
    load_scores,
    perturb_embeddings,
    save_embeddings,
    save_scores,
    save_selection,
)
from .manifold import ProjectionConfig, project
from .mislabel import MislabelConfig, filter_mislabeled, load_aum_scores, nlps_scores
from .persistence import PersistenceOptimConfig, persistence_scores
from .rng import derive_seed
from .selection import SelectionConfig, stratified_sample, unified_scores

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

SEED_TAG_MANIFOLD = 1
SEED_TAG_SELECTION = 2
SEED_TAG_PERTURB = 3

# mislabel-removal fraction per (dataset preset, pruning rate)
GAMMA_PRESETS = {
    "cifar10": {0.3: 0.0, 0.5: 0.0, 0.7: 0.1, 0.8: 0.1, 0.9: 0.3},
    "cifar100": {0.3: 0.1, 0.5: 0.2, 0.7: 0.2, 0.8: 0.4, 0.9: 0.5},
    "imagenet": {0.3: 0.0, 0.5: 0.1, 0.7: 0.2, 0.8: 0.2, 0.9: 0.3},
}


class ConfigError(Exception):
    pass


@dataclass
class PipelineConfig:
    manifold: ProjectionConfig = field(default_factory=ProjectionConfig)
    density: DensityConfig = field(default_factory=DensityConfig)
    persistence: PersistenceOptimConfig = field(default_factory=PersistenceOptimConfig)
    mislabel: MislabelConfig = field(default_factory=MislabelConfig)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    density_per_class: bool = True
    seed: int = 0

    def __post_init__(self):
        self.manifold.seed = derive_seed(self.seed, SEED_TAG_MANIFOLD)
        self.selection.seed = derive_seed(self.seed, SEED_TAG_SELECTION)


_SECTIONS = {
    "manifold": ProjectionConfig,
    "density": DensityConfig,
    "persistence": PersistenceOptimConfig,
    "mislabel": MislabelConfig,
    "selection": SelectionConfig,
}

_FIELD_TYPES = {
    section: {f.name: f.type for f in fields(cls)} for section, cls in _SECTIONS.items()
}


def _coerce(section: str, key: str, raw: str):
    hint = _FIELD_TYPES[section].get(key)
    if hint is None:
        raise ConfigError(f"unknown config key {section}.{key}")
    raw = raw.strip()
    if "str" in hint:
        return raw
    if "bool" in hint:
        if raw.lower() in ("1", "true", "yes"):
            return True
        if raw.lower() in ("0", "false", "no"):
            return False
        raise ConfigError(f"{section}.{key}: expected a boolean, got {raw!r}")
    if "int" in hint and "float" not in hint:
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"{section}.{key}: expected an integer, got {raw!r}") from exc
    try:
        if raw.lower() in ("none", "null"):
            return None
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: expected a number, got {raw!r}") from exc


def parse_config(path: str | None, overrides: list[str], seed: int | None) -> PipelineConfig:
    entries: dict[tuple[str, str], object] = {}
    top: dict[str, object] = {}

    def ingest(line: str, where: str):
        line = line.split("#", 1)[0].strip()
        if not line:
            return
        if "=" not in line:
            raise ConfigError(f"{where}: expected key=value, got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key == "seed":
            top["seed"] = int(raw)
            return
        if key == "density.per_class":
            top["density_per_class"] = raw.lower() in ("1", "true", "yes")
            return
        if "." not in key:
            raise ConfigError(f"{where}: top-level key {key!r} is not recognized")
        section, name = key.split(".", 1)
        if section not in _SECTIONS:
            raise ConfigError(f"{where}: unknown section {section!r}")
        entries[(section, name)] = _coerce(section, name, raw)

    if path is not None:
        try:
            with open(path) as fh:
                for lineno, line in enumerate(fh, start=1):
                    ingest(line, f"{path}:{lineno}")
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
    for item in overrides:
        ingest(item, f"--set {item}")

    if seed is not None:
        top["seed"] = seed
    kwargs = {}
    for section, cls in _SECTIONS.items():
        sub = {name: val for (sec, name), val in entries.items() if sec == section}
        try:
            kwargs[section] = cls(**sub)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid {section} config: {exc}") from exc
    return PipelineConfig(**kwargs, **top)


def resolve_gamma(args, config: PipelineConfig) -> float:
    if args.gamma is not None:
        if not 0.0 <= args.gamma < 1.0:
            raise ConfigError(f"gamma must be in [0,1), got {args.gamma}")
        return args.gamma
    if args.preset is not None:
        table = GAMMA_PRESETS.get(args.preset)
        if table is None:
            raise ConfigError(f"unknown preset {args.preset!r}")
        p = round(args.pruning_rate, 10)
        if p not in table:
            raise ConfigError(
                f"preset {args.preset!r} defines gamma only for pruning rates "
                f"{sorted(table)}, got {args.pruning_rate}"
            )
        return table[p]
    return config.mislabel.gamma


# ---------------------------------------------------------------- phases


def phase_project(config: PipelineConfig, in_path: str, out_path: str) -> None:
    Z, labels = load_embeddings(in_path)
    emb = project(Z, config.manifold)
    save_embeddings(
        EmbeddingMatrix(emb.coords.astype(np.float32)), labels, out_path, format="binary"
    )


def phase_score(config: PipelineConfig, in_path: str, embedding_path: str, prefix: str) -> dict:
    Z, labels = load_embeddings(in_path)
    Y, labels_y = load_embeddings(embedding_path)
    if not np.array_equal(labels.labels, labels_y.labels):
        raise CorpusError("labels in the embedding file disagree with the input")
    dens = density_scores(
        Y.data.astype(np.float64), labels, config.density, per_class=config.density_per_class
    )
    pers = persistence_scores(Y.data.astype(np.float64), labels, config.persistence)
    if config.mislabel.method == "nlps":
        mis = nlps_scores(Z, labels, k=config.mislabel.k)
    else:
        if not config.mislabel.aum_path:
            raise ConfigError("mislabel.method=aum_file needs mislabel.aum_path")
        mis = load_aum_scores(config.mislabel.aum_path, Z.n_samples)
    paths = {}
    for kind, vec in (("density", dens), ("persistence", pers), ("mislabel", mis)):
        paths[kind] = f"{prefix}_{kind}.csv"
        save_scores(vec, paths[kind])
    return paths


def phase_select(
    config: PipelineConfig,
    labels: LabelVector,
    score_paths: dict,
    gamma: float,
    out_path: str,
):
    n = len(labels)
    dens = load_scores(score_paths["density"], kind="density", n=n)
    pers = load_scores(score_paths["persistence"], kind="persistence", n=n)
    mis = load_scores(score_paths["mislabel"], kind="mislabel", n=n)
    clean = filter_mislabeled(mis, gamma)
    unified = unified_scores(
        pers,
        dens,
        alpha=config.selection.alpha,
        beta=config.selection.beta,
        normalization=config.selection.normalization,
        labels=labels,
    )
    result = stratified_sample(clean, unified, labels, config.selection)
    save_selection(result, out_path)
    return result, clean


# ---------------------------------------------------------------- commands


def cmd_project(args) -> int:
    config = parse_config(args.config, args.set, args.seed)
    phase_project(config, args.input, args.output)
    return EXIT_OK


def cmd_score(args) -> int:
    config = parse_config(args.config, args.set, args.seed)
    phase_score(config, args.input, args.embedding, args.out_prefix)
    return EXIT_OK


def cmd_select(args) -> int:
    config = parse_config(args.config, args.set, args.seed)
    config.selection.pruning_rate = args.pruning_rate
    gamma = resolve_gamma(args, config)
    _, labels = load_embeddings(args.input)
    score_paths = {
        "density": f"{args.scores}_density.csv",
        "persistence": f"{args.scores}_persistence.csv",
        "mislabel": f"{args.scores}_mislabel.csv",
    }
    phase_select(config, labels, score_paths, gamma, args.output)
    return EXIT_OK


def cmd_perturb(args) -> int:
    config = parse_config(args.config, args.set, args.seed)
    Z, labels = load_embeddings(args.input)
    noisy = perturb_embeddings(Z, args.multiplier, derive_seed(config.seed, SEED_TAG_PERTURB))
    save_embeddings(noisy, labels, args.output, format="binary")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    config = parse_config(args.config, args.set, args.seed)
    config.selection.pruning_rate = args.pruning_rate
    gamma = resolve_gamma(args, config)

    emb_path = f"{args.out_prefix}_embedding.tprn"
    phase_project(config, args.input, emb_path)
    score_paths = phase_score(config, args.input, emb_path, args.out_prefix)
    _, labels = load_embeddings(args.input)
    sel_path = f"{args.out_prefix}_selection.json"
    result, clean = phase_select(config, labels, score_paths, gamma, sel_path)

    if args.dump_plot_data:
        _dump_plot_data(args.out_prefix, emb_path, score_paths, labels)

    counts = " ".join(f"{c}:{k}" for c, k in sorted(result.per_class_counts.items()))
    print(
        f"N={len(labels)} C={labels.num_classes} p={args.pruning_rate} gamma={gamma} "
        f"clean={clean.size} kept={result.kept_indices.size} per_class=[{counts}]"
    )
    return EXIT_OK


def _dump_plot_data(prefix, emb_path, score_paths, labels):
    """One flat CSV (index, x, y, label, density, persistence, mislabel)
    for external plotting tools."""
    Y, _ = load_embeddings(emb_path)
    n = len(labels)
    dens = load_scores(score_paths["density"], kind="density", n=n)
    pers = load_scores(score_paths["persistence"], kind="persistence", n=n)
    mis = load_scores(score_paths["mislabel"], kind="mislabel", n=n)
    with open(f"{prefix}_plotdata.csv", "w") as fh:
        fh.write("index,x,y,label,density,persistence,mislabel\n")
        for i in range(n):
            fh.write(
                f"{i},{float(Y.data[i, 0])!r},{float(Y.data[i, 1])!r},"
                f"{int(labels.labels[i])},{dens.values[i]!r},"
                f"{pers.values[i]!r},{mis.values[i]!r}\n"
            )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="topocoreset",
        description="Topology-driven coreset selection over static embeddings",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry (repeatable)")
        p.add_argument("--seed", type=int, default=None, help="master seed")

    p = sub.add_parser("project", help="embed inputs onto the low-dimensional manifold")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("score", help="write density, persistence and mislabel scores")
    common(p)
    p.add_argument("--input", required=True, help="embedding file (binary or CSV)")
    p.add_argument("--embedding", required=True, help="manifold file from `project`")
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("select", help="filter suspects and draw the stratified coreset")
    common(p)
    p.add_argument("--input", required=True, help="embedding file (for labels)")
    p.add_argument("--scores", required=True, help="prefix used by `score`")
    p.add_argument("--pruning-rate", type=float, required=True)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--preset", choices=sorted(GAMMA_PRESETS), default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("perturb", help="add row-scaled Gaussian noise to embeddings")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--multiplier", type=float, required=True)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("pipeline", help="project, score, filter and select in one run")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--pruning-rate", type=float, required=True)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--preset", choices=sorted(GAMMA_PRESETS), default=None)
    p.add_argument("--dump-plot-data", action="store_true",
                   help="also write a flat CSV of coordinates and scores")
    p.set_defaults(func=cmd_pipeline)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CorpusError, FileNotFoundError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
