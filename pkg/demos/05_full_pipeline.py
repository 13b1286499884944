"""End-to-end coreset selection, both through the API and the CLI.

Builds a 900-sample synthetic dataset, runs the three phases (manifold
scoring, mislabel filtering, stratified selection) and inspects the
resulting coreset. The CLI invocation at the end produces byte-identical
artifacts because every phase is a pure function of (files, config, seed).
"""

import tempfile
from pathlib import Path

import numpy as np

from topocoreset import (
    LabelVector,
    PersistenceOptimConfig,
    ProjectionConfig,
    SelectionConfig,
    density_scores,
    filter_mislabeled,
    load_selection,
    nlps_scores,
    persistence_scores,
    project,
    save_embeddings,
    stratified_sample,
    unified_scores,
)
from topocoreset.cli import main as cli

rng = np.random.default_rng(0)
centers = rng.normal(scale=30.0, size=(3, 64))
scales = (1.0 + np.arange(64)) ** -1.0
Z = np.vstack([
    centers[c] + rng.normal(size=(300, 64)) * scales for c in range(3)
]).astype(np.float32)
labels = LabelVector(np.repeat(np.arange(3), 300), num_classes=3)

# phase 1: dual-scale scoring
emb = project(Z, ProjectionConfig(seed=7))
dens = density_scores(emb.coords, labels)
pers = persistence_scores(emb.coords, labels, PersistenceOptimConfig())
print(f"density scores:     min={dens.values.min():.3f} max={dens.values.max():.3f}")
print(f"persistence scores: min={pers.values.min():.3f} max={pers.values.max():.3f}")

# phase 2: drop likely mislabels
mis = nlps_scores(Z, labels, k=20)
clean = filter_mislabeled(mis, gamma=0.1)
print(f"clean pool after filtering: {clean.size}/900")

# phase 3: stratified selection at 90% pruning
unified = unified_scores(pers, dens, alpha=0.5, beta=0.5)
sel = stratified_sample(clean, unified, labels, SelectionConfig(pruning_rate=0.9, seed=7))
print(f"kept {sel.kept_indices.size} samples, per class {sel.per_class_counts}")

# the same run through the command line
workdir = Path(tempfile.mkdtemp())
data = workdir / "input.tprn"
save_embeddings(Z, labels, data, format="binary")
rc = cli([
    "pipeline", "--input", str(data), "--out-prefix", str(workdir / "run"),
    "--pruning-rate", "0.9", "--gamma", "0.1", "--seed", "7",
])
assert rc == 0
res = load_selection(workdir / "run_selection.json")
print(f"CLI kept {res.kept_indices.size} samples into {workdir / 'run_selection.json'}")
