"""Ancestral sampling of simulee records, nested prefixes, and bootstrap resampling.

Randomness comes from the Philox counter-based generator.  A dataset of n rows
consumes exactly n * n_variables uniforms in row-major order, so row i depends
only on (seed, i): prefixes of a larger run are bit-identical to a smaller run
with the same seed, which realizes the nested sample sizes 50 - 1000.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import EmptyDatasetError, OutOfRangeError, ParseError
from .network import Network


def rng_from_seed(seed: int) -> np.random.Generator:
    """All package randomness is Philox keyed by a 64-bit integer."""
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def derive_seed(master: int, *key: int) -> int:
    """Derive an independent 64-bit subseed from a master seed and an integer path."""
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(2, np.uint64)[0])


@dataclass(frozen=True, eq=False)
class Dataset:
    """Observable state indices, rows = simulees, columns = observables."""

    columns: tuple[str, ...]
    rows: np.ndarray  # (n, k) int array of state indices
    provenance: Mapping | None = None

    def __post_init__(self):
        arr = np.asarray(self.rows, dtype=np.int64).reshape(-1, len(self.columns))
        object.__setattr__(self, "rows", arr)

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]


def forward_sample(net: Network, n: int, seed: int) -> Dataset:
    """Draw n i.i.d. simulee records by ancestral sampling; keep observable columns.

    Each variable is drawn in topological order by inverse-CDF over its CPT row
    in state order, one uniform per variable per row.
    """
    order = net.topological_order()
    nvars = len(order)
    pos = {name: i for i, name in enumerate(order)}
    uniforms = rng_from_seed(seed).random((n, nvars))
    states = np.zeros((n, nvars), dtype=np.int64)
    for name in order:
        cpt = net.cpt(name)
        cum = np.cumsum(cpt.array(), axis=1)
        cum[:, -1] = 1.0  # guard float drift so u < 1 always lands
        if cpt.parents:
            cards = [net.var(p).cardinality for p in cpt.parents]
            parent_states = states[:, [pos[p] for p in cpt.parents]]
            row_idx = np.ravel_multi_index(parent_states.T, cards)
        else:
            row_idx = np.zeros(n, dtype=np.int64)
        u = uniforms[:, pos[name]]
        states[:, pos[name]] = (u[:, None] < cum[row_idx]).argmax(axis=1)
    obs = [v.name for v in net.observables]
    data = states[:, [pos[o] for o in obs]]
    return Dataset(tuple(obs), data, provenance={"seed": int(seed), "n": int(n)})


def prefix(ds: Dataset, n: int) -> Dataset:
    """First n rows, order preserved (the nesting rule for sample sizes)."""
    if n > ds.n_rows or n < 0:
        raise OutOfRangeError(f"prefix of {n} rows from a {ds.n_rows}-row dataset")
    return Dataset(ds.columns, ds.rows[:n].copy(), provenance=ds.provenance)


def resample(ds: Dataset, n: int, seed: int) -> Dataset:
    """n rows drawn uniformly with replacement; deterministic given seed."""
    if ds.n_rows < 1:
        raise EmptyDatasetError("cannot resample an empty dataset")
    idx = rng_from_seed(seed).integers(0, ds.n_rows, size=n)
    return Dataset(ds.columns, ds.rows[idx], provenance=None)


def save_dataset(ds: Dataset, net: Network) -> str:
    """CSV with a header of observable names and state labels as cell values."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ds.columns)
    labels = [net.var(c).states for c in ds.columns]
    for row in ds.rows:
        w.writerow([labels[j][s] for j, s in enumerate(row)])
    return buf.getvalue()


def load_dataset(text: str, net: Network) -> Dataset:
    """Parse the CSV dataset format, validating labels against the network."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty dataset file") from None
    columns = tuple(header)
    expected = tuple(v.name for v in net.observables)
    if columns != expected:
        raise ParseError(f"dataset columns {columns} do not match network observables {expected}")
    index = [{s: i for i, s in enumerate(net.var(c).states)} for c in columns]
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(columns):
            raise ParseError(f"line {lineno}: expected {len(columns)} cells, found {len(row)}")
        try:
            rows.append([index[j][label] for j, label in enumerate(row)])
        except KeyError as e:
            raise ParseError(f"line {lineno}: unknown state label {e}") from None
    data = np.asarray(rows, dtype=np.int64).reshape(len(rows), len(columns))
    return Dataset(columns, data)
