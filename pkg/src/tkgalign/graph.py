"""Temporal knowledge graph pair model and tab-separated dataset ingestion.

A dataset directory holds two quadruple files (one per graph), a seed pair
file and a reference pair file, all tab-separated integers. Quadruple rows
are (head, rel, tail, time_begin, time_end); pair rows are (entity_1,
entity_2). Time id 0 is reserved for "unobserved" and is skipped by every
consumer of temporal structure. Optional ent_ids_* / rel_ids_* / time_id
files pin the exact id-space sizes; without them sizes are inferred from the
largest id seen.

Internally both graphs use per-graph local ids starting at 0. The published
benchmark layout stores global ids (graph-2 entities and relations offset by
the graph-1 counts); `FormatOptions.global_ids` controls the conversion.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# column layout of Tkg.quads
HEAD, REL, TAIL, T_BEGIN, T_END = range(5)


class Quadruple(NamedTuple):
    head: int
    rel: int
    tail: int
    time_begin: int
    time_end: int


class DatasetError(Exception):
    """Raised for missing files, malformed rows or out-of-range ids."""


@dataclass(eq=False)
class Tkg:
    """One temporal graph: id-space sizes plus an (n, 5) int array of quads."""

    num_entities: int
    num_relations: int
    quads: np.ndarray

    def __post_init__(self) -> None:
        self.quads = np.asarray(self.quads, dtype=np.int64)
        if self.quads.ndim != 2 or self.quads.shape[1] != 5:
            raise ValueError("quads must have shape (n, 5)")
        if self.num_entities < 0 or self.num_relations < 0:
            raise ValueError("id-space sizes must be non-negative")
        if len(self.quads):
            ents = self.quads[:, [HEAD, TAIL]]
            if ents.min() < 0 or ents.max() >= self.num_entities:
                raise ValueError("entity id out of range")
            rels = self.quads[:, REL]
            if rels.min() < 0 or rels.max() >= self.num_relations:
                raise ValueError("relation id out of range")
            if self.quads[:, [T_BEGIN, T_END]].min() < 0:
                raise ValueError("time ids must be non-negative")

    @property
    def quadruples(self) -> list[Quadruple]:
        return [Quadruple(*row) for row in self.quads.tolist()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tkg):
            return NotImplemented
        return (
            self.num_entities == other.num_entities
            and self.num_relations == other.num_relations
            and np.array_equal(self.quads, other.quads)
        )


@dataclass(eq=False)
class TkgPair:
    """Two graphs over a shared timeline, plus seed and reference pairs.

    Pair arrays hold (graph-1 local id, graph-2 local id) rows. Seeds are the
    supervision; references are the held-out evaluation set.
    """

    g1: Tkg
    g2: Tkg
    num_times: int
    seeds: np.ndarray
    refs: np.ndarray

    def __post_init__(self) -> None:
        self.seeds = _as_pair_array(self.seeds)
        self.refs = _as_pair_array(self.refs)
        if self.num_times < 1:
            raise ValueError("num_times must be >= 1 (id 0 is reserved)")
        for g in (self.g1, self.g2):
            if len(g.quads) and g.quads[:, [T_BEGIN, T_END]].max() >= self.num_times:
                raise ValueError("time id out of range for the shared timeline")
        for name, pairs in (("seeds", self.seeds), ("refs", self.refs)):
            if len(pairs) == 0:
                continue
            if pairs[:, 0].min() < 0 or pairs[:, 0].max() >= self.g1.num_entities:
                raise ValueError(f"{name}: graph-1 entity id out of range")
            if pairs[:, 1].min() < 0 or pairs[:, 1].max() >= self.g2.num_entities:
                raise ValueError(f"{name}: graph-2 entity id out of range")

    @property
    def num_entities(self) -> int:
        return self.g1.num_entities + self.g2.num_entities

    def swapped(self) -> "TkgPair":
        """Mirror the pair: graph 2 becomes the source side."""
        return TkgPair(
            g1=self.g2,
            g2=self.g1,
            num_times=self.num_times,
            seeds=self.seeds[:, ::-1].copy(),
            refs=self.refs[:, ::-1].copy(),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, TkgPair):
            return NotImplemented
        return (
            self.g1 == other.g1
            and self.g2 == other.g2
            and self.num_times == other.num_times
            and np.array_equal(self.seeds, other.seeds)
            and np.array_equal(self.refs, other.refs)
        )


def _as_pair_array(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("pair arrays must have shape (n, 2)")
    return arr


def validate_split(pair: TkgPair) -> TkgPair:
    """Check that seeds and references are disjoint, one-to-one maps.

    Raises ValueError naming the offending ids. Returns the pair unchanged so
    the call chains after loading.
    """
    problems = []
    for name, arr in (("seeds", pair.seeds), ("refs", pair.refs)):
        for side, col in (("graph-1", 0), ("graph-2", 1)):
            ids, counts = np.unique(arr[:, col], return_counts=True)
            dup = ids[counts > 1]
            if len(dup):
                problems.append(f"{name}: duplicate {side} entities {dup[:10].tolist()}")
    for side, col in (("graph-1", 0), ("graph-2", 1)):
        shared = np.intersect1d(pair.seeds[:, col], pair.refs[:, col])
        if len(shared):
            problems.append(
                f"seed/reference overlap on {side} entities {shared[:10].tolist()}"
            )
    if problems:
        raise ValueError("invalid split: " + "; ".join(problems))
    return pair


@dataclass(frozen=True)
class FormatOptions:
    """Knobs for reading a dataset directory.

    columns gives the positions of (head, rel, tail, time_begin, time_end)
    within each quadruple row. val_file, when set, names an extra pair file
    folded into the references.
    """

    quad_files: tuple[str, str] = ("triples_1", "triples_2")
    seed_file: str = "sup_pairs"
    ref_file: str = "ref_pairs"
    val_file: str | None = None
    global_ids: bool = True
    columns: tuple[int, int, int, int, int] = (0, 1, 2, 3, 4)


# accepted alternate spellings seen across published releases
_FILE_ALIASES = {
    "sup_pairs": ("sup_ent_ids",),
    "ref_pairs": ("ref_ent_ids",),
}


def _resolve(directory: str, name: str, required: bool = True) -> str | None:
    path = os.path.join(directory, name)
    if os.path.isfile(path):
        return path
    for alias in _FILE_ALIASES.get(name, ()):
        alt = os.path.join(directory, alias)
        if os.path.isfile(alt):
            return alt
    if required:
        raise DatasetError(f"missing dataset file: {path}")
    return None


def _read_int_table(path: str, min_cols: int) -> np.ndarray:
    """Read a tab-separated integer table; report the first bad line.

    Fast path is numpy's C parser; ragged-but-valid files fall back to a
    line-by-line parse that keeps the first min_cols fields of each row.
    """
    try:
        # parse as float so fractional fields surface instead of truncating
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # empty files warn, handled below
            arr = np.loadtxt(path, dtype=np.float64, ndmin=2)
        if arr.size and not np.all(arr == np.trunc(arr)):
            raise ValueError("non-integer field")
        arr = arr.astype(np.int64)
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    except ValueError:
        rows = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                parts = line.split()
                if not parts:
                    continue
                if len(parts) < min_cols:
                    raise DatasetError(
                        f"{path}, line {lineno}: expected {min_cols} "
                        f"tab-separated integers, got {len(parts)}"
                    ) from None
                try:
                    rows.append([int(p) for p in parts[:min_cols]])
                except ValueError:
                    raise DatasetError(
                        f"{path}, line {lineno}: non-integer field"
                    ) from None
        if not rows:
            return np.empty((0, min_cols), dtype=np.int64)
        return np.asarray(rows, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, min_cols), dtype=np.int64)
    if arr.shape[1] < min_cols:
        raise DatasetError(
            f"{path}: expected at least {min_cols} columns, got {arr.shape[1]}"
        )
    return arr


def _count_ids(path: str | None) -> int | None:
    """Size of an id space from an id-mapping file (one id per line)."""
    if path is None:
        return None
    ids = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            try:
                ids.append(int(parts[0]))
            except ValueError:
                raise DatasetError(
                    f"{path}, line {lineno}: non-integer id"
                ) from None
    if not ids:
        return 0
    lo, hi = min(ids), max(ids)
    if lo < 0:
        raise DatasetError(f"{path}: negative id {lo}")
    return max(hi + 1, len(ids))


def load_tkg_pair(directory: str, options: FormatOptions | None = None) -> TkgPair:
    """Read a dataset directory into a TkgPair with per-graph local ids."""
    opts = options or FormatOptions()
    if not os.path.isdir(directory):
        raise DatasetError(f"not a dataset directory: {directory}")

    min_cols = max(opts.columns) + 1
    raw1 = _read_int_table(_resolve(directory, opts.quad_files[0]), min_cols)
    raw2 = _read_int_table(_resolve(directory, opts.quad_files[1]), min_cols)
    quads1 = raw1[:, list(opts.columns)] if len(raw1) else np.empty((0, 5), np.int64)
    quads2 = raw2[:, list(opts.columns)] if len(raw2) else np.empty((0, 5), np.int64)

    seeds = _read_int_table(_resolve(directory, opts.seed_file), 2)[:, :2]
    refs = _read_int_table(_resolve(directory, opts.ref_file), 2)[:, :2]
    if opts.val_file:
        val_path = _resolve(directory, opts.val_file, required=False)
        if val_path:
            extra = _read_int_table(val_path, 2)[:, :2]
            refs = np.concatenate([refs, extra]) if len(extra) else refs

    num_e1 = _count_ids(_resolve(directory, "ent_ids_1", required=False))
    num_e2 = _count_ids(_resolve(directory, "ent_ids_2", required=False))
    num_r1 = _count_ids(_resolve(directory, "rel_ids_1", required=False))
    num_r2 = _count_ids(_resolve(directory, "rel_ids_2", required=False))
    num_t = _count_ids(_resolve(directory, "time_id", required=False))

    def col_max(arr: np.ndarray, cols) -> int:
        return int(arr[:, cols].max()) if len(arr) else -1

    if opts.global_ids:
        # graph-1 sizes bound the offset of every graph-2 id in the files
        if num_e1 is None:
            num_e1 = max(col_max(quads1, [HEAD, TAIL]),
                         col_max(seeds, [0]), col_max(refs, [0])) + 1
        if num_r1 is None:
            num_r1 = col_max(quads1, [REL]) + 1
        quads2 = quads2.copy()
        quads2[:, HEAD] -= num_e1
        quads2[:, TAIL] -= num_e1
        quads2[:, REL] -= num_r1
        seeds = seeds.copy()
        refs = refs.copy()
        seeds[:, 1] -= num_e1
        refs[:, 1] -= num_e1
        if num_e2 is None:
            num_e2 = max(col_max(quads2, [HEAD, TAIL]),
                         col_max(seeds, [1]), col_max(refs, [1])) + 1
        else:
            num_e2 -= num_e1
        if num_r2 is None:
            num_r2 = col_max(quads2, [REL]) + 1
        else:
            num_r2 -= num_r1
    else:
        if num_e1 is None:
            num_e1 = max(col_max(quads1, [HEAD, TAIL]),
                         col_max(seeds, [0]), col_max(refs, [0])) + 1
        if num_e2 is None:
            num_e2 = max(col_max(quads2, [HEAD, TAIL]),
                         col_max(seeds, [1]), col_max(refs, [1])) + 1
        if num_r1 is None:
            num_r1 = col_max(quads1, [REL]) + 1
        if num_r2 is None:
            num_r2 = col_max(quads2, [REL]) + 1

    if num_t is None:
        num_t = max(col_max(quads1, [T_BEGIN, T_END]),
                    col_max(quads2, [T_BEGIN, T_END]), 0) + 1

    try:
        g1 = Tkg(num_entities=max(num_e1, 0), num_relations=max(num_r1, 0), quads=quads1)
        g2 = Tkg(num_entities=max(num_e2, 0), num_relations=max(num_r2, 0), quads=quads2)
        return TkgPair(g1=g1, g2=g2, num_times=max(num_t, 1), seeds=seeds, refs=refs)
    except ValueError as exc:
        raise DatasetError(f"{directory}: {exc}") from exc


def save_tkg_pair(pair: TkgPair, directory: str,
                  options: FormatOptions | None = None) -> None:
    """Write a pair back out in the tab-separated directory layout."""
    opts = options or FormatOptions()
    os.makedirs(directory, exist_ok=True)

    quads1 = pair.g1.quads
    quads2 = pair.g2.quads.copy()
    seeds = pair.seeds.copy()
    refs = pair.refs.copy()
    if opts.global_ids:
        quads2[:, HEAD] += pair.g1.num_entities
        quads2[:, TAIL] += pair.g1.num_entities
        quads2[:, REL] += pair.g1.num_relations
        seeds[:, 1] += pair.g1.num_entities
        refs[:, 1] += pair.g1.num_entities

    inverse = np.argsort(opts.columns)

    def dump(path: str, arr: np.ndarray, ncols: int) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for row in arr.tolist():
                fh.write("\t".join(str(v) for v in row[:ncols]) + "\n")

    dump(os.path.join(directory, opts.quad_files[0]), quads1[:, inverse], 5)
    dump(os.path.join(directory, opts.quad_files[1]), quads2[:, inverse], 5)
    dump(os.path.join(directory, opts.seed_file), seeds, 2)
    dump(os.path.join(directory, opts.ref_file), refs, 2)

    def dump_ids(name: str, count: int, offset: int = 0) -> None:
        with open(os.path.join(directory, name), "w", encoding="utf-8") as fh:
            for i in range(count):
                fh.write(f"{i + offset}\t{name.split('_')[0]}{i + offset}\n")

    off_e = pair.g1.num_entities if opts.global_ids else 0
    off_r = pair.g1.num_relations if opts.global_ids else 0
    dump_ids("ent_ids_1", pair.g1.num_entities)
    dump_ids("ent_ids_2", pair.g2.num_entities, off_e)
    dump_ids("rel_ids_1", pair.g1.num_relations)
    dump_ids("rel_ids_2", pair.g2.num_relations, off_r)
    dump_ids("time_id", pair.num_times)
