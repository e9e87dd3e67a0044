"""Dataset generators, knot-CSV ingestion, and the split-real adapter.

Synthetic generators are pure functions of (n, seed): every feature channel
is sampled uniformly inside the grid square, targets are computed in exact
complex arithmetic.  Originally-real features carry imaginary part 0 and a
flag so the split-real adapter does not double them.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .complexval import ComplexBatch
from .errors import DataError
from .layers import GridSpec


@dataclass
class Dataset:
    features: ComplexBatch
    targets: ComplexBatch | None
    labels: np.ndarray | None
    feature_names: list
    real_flags: list
    name: str
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.targets is None) == (self.labels is None):
            raise DataError("dataset needs exactly one of targets or labels")
        if len(self.feature_names) != self.features.cols:
            raise DataError("feature_names length does not match feature count")
        if len(self.real_flags) != self.features.cols:
            raise DataError("real_flags length does not match feature count")

    @property
    def n(self):
        return self.features.rows

    @property
    def task(self):
        return "classification" if self.labels is not None else "regression"

    @property
    def n_classes(self):
        if self.labels is None:
            return None
        return int(self.labels.max()) + 1

    def select(self, idx):
        """Row subset (fold splits)."""
        idx = np.asarray(idx)
        return Dataset(
            self.features.select(idx),
            self.targets.select(idx) if self.targets is not None else None,
            self.labels[idx] if self.labels is not None else None,
            self.feature_names, self.real_flags, self.name, self.extra,
        )

    def select_features(self, indices):
        """Column subset (feature pruning); order follows ``indices``."""
        indices = [int(i) for i in indices]
        return Dataset(
            self.features.select_cols(indices),
            self.targets, self.labels,
            [self.feature_names[i] for i in indices],
            [self.real_flags[i] for i in indices],
            self.name, dict(self.extra, pruned_to=indices),
        )


def _uniform_complex(rng, n, d, grid: GridSpec):
    re = rng.uniform(grid.lo, grid.hi, (n, d))
    im = rng.uniform(grid.lo, grid.hi, (n, d))
    return ComplexBatch.from_channels(re, im)


SYMBOLIC_IDS = ("f1", "f2", "f3", "f4")


def gen_symbolic(fid: str, n: int, seed: int, grid: GridSpec = GridSpec()) -> Dataset:
    """Table-style symbolic targets: z^2, sin(z), z1*z2, (z1^2+z2^2)^2."""
    if fid not in SYMBOLIC_IDS:
        raise DataError(f"unknown symbolic function {fid!r}")
    if n < 1:
        raise DataError("need at least one sample")
    rng = np.random.default_rng(seed)
    d = 1 if fid in ("f1", "f2") else 2
    feats = _uniform_complex(rng, n, d, grid)
    z = feats.data
    if fid == "f1":
        t = z[:, :1] ** 2
        names = ["z"]
    elif fid == "f2":
        x, y = z[:, :1].real, z[:, :1].imag
        t = np.sin(x) * np.cosh(y) + 1j * np.cos(x) * np.sinh(y)
        names = ["z"]
    elif fid == "f3":
        t = (z[:, 0] * z[:, 1])[:, None]
        names = ["z1", "z2"]
    else:
        t = ((z[:, 0] ** 2 + z[:, 1] ** 2) ** 2)[:, None]
        names = ["z1", "z2"]
    return Dataset(feats, ComplexBatch(t), None, names, [False] * d, fid)


def gen_holography(n: int, seed: int, grid: GridSpec = GridSpec()) -> Dataset:
    """H = E_hat_R * |E_R + E_0|^2 with three complex features."""
    if n < 1:
        raise DataError("need at least one sample")
    rng = np.random.default_rng(seed)
    feats = _uniform_complex(rng, n, 3, grid)
    z = feats.data
    h = z[:, 0] * np.abs(z[:, 1] + z[:, 2]) ** 2
    return Dataset(
        feats, ComplexBatch(h[:, None]), None,
        ["E_hat_R", "E_R", "E_0"], [False, False, False], "holography",
    )


def gen_circuit(n: int, seed: int, grid: GridSpec = GridSpec()) -> Dataset:
    """RL circuit response: one complex source, five real components.

    Component values are sampled over the full grid range (including
    nonphysical negatives); samples with non-finite or extreme targets
    (|U_RL| > 1e6) are rejected and redrawn.
    """
    if n < 1:
        raise DataError("need at least one sample")
    rng = np.random.default_rng(seed)
    rows = []
    targets = []
    rejected = 0
    max_draws = max(20 * n, 1000)
    drawn = 0
    while len(rows) < n and drawn < max_draws:
        m = n - len(rows)
        drawn += m
        u_g = rng.uniform(grid.lo, grid.hi, m) + 1j * rng.uniform(grid.lo, grid.hi, m)
        r_g, r_l, ind, cap, omega = (rng.uniform(grid.lo, grid.hi, m) for _ in range(5))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            denom = (1.0 + r_g / r_l - omega ** 2 * ind * cap
                     + 1j * omega * (ind / r_l + r_g * cap))
            u_rl = u_g / denom
        ok = np.isfinite(u_rl) & (np.abs(u_rl) <= 1e6)
        rejected += int(m - ok.sum())
        for j in np.nonzero(ok)[0]:
            rows.append([u_g[j], r_g[j] + 0j, r_l[j] + 0j, ind[j] + 0j, cap[j] + 0j, omega[j] + 0j])
            targets.append(u_rl[j])
    if len(rows) < n:
        raise DataError(f"circuit generation exhausted {max_draws} draws for {n} samples")
    if rejected / (rejected + n) > 0.5:
        raise DataError(f"circuit rejection rate {rejected / (rejected + n):.2f} exceeds 50%")
    feats = ComplexBatch(np.array(rows, dtype=np.complex128))
    ds = Dataset(
        feats, ComplexBatch(np.array(targets, dtype=np.complex128)[:, None]), None,
        ["U_G", "R_G", "R_L", "L", "C", "omega"],
        [False, True, True, True, True, True], "circuit",
    )
    ds.extra["rejected"] = rejected
    return ds


def load_knots(path, grid: GridSpec = GridSpec()) -> Dataset:
    """Knot-invariant CSV: 13 real and 2 complex features, signature label.

    Complex invariants appear as column pairs suffixed _re/_im.  Each real
    channel is min-max normalized onto [grid.lo, grid.hi]; signature values
    map to class indices by ascending sort.  Normalization constants are
    kept in ``extra`` for reproducibility.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = list(reader)
    if not rows:
        raise DataError(f"{path}: no data rows")
    header = [h.strip() for h in header]
    if header[-1] != "signature":
        raise DataError(f"{path}: last column must be 'signature', got {header[-1]!r}")
    cols = {}
    try:
        table = np.array([[float(c) for c in row] for row in rows], dtype=np.float64)
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric cell ({exc})") from None
    if table.shape[1] != len(header):
        raise DataError(f"{path}: row width disagrees with header")
    for j, name in enumerate(header):
        cols[name] = table[:, j]

    features = []  # (name, is_real, re_column, im_column or None)
    seen = set()
    for name in header[:-1]:
        if name in seen:
            continue
        if name.endswith("_re"):
            base = name[:-3]
            mate = base + "_im"
            if mate not in cols:
                raise DataError(f"{path}: {name} has no matching {mate}")
            features.append((base, False, cols[name], cols[mate]))
            seen.update((name, mate))
        elif name.endswith("_im"):
            base = name[:-3]
            if base + "_re" not in cols:
                raise DataError(f"{path}: {name} has no matching {base}_re")
            # handled when the _re column is reached
        else:
            features.append((name, True, cols[name], None))
            seen.add(name)

    n = table.shape[0]
    re = np.zeros((n, len(features)))
    im = np.zeros((n, len(features)))
    names, flags, norm_constants = [], [], {}

    def normalize(channel, label):
        lo, hi = channel.min(), channel.max()
        norm_constants[label] = (float(lo), float(hi))
        if lo == hi:
            warnings.warn(f"constant channel {label}; mapped to grid center")
            return np.full_like(channel, 0.5 * (grid.lo + grid.hi))
        return grid.lo + (channel - lo) * (grid.hi - grid.lo) / (hi - lo)

    for j, (name, is_real, c_re, c_im) in enumerate(features):
        names.append(name)
        flags.append(is_real)
        re[:, j] = normalize(c_re, name if is_real else name + "_re")
        if c_im is not None:
            im[:, j] = normalize(c_im, name + "_im")

    signature = cols["signature"]
    if not np.all(signature == np.round(signature)):
        raise DataError(f"{path}: signature column must be integral")
    values = np.unique(signature)
    labels = np.searchsorted(values, signature)
    ds = Dataset(
        ComplexBatch.from_channels(re, im), None, labels.astype(np.int64),
        names, flags, "knots",
    )
    ds.extra["norm_constants"] = norm_constants
    ds.extra["signature_values"] = [int(v) for v in values]
    return ds


def gen_knot_surrogate(n: int, seed: int, grid: GridSpec = GridSpec()) -> Dataset:
    """Synthetic stand-in for the knot CSV: 15 features, 14 classes.

    13 features are real-flagged, two are complex; the label depends mostly
    on the two complex features so relevance rankings have structure.
    """
    if n < 14:
        raise DataError("surrogate needs at least one sample per class")
    rng = np.random.default_rng(seed)
    re = rng.uniform(grid.lo, grid.hi, (n, 15))
    im = np.zeros((n, 15))
    im[:, 13:] = rng.uniform(grid.lo, grid.hi, (n, 2))
    score = (1.5 * re[:, 13] + im[:, 13] + 0.8 * np.abs(re[:, 14] + 1j * im[:, 14])
             + 0.3 * re[:, 0])
    edges = np.quantile(score, np.linspace(0, 1, 15)[1:-1])
    labels = np.digitize(score, edges)
    names = [f"inv_r{j:02d}" for j in range(13)] + ["merid_translat_c", "short_geodesic_c"]
    return Dataset(
        ComplexBatch.from_channels(re, im), None, labels.astype(np.int64),
        names, [True] * 13 + [False, False], "knots_surrogate",
    )


# ---------------------------------------------------------------------------
# split-real adapter


def to_split_real(d: Dataset):
    """Complex columns become (Re, Im) pairs; originally-real stay single.

    Returns (dataset, split_map).  The returned dataset stores everything
    in the real channel (imaginary parts all zero); ``split_map`` records,
    per original column, either ("real", j) or ("pair", j_re, j_im) so that
    predictions can be recombined for comparable complex metrics.
    """
    def split_block(batch: ComplexBatch, flags):
        mapping = []
        columns = []
        for j in range(batch.cols):
            if flags[j]:
                mapping.append(("real", len(columns)))
                columns.append(batch.re[:, j])
            else:
                mapping.append(("pair", len(columns), len(columns) + 1))
                columns.append(batch.re[:, j])
                columns.append(batch.im[:, j])
        return np.column_stack(columns), mapping

    f_real, f_map = split_block(d.features, d.real_flags)
    new_names = []
    for j, flag in enumerate(d.real_flags):
        if flag:
            new_names.append(d.feature_names[j])
        else:
            new_names.extend([f"{d.feature_names[j]}_re", f"{d.feature_names[j]}_im"])
    if d.targets is not None:
        t_real, t_map = split_block(d.targets, [False] * d.targets.cols)
        targets = ComplexBatch.from_channels(t_real, np.zeros_like(t_real))
        labels = None
    else:
        t_map = None
        targets = None
        labels = d.labels
    split = Dataset(
        ComplexBatch.from_channels(f_real, np.zeros_like(f_real)),
        targets, labels, new_names, [True] * f_real.shape[1],
        d.name + "_split", dict(d.extra),
    )
    return split, {"features": f_map, "targets": t_map}


def recombine(real_array: np.ndarray, mapping) -> np.ndarray:
    """Inverse of the column split: real matrix -> complex matrix."""
    real_array = np.asarray(real_array, dtype=np.float64)
    out = np.empty((real_array.shape[0], len(mapping)), dtype=np.complex128)
    for j, entry in enumerate(mapping):
        if entry[0] == "real":
            out[:, j] = real_array[:, entry[1]]
        else:
            out[:, j] = real_array[:, entry[1]] + 1j * real_array[:, entry[2]]
    return out
