"""One-vs-one multiclass model, prediction, and libSVM-compatible persistence.

The in-memory layout mirrors the libSVM model file: support vectors grouped
by class, a (k-1, L) dual-coefficient matrix, and one rho per class pair in
(0,1), (0,2), ..., (1,2), ... order. Scaling parameters ride in a sidecar
``<path>.range`` file in svm-scale restore format.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError, ModelFormatError, UnsupportedKernelError
from .core import (ScalingParams, SvmParams, identity_scaling, kernel_matrix,
                   scale_apply, train_binary_smo)


@dataclass
class Model:
    classes: tuple  # sorted class ids
    gamma: float
    sv: np.ndarray  # (L, d) support vectors in scaled space
    sv_coef: np.ndarray  # (k-1, L) dual coefficients
    rho: tuple  # one per class pair
    nr_sv: tuple  # support vectors per class
    scaling: ScalingParams

    @property
    def class_offsets(self):
        off = [0]
        for n in self.nr_sv:
            off.append(off[-1] + n)
        return off


def _pair_index(i, j, k):
    # position of pair (i, j), i < j, in row-major pair order
    return sum(k - 1 - t for t in range(i)) + (j - i - 1)


def train_multiclass(X: np.ndarray, y, params: SvmParams,
                     scaling: ScalingParams | None = None) -> Model:
    """Train k(k-1)/2 pairwise machines and assemble the voting model.

    ``X`` holds raw vectors; ``scaling`` (fit on the training set) is applied
    here and stored in the model so prediction can scale inputs itself.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InvalidInputError("empty training set")
    if X.shape[0] != y.size:
        raise InvalidInputError("sample/label count mismatch")
    if scaling is None:
        scaling = identity_scaling(X.shape[1])
    Xs = scale_apply(scaling, X)

    classes = tuple(int(c) for c in np.unique(y))
    k = len(classes)
    idx_by_class = {c: np.nonzero(y == c)[0] for c in classes}

    # solve every pair, remembering per-sample dual coefficients
    pair_alpha = {}
    rho = []
    for a in range(k):
        for b in range(a + 1, k):
            ia, ib = idx_by_class[classes[a]], idx_by_class[classes[b]]
            sub = np.concatenate([ia, ib])
            y_pm = np.concatenate([np.ones(ia.size), -np.ones(ib.size)])
            alpha, r = train_binary_smo(Xs[sub], y_pm, params)
            rho.append(r)
            pair_alpha[(a, b)] = (sub, alpha * y_pm)

    # union of support vectors per class, in original sample order
    is_sv = np.zeros(y.size, dtype=bool)
    for sub, coef in pair_alpha.values():
        is_sv[sub[coef != 0]] = True
    sv_index = []
    nr_sv = []
    for c in classes:
        members = [i for i in idx_by_class[c] if is_sv[i]]
        sv_index.extend(members)
        nr_sv.append(len(members))
    position = {orig: pos for pos, orig in enumerate(sv_index)}

    sv_coef = np.zeros((max(k - 1, 0), len(sv_index)))
    for (a, b), (sub, coef) in pair_alpha.items():
        for orig, cf in zip(sub, coef):
            if cf == 0 or not is_sv[orig]:
                continue
            row = b - 1 if y[orig] == classes[a] else a
            sv_coef[row, position[orig]] = cf

    return Model(classes, params.gamma, Xs[sv_index], sv_coef,
                 tuple(rho), tuple(nr_sv), scaling)


def decision_values(model: Model, x) -> dict:
    """Pairwise decision values f_ij for one raw input vector."""
    xs = scale_apply(model.scaling, np.asarray(x, dtype=np.float64))
    k = len(model.classes)
    if model.sv.shape[0]:
        kv = kernel_matrix(model.sv, xs[None, :], model.gamma)[:, 0]
    else:
        kv = np.zeros(0)
    off = model.class_offsets
    out = {}
    p = 0
    for a in range(k):
        for b in range(a + 1, k):
            fa = model.sv_coef[b - 1, off[a]:off[a + 1]] @ kv[off[a]:off[a + 1]]
            fb = model.sv_coef[a, off[b]:off[b + 1]] @ kv[off[b]:off[b + 1]]
            out[(model.classes[a], model.classes[b])] = float(fa + fb - model.rho[p])
            p += 1
    return out


def predict(model: Model, x):
    """Majority vote over pairwise machines; ties go to the lowest class id.

    Returns (class id, votes per class in model.classes order).
    """
    k = len(model.classes)
    votes = np.zeros(k, dtype=np.int64)
    if k == 1:
        return model.classes[0], votes
    values = decision_values(model, x)
    for a in range(k):
        for b in range(a + 1, k):
            f = values[(model.classes[a], model.classes[b])]
            votes[a if f > 0 else b] += 1
    return model.classes[int(np.argmax(votes))], votes


def _fmt(x: float) -> str:
    return repr(float(x))


def dumps_model_text(model: Model) -> str:
    """libSVM c_svc/rbf model text (excluding the scaling sidecar)."""
    lines = ["svm_type c_svc",
             "kernel_type rbf",
             f"gamma {_fmt(model.gamma)}",
             f"nr_class {len(model.classes)}",
             f"total_sv {model.sv.shape[0]}",
             ("rho " + " ".join(_fmt(r) for r in model.rho)).rstrip(),
             "label " + " ".join(str(c) for c in model.classes),
             "nr_sv " + " ".join(str(n) for n in model.nr_sv),
             "SV"]
    for i in range(model.sv.shape[0]):
        parts = [_fmt(model.sv_coef[row, i]) for row in range(model.sv_coef.shape[0])]
        for d, v in enumerate(model.sv[i]):
            if v != 0:
                parts.append(f"{d + 1}:{_fmt(v)}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def save_model(model: Model, path) -> None:
    """Write libSVM model text plus a ``.range`` scaling sidecar."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model_text(model))

    with open(str(path) + ".range", "w", encoding="utf-8") as fh:
        fh.write("x\n-1 1\n")
        for d in range(model.scaling.lo.size):
            fh.write(f"{d + 1} {_fmt(model.scaling.lo[d])} {_fmt(model.scaling.hi[d])}\n")


def _load_scaling(path):
    """Entries of the ``.range`` sidecar as {1-based index: (lo, hi)}, or None."""
    range_path = str(path) + ".range"
    if not os.path.exists(range_path):
        return None
    entries = {}
    with open(range_path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    for line in lines[2:]:
        if not line.strip():
            continue
        idx_s, lo_s, hi_s = line.split()
        entries[int(idx_s)] = (float(lo_s), float(hi_s))
    return entries


def load_model(path) -> Model:
    """Parse a libSVM rbf model file; errors carry the offending line number."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()

    header = {}
    sv_start = None
    for lineno, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens:
            raise ModelFormatError(lineno, "blank line in header")
        if tokens[0] == "SV":
            sv_start = lineno
            break
        header[tokens[0]] = (tokens[1:], lineno)
    if not lines:
        raise ModelFormatError(1, "empty model file")
    if sv_start is None:
        raise ModelFormatError(len(lines), "missing SV section")

    def need(key):
        if key not in header:
            raise ModelFormatError(sv_start, f"missing header field {key!r}")
        return header[key]

    svm_type, lineno = need("svm_type")
    if svm_type != ["c_svc"]:
        raise ModelFormatError(lineno, f"unsupported svm_type {' '.join(svm_type)!r}")
    kernel, lineno = need("kernel_type")
    if kernel != ["rbf"]:
        raise UnsupportedKernelError(lineno, f"unsupported kernel_type {' '.join(kernel)!r}")

    try:
        gamma = float(need("gamma")[0][0])
        k = int(need("nr_class")[0][0])
        total = int(need("total_sv")[0][0])
        rho = tuple(float(v) for v in need("rho")[0])
        classes = tuple(int(v) for v in need("label")[0])
        nr_sv = tuple(int(v) for v in need("nr_sv")[0])
    except (ValueError, IndexError) as exc:
        raise ModelFormatError(sv_start, f"malformed header value: {exc}") from None
    if len(classes) != k or len(nr_sv) != k or sum(nr_sv) != total:
        raise ModelFormatError(sv_start, "inconsistent class/support-vector counts")
    if len(rho) != k * (k - 1) // 2:
        raise ModelFormatError(sv_start, f"expected {k * (k - 1) // 2} rho values")

    sv_lines = lines[sv_start:]
    if len(sv_lines) < total:
        raise ModelFormatError(len(lines), f"expected {total} SV lines, found {len(sv_lines)}")

    n_coef = max(k - 1, 0)
    dim = 0
    parsed = []
    for offset, line in enumerate(sv_lines[:total]):
        lineno = sv_start + 1 + offset
        tokens = line.split()
        if len(tokens) < n_coef:
            raise ModelFormatError(lineno, "missing dual coefficients")
        try:
            coefs = [float(t) for t in tokens[:n_coef]]
            feats = []
            for t in tokens[n_coef:]:
                idx_s, val_s = t.split(":", 1)
                feats.append((int(idx_s), float(val_s)))
        except ValueError as exc:
            raise ModelFormatError(lineno, f"malformed SV entry: {exc}") from None
        for idx, _ in feats:
            dim = max(dim, idx)
        parsed.append((coefs, feats))

    range_entries = _load_scaling(path)
    if range_entries:
        dim = max(dim, max(range_entries))

    sv = np.zeros((total, dim))
    sv_coef = np.zeros((n_coef, total))
    for i, (coefs, feats) in enumerate(parsed):
        sv_coef[:, i] = coefs
        for idx, val in feats:
            sv[i, idx - 1] = val

    if range_entries is None:
        scaling = identity_scaling(dim)
    else:
        lo = np.full(dim, -1.0)
        hi = np.full(dim, 1.0)
        for idx, (l, h) in range_entries.items():
            lo[idx - 1] = l
            hi[idx - 1] = h
        scaling = ScalingParams(lo, hi)
    return Model(classes, gamma, sv, sv_coef, rho, nr_sv, scaling)
