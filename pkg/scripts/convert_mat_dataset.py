#!/usr/bin/env python3
"""Convert a MATLAB .mat multi-view file into the dataset directory layout.

Expects a cell array of per-view feature matrices plus a label vector,
the common distribution format for multi-view clustering corpora:

    python scripts/convert_mat_dataset.py coil.mat data/coil \\
        --views-key X --labels-key Y

Views stored as d x n are detected by comparing against the label length
and transposed; pass --transpose to force it. Requires scipy (v7.3 HDF5
.mat files are not supported).
"""

from __future__ import annotations

import argparse

import numpy as np
import scipy.io

from anchorclust import MultiViewDataset, save_dataset
from anchorclust.dataset import remap_labels


def extract_views(obj):
    """Flatten a MATLAB cell array into a list of per-view matrices."""
    if hasattr(obj, "toarray"):
        return [obj]
    arr = np.asarray(obj)
    if arr.dtype == object:
        return list(arr.ravel())
    return [arr]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("mat_file")
    parser.add_argument("output_dir")
    parser.add_argument("--views-key", default="X")
    parser.add_argument("--labels-key", default="Y")
    parser.add_argument("--transpose", action="store_true",
                        help="views are stored as d x n")
    parser.add_argument("--format", choices=["csv", "f64le"], default="f64le")
    args = parser.parse_args()

    mat = scipy.io.loadmat(args.mat_file)
    if args.views_key not in mat:
        usable = [k for k in mat if not k.startswith("__")]
        raise SystemExit(f"key {args.views_key!r} not in file; found {usable}")
    views = extract_views(mat[args.views_key])

    labels = None
    if args.labels_key in mat:
        labels = remap_labels(np.asarray(mat[args.labels_key]).ravel().astype(np.int64))

    n = len(labels) if labels is not None else views[0].shape[0]
    fixed = []
    for i, X in enumerate(views):
        if hasattr(X, "toarray"):
            X = X.toarray()
        if args.transpose or (X.shape[0] != n and X.shape[1] == n):
            X = X.T
        fixed.append(np.ascontiguousarray(X, dtype=np.float64))
        print(f"view {i}: {fixed[-1].shape}")

    ds = MultiViewDataset(views=fixed, labels=labels)
    save_dataset(ds, args.output_dir, fmt=args.format)
    print(f"wrote {args.output_dir} (n={ds.n}, V={ds.num_views}"
          + (f", c={ds.num_classes})" if labels is not None else ")"))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
