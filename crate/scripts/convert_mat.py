#!/usr/bin/env python3
"""Convert a MATLAB graph anomaly dataset into a freegad dataset directory.

The .mat file must hold an adjacency matrix, a node feature matrix and a
0/1 label vector. Common key names are detected automatically:

    adjacency: Network, A, adj, homo, net
    features:  Attributes, X, features, feat
    labels:    Label, gnd, label, labels, y

Output directory layout:

    edges.tsv     one "i<TAB>j" line per undirected edge, zero-based, i < j
    features.bin  little-endian u64 n, u64 m, then n*m float64 row-major
    labels.tsv    one 0/1 per line
    meta.toml     name = "...", n = ...

Example:

    python3 scripts/convert_mat.py Amazon.mat data/amazon --name amazon
    FREEGAD_AMAZON_DIR=data/amazon cargo test --release -p freegad --test acceptance
"""

import argparse
import struct
import sys
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

ADJ_KEYS = ("Network", "A", "adj", "homo", "net")
FEAT_KEYS = ("Attributes", "X", "features", "feat")
LABEL_KEYS = ("Label", "gnd", "label", "labels", "y")


def load_mat(path):
    import h5py

    if h5py.is_hdf5(path):
        return load_mat73(path)
    return scipy.io.loadmat(path)


def load_mat73(path):
    """MATLAB v7.3 files are HDF5; sparse matrices are stored as (data, ir, jc) groups."""
    import h5py

    out = {}
    with h5py.File(path, "r") as f:
        for key, item in f.items():
            if isinstance(item, h5py.Group) and {"data", "ir", "jc"} <= set(item.keys()):
                n_rows = int(item.attrs.get("MATLAB_sparse", 0))
                jc = item["jc"][()]
                mat = sp.csc_matrix((item["data"][()], item["ir"][()], jc), shape=(n_rows, len(jc) - 1))
                out[key] = mat
            elif isinstance(item, h5py.Dataset):
                out[key] = item[()].T
    return out


def pick(mat, keys, wanted, override):
    if override:
        if override not in mat:
            sys.exit(f"key {override!r} not found; available: {sorted(k for k in mat if not k.startswith('__'))}")
        return mat[override]
    for k in keys:
        if k in mat:
            return mat[k]
    sys.exit(f"no {wanted} matrix found (tried {', '.join(keys)}); pass --{wanted}-key")


def convert(mat, out, name, adj_key=None, feat_key=None, label_key=None):
    adj = sp.csr_matrix(pick(mat, ADJ_KEYS, "adjacency", adj_key))
    feats = pick(mat, FEAT_KEYS, "features", feat_key)
    feats = feats.toarray() if sp.issparse(feats) else np.asarray(feats)
    feats = np.ascontiguousarray(feats, dtype="<f8")
    labels = pick(mat, LABEL_KEYS, "labels", label_key)
    labels = (labels.toarray() if sp.issparse(labels) else np.asarray(labels)).ravel()

    n = adj.shape[0]
    if adj.shape != (n, n):
        sys.exit(f"adjacency is not square: {adj.shape}")
    if feats.shape[0] != n:
        if feats.shape[1] == n:
            feats = np.ascontiguousarray(feats.T)
        else:
            sys.exit(f"features have {feats.shape[0]} rows, adjacency has {n} nodes")
    if labels.shape[0] != n:
        sys.exit(f"{labels.shape[0]} labels for {n} nodes")
    if not np.isfinite(feats).all():
        sys.exit("features contain NaN or infinite values")
    labels = (labels != 0).astype(np.uint8)

    sym = (adj + adj.T).tocoo()
    keep = sym.row < sym.col
    edges = np.unique(np.stack([sym.row[keep], sym.col[keep]], axis=1), axis=0)

    out.mkdir(parents=True, exist_ok=True)
    with open(out / "edges.tsv", "w") as f:
        f.write(f"# {name}: {len(edges)} undirected edges\n")
        np.savetxt(f, edges, fmt="%d", delimiter="\t")
    with open(out / "features.bin", "wb") as f:
        f.write(struct.pack("<QQ", n, feats.shape[1]))
        f.write(feats.tobytes())
    np.savetxt(out / "labels.tsv", labels, fmt="%d")
    (out / "meta.toml").write_text(f'name = "{name}"\nn = {n}\n')
    return n, feats.shape[1], len(edges), int(labels.sum())


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("mat", type=Path)
    ap.add_argument("out", type=Path)
    ap.add_argument("--name", help="dataset name (default: file stem)")
    ap.add_argument("--adjacency-key")
    ap.add_argument("--features-key")
    ap.add_argument("--labels-key")
    args = ap.parse_args()
    name = args.name or args.mat.stem
    n, m, e, anomalies = convert(
        load_mat(args.mat), args.out, name, args.adjacency_key, args.features_key, args.labels_key
    )
    print(f"{name}: n={n} m={m} edges={e} anomalies={anomalies} ({100.0 * anomalies / n:.2f}%) -> {args.out}")


if __name__ == "__main__":
    main()
