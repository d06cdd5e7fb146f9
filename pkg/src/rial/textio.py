"""Portable text serialization of benchmark instances.

Plain-text format for reproducibility archives: one header line per block,
matrices as a "matrix <name> <rows> <cols>" line followed by row-major
decimal values (one row per line, %.17g so float64 round-trips exactly).
"""

import numpy as np

from .problems import CcaInstance, PcaInstance

_MAGIC = "rial-instance v1"


def write_matrix(fh, name, mat):
    mat = np.asarray(mat, dtype=np.float64)
    rows, cols = mat.shape
    fh.write(f"matrix {name} {rows} {cols}\n")
    for row in mat:
        fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def read_matrix(fh, name):
    header = fh.readline().split()
    if len(header) != 4 or header[0] != "matrix" or header[1] != name:
        raise ValueError(f"expected matrix block {name!r}, got {header}")
    rows, cols = int(header[2]), int(header[3])
    mat = np.empty((rows, cols))
    for i in range(rows):
        mat[i] = np.fromstring(fh.readline(), sep=" ")
    if mat.shape != (rows, cols):
        raise ValueError(f"matrix {name!r} has inconsistent dimensions")
    return mat


def save_instance(path, inst):
    """Write a PCA or CCA instance to a text file."""
    with open(path, "w", encoding="ascii") as fh:
        if isinstance(inst, PcaInstance):
            fh.write(f"{_MAGIC} pca\n")
            fh.write(f"mu {inst.mu:.17g} r {inst.r}\n")
            write_matrix(fh, "data", inst.data)
        elif isinstance(inst, CcaInstance):
            fh.write(f"{_MAGIC} cca\n")
            fh.write(
                f"mu1 {inst.mu1:.17g} mu2 {inst.mu2:.17g} r {inst.r} "
                f"ridge {inst.ridge_scale:.17g}\n"
            )
            write_matrix(fh, "a", inst.a)
            write_matrix(fh, "b", inst.b)
        else:
            raise TypeError(f"cannot serialize {type(inst).__name__}")


def load_instance(path):
    """Read back an instance written by :func:`save_instance`."""
    with open(path, encoding="ascii") as fh:
        magic = fh.readline().split()
        if magic[:2] != _MAGIC.split():
            raise ValueError(f"{path} is not a rial instance file")
        kind = magic[2]
        params = fh.readline().split()
        if kind == "pca":
            return PcaInstance(
                data=read_matrix(fh, "data"), mu=float(params[1]), r=int(params[3])
            )
        if kind == "cca":
            a = read_matrix(fh, "a")
            b = read_matrix(fh, "b")
            return CcaInstance(
                a=a,
                b=b,
                mu1=float(params[1]),
                mu2=float(params[3]),
                r=int(params[5]),
                ridge_scale=float(params[7]),
            )
        raise ValueError(f"unknown instance kind {kind!r}")
