"""Pure-python (numpy) matching kernels.

Mirror of the compiled extension in _match_core.pyx; both must return
bit-identical results.  The tables use the same conventions as the scalar
evaluator: line angles live in [0, pi), eqangle compares the two directed
differences on the mod-pi circle, eqratio compares cross products of the
four segment lengths.
"""

import numpy as np

NAME = "python"


def angle_table(xs, ys):
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    dx = xs[None, :] - xs[:, None]
    dy = ys[None, :] - ys[:, None]
    ang = np.arctan2(dy, dx) % np.pi
    ang[ang >= np.pi] -= np.pi
    np.fill_diagonal(ang, 0.0)
    return ang


def dist_table(xs, ys):
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    dx = xs[None, :] - xs[:, None]
    dy = ys[None, :] - ys[:, None]
    return np.hypot(dx, dy)


def eqangle_mask(ang, inst, eps):
    inst = np.asarray(inst, dtype=np.int32)
    if inst.size == 0:
        return np.zeros(0, dtype=np.uint8)
    a1 = ang[inst[:, 0], inst[:, 1]]
    a2 = ang[inst[:, 2], inst[:, 3]]
    a3 = ang[inst[:, 4], inst[:, 5]]
    a4 = ang[inst[:, 6], inst[:, 7]]
    d1 = (a2 - a1) % np.pi
    d2 = (a4 - a3) % np.pi
    d = np.abs(d1 - d2) % np.pi
    d = np.minimum(d, np.pi - d)
    return (d < eps).astype(np.uint8)


def eqratio_mask(dist, inst, eps):
    inst = np.asarray(inst, dtype=np.int32)
    if inst.size == 0:
        return np.zeros(0, dtype=np.uint8)
    ab = dist[inst[:, 0], inst[:, 1]]
    cd = dist[inst[:, 2], inst[:, 3]]
    ef = dist[inst[:, 4], inst[:, 5]]
    gh = dist[inst[:, 6], inst[:, 7]]
    return (np.abs(ab * gh - cd * ef) < eps).astype(np.uint8)
