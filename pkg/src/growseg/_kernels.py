"""Compiled cellular-automaton cores.

The hot path of the package: the equivalence suite drives these kernels
through roughly a million tiny grids and batch runs push full rasters through
the same code, so the sweeps are jitted.  Everything is double-buffered --
reads come from the generation-t arrays, writes land in fresh buffers -- which
makes results independent of cell visitation order.  Neighbor offsets are
scanned in row-major order of the 3x3 window; on equal attack strengths the
first winner in that order stands (the strict ``>`` never lets a later equal
attack displace it).

No fastmath, no parallelism: bit-exact determinism is part of the contract.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# (dx, dy) in row-major scan order; must match grid.Neighborhood.offsets.
_DX8 = np.array([-1, 0, 1, -1, 1, -1, 0, 1], dtype=np.int64)
_DY8 = np.array([-1, -1, -1, 0, 0, 1, 1, 1], dtype=np.int64)
_DX4 = np.array([0, -1, 1, 0], dtype=np.int64)
_DY4 = np.array([-1, 0, 0, 1], dtype=np.int64)


@njit(cache=True)
def growcut_sweep(intensity, labels, strengths, out_labels, out_strengths,
                  moore, max_norm):
    """One synchronous generation; returns the number of label changes."""
    h, w = intensity.shape
    dxs = _DX8 if moore else _DX4
    dys = _DY8 if moore else _DY4
    changed = 0
    for y in range(h):
        for x in range(w):
            lab = labels[y, x]
            best_l = lab
            best_s = strengths[y, x]
            c = intensity[y, x]
            for k in range(dxs.shape[0]):
                nx = x + dxs[k]
                ny = y + dys[k]
                if nx < 0 or nx >= w or ny < 0 or ny >= h:
                    continue
                if labels[ny, nx] == 0:
                    continue  # strength 0 can never beat a defense >= 0
                d = c - intensity[ny, nx]
                if d < 0.0:
                    d = -d
                attack = (1.0 - d / max_norm) * strengths[ny, nx]
                if attack > best_s:
                    best_s = attack
                    best_l = labels[ny, nx]
            out_labels[y, x] = best_l
            out_strengths[y, x] = best_s
            if best_l != lab:
                changed += 1
    return changed


@njit(cache=True)
def growcut_run(intensity, labels0, strengths0, moore, max_norm, max_iters):
    la = labels0.copy()
    sa = strengths0.copy()
    lb = np.empty_like(la)
    sb = np.empty_like(sa)
    iters = 0
    converged = False
    while iters < max_iters:
        changed = growcut_sweep(intensity, la, sa, lb, sb, moore, max_norm)
        iters += 1
        la, lb = lb, la
        sa, sb = sb, sa
        if changed == 0:
            converged = True
            break
    return la, sa, iters, converged


@njit(cache=True)
def membership_grid(width, height, xm, ym, den_x, den_y):
    """Separable Gaussian object membership, one value per cell."""
    mu = np.empty((height, width), dtype=np.float64)
    for y in range(height):
        ey = np.exp(-((y - ym) ** 2) / den_y)
        for x in range(width):
            mu[y, x] = np.exp(-((x - xm) ** 2) / den_x) * ey
    return mu


@njit(cache=True)
def fuzzy_sweep(intensity, labels, strengths, mu, out_labels, out_strengths,
                moore, max_norm):
    """One synchronous generation of the membership-guarded automaton.

    Cells whose membership falls below one half sit in the background zone:
    they fight with model strength 1 whatever their stored state says, and
    their attacks always carry the background label.  A defender's model
    strength is recomputed after every adoption, so inside the object zone the
    running strength is what subsequent attackers must beat.
    """
    h, w = intensity.shape
    dxs = _DX8 if moore else _DX4
    dys = _DY8 if moore else _DY4
    changed = 0
    for y in range(h):
        for x in range(w):
            lab = labels[y, x]
            th = strengths[y, x]
            p_bkg = mu[y, x] < 0.5
            defense = 1.0 if p_bkg else th
            new_l = lab
            new_s = th
            c = intensity[y, x]
            for k in range(dxs.shape[0]):
                nx = x + dxs[k]
                ny = y + dys[k]
                if nx < 0 or nx >= w or ny < 0 or ny >= h:
                    continue
                q_bkg = mu[ny, nx] < 0.5
                theta_mq = 1.0 if q_bkg else strengths[ny, nx]
                d = c - intensity[ny, nx]
                if d < 0.0:
                    d = -d
                attack = (1.0 - d / max_norm) * theta_mq
                if attack > defense:
                    new_l = 2 if q_bkg else labels[ny, nx]
                    new_s = attack
                    defense = attack
            out_labels[y, x] = new_l
            out_strengths[y, x] = new_s
            if new_l != lab:
                changed += 1
    return changed


@njit(cache=True)
def fuzzy_run(intensity, labels0, strengths0, mu, moore, max_norm, max_iters):
    la = labels0.copy()
    sa = strengths0.copy()
    lb = np.empty_like(la)
    sb = np.empty_like(sa)
    iters = 0
    converged = False
    while iters < max_iters:
        changed = fuzzy_sweep(intensity, la, sa, mu, lb, sb, moore, max_norm)
        iters += 1
        la, lb = lb, la
        sa, sb = sb, sa
        if changed == 0:
            converged = True
            break
    return la, sa, iters, converged
