"""Array kernels against naive scalar loops and the numpy backend."""

import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from ruellezeta import kernels

TWO_PI = 2.0 * math.pi


def _workload(seed=11, n_targets=37, n_terms=200, n_segments=5):
    rng = np.random.default_rng(seed)
    ma = rng.normal(size=n_terms)
    mb = rng.normal(size=n_terms)
    mc = rng.normal(size=n_terms)
    md = rng.normal(size=n_terms)
    mdet = ma * md - mb * mc
    # keep determinants away from zero so every ratio is well defined
    mdet = np.where(np.abs(mdet) < 0.1, np.sign(mdet) + (mdet == 0), mdet)
    cuts = np.sort(rng.choice(np.arange(1, n_terms), n_segments - 1,
                              replace=False))
    offsets = np.concatenate(([0], cuts, [n_terms])).astype(np.int64)
    cx = rng.normal(size=n_targets) * 3.0
    cy = rng.uniform(0.2, 4.0, size=n_targets)
    tm = rng.uniform(-math.pi, math.pi, size=n_terms)
    tp = rng.uniform(-math.pi, math.pi, size=n_terms)
    gm = rng.uniform(-math.pi, math.pi, size=n_targets)
    gp = rng.uniform(-math.pi, math.pi, size=n_targets)
    return ma, mb, mc, md, mdet, offsets, cx, cy, tm, tp, gm, gp


def _naive_base(ma, mb, mc, md, mdet, offsets, cx, cy, sigma):
    out = np.zeros((len(cx), len(offsets) - 1))
    for p in range(len(cx)):
        for r in range(len(offsets) - 1):
            acc = 0.0
            for t in range(offsets[r], offsets[r + 1]):
                na = ma[t] * cx[p] + mb[t]
                nb = ma[t] * cy[p]
                da = mc[t] * cx[p] + md[t]
                db = mc[t] * cy[p]
                ratio = (na * da + nb * db) / (cy[p] * mdet[t]) / sigma
                acc += math.exp(-ratio * ratio)
            out[p, r] = acc
    return out


def _naive_section(tm, tp, offsets, gm, gp, sigma, wrap):
    out = np.zeros((len(gm), len(offsets) - 1))
    for p in range(len(gm)):
        for r in range(len(offsets) - 1):
            acc = 0.0
            for t in range(offsets[r], offsets[r + 1]):
                dm = abs(gm[p] - tm[t])
                dp = abs(gp[p] - tp[t])
                if wrap:
                    dm = min(dm, TWO_PI - dm)
                    dp = min(dp, TWO_PI - dp)
                acc += math.exp(-(dm * dm + dp * dp) / sigma ** 2)
            out[p, r] = acc
    return out


def test_base_sums_match_naive_loop():
    ma, mb, mc, md, mdet, offsets, cx, cy, *_ = _workload()
    got = kernels.base_sums(ma, mb, mc, md, mdet, offsets, cx, cy, 0.7)
    want = _naive_base(ma, mb, mc, md, mdet, offsets, cx, cy, 0.7)
    assert got.shape == (37, 5)
    assert np.max(np.abs(got - want)) <= 1e-13 * np.max(np.abs(want) + 1)


def test_section_sums_match_naive_loop():
    *_, offsets, _, _, tm, tp, gm, gp = _workload()
    for wrap in (True, False):
        got = kernels.section_sums(tm, tp, offsets, gm, gp, 0.4, wrap)
        want = _naive_section(tm, tp, offsets, gm, gp, 0.4, wrap)
        assert np.max(np.abs(got - want)) <= 1e-13 * np.max(want)


def test_section_wrap_identifies_antipodal_angles():
    offsets = np.array([0, 1], dtype=np.int64)
    tm = np.array([math.pi - 0.01])
    tp = np.array([0.0])
    gm = np.array([-math.pi + 0.01])
    gp = np.array([0.0])
    wrapped = kernels.section_sums(tm, tp, offsets, gm, gp, 0.1, True)
    flat = kernels.section_sums(tm, tp, offsets, gm, gp, 0.1, False)
    # through the wrap the angles are 0.02 apart; without it ~2 pi
    assert wrapped[0, 0] == pytest.approx(math.exp(-0.02 ** 2 / 0.01))
    assert flat[0, 0] < 1e-300


def test_base_sums_match_scalar_weight_integral(torus):
    # the grid kernel must reproduce the scalar per-word integral so
    # section/base grids agree with spot checks to rounding
    from ruellezeta.weights import (WeightSpec, base_period_integral,
                                    precompute_geometry)

    spec = WeightSpec(kind="gauss_base", sigma=0.3)
    geometry = precompute_geometry(torus, None, (0, 1), spec)
    ma = [m.a for m in geometry.maps]
    mb = [m.b for m in geometry.maps]
    mc = [m.c for m in geometry.maps]
    md = [m.d for m in geometry.maps]
    mdet = [m.det for m in geometry.maps]
    offsets = np.array([0, len(ma)], dtype=np.int64)
    targets = [2 + 1.5j, 0.1 + 0.9j, -3.0 + 2.2j]
    cx = [z.real for z in targets]
    cy = [z.imag for z in targets]
    sums = kernels.base_sums(ma, mb, mc, md, mdet, offsets, cx, cy, 0.3)
    norm = math.sqrt(math.pi) * 0.3 * geometry.n_translates
    for k, z in enumerate(targets):
        want = base_period_integral(geometry, z, 0.3)
        assert math.isclose(sums[k, 0] / norm, want, rel_tol=1e-13)


def _checksums():
    ma, mb, mc, md, mdet, offsets, cx, cy, tm, tp, gm, gp = _workload(23)
    base = kernels.base_sums(ma, mb, mc, md, mdet, offsets, cx, cy, 0.9)
    section = kernels.section_sums(tm, tp, offsets, gm, gp, 0.5, True)
    return {
        "backend": kernels.backend_name(),
        "base": float(np.sum(base * np.arange(1, base.size + 1)
                             .reshape(base.shape))),
        "section": float(np.sum(section * np.arange(1, section.size + 1)
                                .reshape(section.shape))),
    }


def test_numba_and_numpy_backends_agree():
    here = _checksums()
    env = dict(os.environ)
    env["RUELLEZETA_NUMBA"] = "0" if here["backend"] == "numba" else "1"
    code = ("import json, tests.test_kernels as t; "
            "print(json.dumps(t._checksums()))")
    proc = subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True,
                          cwd=os.path.dirname(os.path.dirname(__file__)))
    assert proc.returncode == 0, proc.stderr
    other = json.loads(proc.stdout.strip().splitlines()[-1])
    assert other["backend"] != here["backend"]
    assert {here["backend"], other["backend"]} >= {"numba"} or \
        "numpy" in here["backend"]
    for key in ("base", "section"):
        assert math.isclose(here[key], other[key], rel_tol=1e-13)


def test_warmup_runs():
    kernels.warmup()
    assert kernels.backend_name() in (
        "numba", "numpy (numba unavailable)", "numpy (flag disabled)")
