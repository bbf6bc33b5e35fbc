"""Smoke test for the fofana extension module.

Build the module first, for example with
    cargo build --release -p fofana-py --features extension-module
    cp target/release/libfofana.so python/fofana.so
then run `python3 python/smoke.py`.
"""

import math
import sys

import fofana


def close(a, b, tol):
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


def main():
    grid = fofana.Grid(1, 64, 16)
    box = grid.sample(lambda x: 1.0 if 0.0 <= x[0] < 2.0 else 0.0)
    assert close(box.amalgam_norm(1.0, 4.0), 2.0 ** 0.25, 1e-12)

    bump = grid.sample(lambda x: math.exp(-math.pi * x[0] ** 2))
    for a in (1.0, 2.0, 3.0):
        assert close(bump.fofana_norm(a, a, a), bump.lp_norm(a), 1e-12)

    r = fofana.Ladder.dyadic(-3, 3)
    for rho in (0.5, 2.0):
        moved = bump.dilate(1.5, rho).fofana_norm(1.0, 2.0, 1.5, r)
        assert close(moved, bump.fofana_norm(1.0, 2.0, 1.5, r), 1e-12)

    radii = fofana.Ladder(grid.spacing, 2.0, 6)
    m = bump.hl_maximal(radii)
    assert close((bump * -2.0).hl_maximal(radii).max_abs(), 2.0 * m.max_abs(), 1e-15)

    values = bump.characterize(1.0, 2.0, 1.5)
    assert set(values) == {"maximal", "poisson", "riesz", "dilation"}
    assert all(v > 0.0 for v in values.values())
    assert close(values["dilation"], values["maximal"], 1e-10)

    z = fofana.half_time_derivative(lambda s: -4.0 * math.exp(-4.0 * s), 1.0)
    assert abs(z - complex(0.0, -2.0 * math.exp(-4.0))) <= 1e-6 * 2.0 * math.exp(-4.0)

    slab = fofana.Ladder(0.25, 2.0 ** 0.25, 16)
    cr = bump.harmonic_cr_residual(slab)
    assert max(cr.values()) <= 1e-2, cr

    try:
        bump.fofana_norm(2.0, 1.0, 3.0)
    except ValueError as e:
        assert "p <= alpha <= q" in str(e)
    else:
        raise AssertionError("misordered triple accepted")

    print(f"fofana {fofana.__version__}: smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
