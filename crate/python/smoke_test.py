"""Smoke test for the extension module; run `python/build.sh` first."""
import cmath
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import holofeyn

EDGE = "dim 1\nvertices 2\nedge 1 2\n"
BIGON = "dim 1\nvertices 2\nedge 1 2\nedge 1 2\n"
TRIANGLE = "dim 1\nvertices 3\nedge 1 2\nedge 2 3\nedge 3 1\n"


def test_classify():
    assert holofeyn.classify(EDGE)["laman"]
    assert not holofeyn.classify(TRIANGLE)["laman"]
    assert holofeyn.classify(TRIANGLE, d=2)["laman"]
    assert holofeyn.classify(TRIANGLE)["anomaly_vanishes"]


def test_symbolic():
    assert holofeyn.kirchhoff(TRIANGLE) == "t1 + t2 + t3"
    assert holofeyn.minverse(EDGE) == [["t1"]]


def test_bigon_symbol():
    coeffs = holofeyn.anomaly(BIGON)
    assert list(coeffs) == [(1,)]
    assert abs(coeffs[(1,)] - 2j / math.pi) < 1e-9
    assert holofeyn.anomaly(TRIANGLE) == {}


def test_eval_against_monte_carlo():
    w, err = holofeyn.eval_w(TRIANGLE, eps=0.1, l=4.0, rtol=1e-7)
    assert err < 1e-6
    mc, sigma = holofeyn.mc_oracle(TRIANGLE, 0.1, 4.0, 200000, 11)
    assert abs(w - mc) < 4 * sigma


def test_quadratic_relation():
    residual, relative, max_term = holofeyn.quadratic_check(TRIANGLE)
    assert relative < 1e-4 and max_term > 0.1
    assert cmath.isfinite(residual)


def test_errors():
    for bad, exc in [("dim 1\nvertices 2\nedge 1 frog\n", ValueError), ("dim 1\nvertices 1\nedge 1 1\n", ValueError)]:
        try:
            holofeyn.classify(bad)
        except exc:
            continue
        raise AssertionError(bad)


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"{name}: ok")
