"""Smoke tests for the python bindings: build the default instances and check
a handful of known values end to end."""

import math
import sys

import _projcx as px


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def test_hyperbolic_basics():
    approx(px.hyp_distance(0, 1, 0, 2), math.log(2))
    approx(px.hyp_distance(0, 1, 1, 1), math.acosh(1.5))
    # standard pair: axes (0, inf) and (-1, 1), translation length 2 ln 4
    a0, a1, tl = px.axis_of(4, 0, 0, 0.25)
    assert a0 == 0 and a1 is None
    approx(tl, 2 * math.log(4))
    approx(px.dpi_geodesics(-1, 1, 2, 3, -3, -2), 2 * math.log(3))


def test_schottky_validate_and_complex():
    sch = px.schottky_instance(radius=3)
    sys_ = sch.system
    assert len(sys_) == 54
    report = sys_.validate_axioms()
    assert report["ok"]
    assert report["minimal_valid_xi"] < sys_.xi

    params = px.CoreParams(sys_.xi)
    d = px.ModifiedDistances(sys_)
    complex_ = px.build_complex(d, params)
    assert complex_.connected
    assert complex_.diameter() >= 2
    assert complex_.bottleneck()["delta"] <= 9

    tm = d.theorem_main(params)
    assert tm["all_pass"]


def test_chain_blowup():
    chain = px.synthetic_chain(count=8, big=70.0)
    d = px.ModifiedDistances(chain)
    params = px.CoreParams(chain.xi)
    complex_ = px.build_complex(d, params)
    assert complex_.diameter() == 7  # a path graph end to end
    assert d.order_interval(0, 7, params.K) == list(range(8))

    blow = px.build_blowup(chain, d, params, complex_)
    assert blow.node_count > 0 and blow.bridge_count == 7
    lo, hi = blow.window(0)
    x = (0, (lo + hi) // 2)
    lo, hi = blow.window(7)
    z = (7, (lo + hi) // 2)
    lower, actual, upper, ok = blow.sandwich(d, x, z)
    assert ok and 0 < lower <= actual <= upper
    trace = blow.trace(d, x, z)
    assert trace["contiguous"] and trace["covers_forced"] and trace["in_order"]
    assert [v[0] for v in trace["visits"]] == list(range(8))


def test_action_probes():
    sch = px.schottky_instance(radius=2)
    ctx = px.ActionContext(sch)
    eq = ctx.equivariance(100, 7)
    assert eq["pass"]
    # a fixes its own axis, which is vertex 0 of the enumeration
    assert ctx.apply("a", 0) == 0


def test_experiment_reports():
    report = px.run_validate(instance="schottky-default", radius=2)
    assert report["axioms"]["ok"]
    assert report["theorem_main"]["all_pass"]
    analyze = px.run_analyze(instance="chain-synthetic", pairs=20, seed=3)
    assert analyze["complex"]["distance_bounds"]["all_ok"]
    assert analyze["blowup"]["sandwich"]["failures"] == 0


def main():
    tests = [v for k, v in globals().items() if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok: {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
