"""Smoke test for the gframe_py extension module.

Build and install first, e.g.  pip install --no-build-isolation ./crates/py
then run  python python/smoke_test.py  (or pytest python/).
"""

import json
import math

import gframe_py as gf


def test_algebra_and_module():
    a = gf.AlgebraElement([[2, 1j], [-1j, 2]])
    assert a.is_positive()
    r = a.sqrt()
    assert abs((r @ r - a).norm()) < 1e-12
    x = gf.ModuleVector([gf.AlgebraElement([[3]]), gf.AlgebraElement([[4]])])
    assert math.isclose(x.norm(), 5.0)
    assert x.inner(x).to_list() == [[25 + 0j]]


def test_operator_lemmas():
    t = gf.ModuleOperator(1, 2, 1, [[1], [2]])
    assert t.is_surjective()
    assert t.lemma3_check()
    x = gf.ModuleVector.random(1, 2, seed=3)
    assert t.lemma1_check(x)
    assert t.compose(t.adjoint()).eigenvalues() == [5.0]


def test_parseval_scenario():
    s = gf.generate(seed=4, n=2, d=2, m=4, flavor_name="parseval")
    report = s.analyze()
    assert report["verdict"] == "frame"
    assert abs(report["bounds"]["lower"] - 1) < 1e-12
    assert abs(report["bounds"]["upper"] - 1) < 1e-12
    x = gf.ModuleVector.random(2, 2, seed=1)
    _, err, _ = s.reconstruct(x)
    assert err < 1e-12
    again = gf.Scenario.from_json(s.to_json())
    assert again.to_json() == s.to_json()


def test_bessel_only_raises():
    s = gf.generate(seed=4, n=2, d=2, m=4, flavor_name="bessel_only")
    assert s.analyze()["verdict"] == "bessel_only"
    try:
        s.reconstruct(gf.ModuleVector.random(2, 2, seed=1))
    except gf.NotAFrameError:
        pass
    else:
        raise AssertionError("expected NotAFrameError")


def test_schema_error_names_path():
    s = json.loads(gf.generate(seed=1, n=1, d=1, m=2).to_json())
    s["points"][0]["weight"] = -1.0
    try:
        gf.Scenario.from_json(json.dumps(s))
    except gf.GFrameError as e:
        assert "points[0].weight" in str(e)
    else:
        raise AssertionError("expected GFrameError")


def test_verify_small_batch():
    specs = [{"seed": i, "n": 1, "d": 2, "m": 3, "flavor": "parseval"} for i in range(5)]
    report = gf.verify(specs)
    statuses = {r["check_id"]: r["status"] for r in report["results"]}
    assert statuses["prop_controlled_bounds_probe"] == "empirical"
    assert all(v != "fail" for v in statuses.values())


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok  {name}")
    print("smoke test passed")
