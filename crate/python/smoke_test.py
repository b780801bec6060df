"""Smoke test for the nilflow Python module.

Build and install first, e.g. `maturin develop --release` or
`pip install .` from the repository root, then run this script.
"""

import math

import nilflow


def close(x, y, tol):
    return abs(x - y) <= tol * max(1.0, abs(y))


def main():
    assert "p5" in nilflow.catalog_names()

    h3 = nilflow.Algebra(3, [(1, 2, 3, 1)])
    assert h3.is_valid()
    assert h3.gram() == [[3]]
    cert = h3.soliton_test([1.0, 1.0, 1.0])
    assert cert is not None and close(cert["beta"], -1.5, 1e-12)
    assert h3.exact_soliton([1.0, 1.0, 1.0])["beta"] == "-3/2"

    traj = h3.integrate([1.0, 1.0, 1.0], t_end=10.0, samples=10)
    q1 = traj["q"][-1][0]
    assert close(q1, 31.0 ** (1.0 / 3.0), 1e-6), q1

    p5 = nilflow.catalog_algebra("p5")
    assert p5.soliton_metric() == [1.0, 4.0, 1.0, 2.0, 4.0]
    assert p5.soliton_test() is not None
    assert p5.integrate(t_end=1.0)["q"][-1][3] == 2.0
    assert len(p5.conserved_monomials()) == 2

    r6 = nilflow.catalog_algebra("r6")
    assert r6.find_soliton_metric() is None

    points = p5.projective().equilibria()
    assert len(points) == 4
    origin = [p for p in points if p["exact"] == ["0", "0"]]
    assert origin[0]["classification"] == "repelling"

    l4b = nilflow.catalog_projective("l4b_gram")
    assert l4b.provenance == "gram-only"
    end = l4b.integrate([0.5, 2.0], t_end=30.0)["states"][-1]["s"]
    assert math.hypot(end[0] - 1.0, end[1]) < 1e-3, end

    try:
        nilflow.Algebra(3, [(1, 2, 3, 1), (1, 3, 1, 1)]).nilpotency_class()
    except ValueError:
        pass
    else:
        raise AssertionError("non-nilpotent algebra accepted")

    again = nilflow.Algebra.from_json(p5.to_json())
    assert again.brackets() == p5.brackets()
    print("nilflow smoke test passed")


if __name__ == "__main__":
    main()
