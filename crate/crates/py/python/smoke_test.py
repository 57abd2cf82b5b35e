"""Smoke test for the compiled extension: python python/smoke_test.py"""

import json

import bsll


def main():
    a = bsll.Matrix.zero(2, 2)
    g = bsll.build_group(a)
    assert g.is_consistent and g.order == 8
    assert bsll.order_oracle(a) == 8
    assert g.shift_is_faithful()

    c = g.covering(g.corner_element())
    assert c.is_valid(), c.validate()
    assert c.sheets() == 4

    bad = bsll.build_group(bsll.Matrix(2, 2, [[1]]))
    assert bad.covering(bad.corner_element()).validate() == ["order(u) ≠ p (order 4)"]

    assert len(bsll.enumerate_matrices(2, 3)) == 8
    assert bsll.iso_sufficient(c, c) and bsll.iso_necessary(c, c)

    report = json.loads(bsll.count_overlattices(2, 1))
    assert (report["classes_necessary"], report["classes_sufficient"]) == (1, 1)
    assert report["bounds_ok"]["all"]

    assert bsll.ball_profile(3, 3) == {6: 1 + 6 + 30}

    try:
        bsll.Matrix.zero(4, 2)
    except ValueError:
        pass
    else:
        raise AssertionError("4 accepted as a prime")

    print("smoke test passed, bsll", bsll.__version__)


if __name__ == "__main__":
    main()
