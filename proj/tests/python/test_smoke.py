import math

import pytest

import hrma


def test_fubini_study_lifespan():
    t, argmin = hrma.convex_lifespan(hrma.builtin("fubini-study"))
    assert abs(t - 1.0) < 1e-6
    assert abs(argmin[0]) < 1e-3


def test_convex_velocity_has_infinite_lifespan():
    data = hrma.parse_config("dimension = 1\nfacet = 1 -1\nfacet = -1 -1\nudot0 = 0 0 1\n")
    t, argmin = hrma.convex_lifespan(data)
    assert math.isinf(t)
    assert argmin == []


def test_a_set_matches_tangency_equation():
    (comps,) = hrma.a_set(hrma.builtin("fubini-study"), 2.0)
    assert len(comps) == 1
    a = comps[0][1]
    assert abs(math.log((1 + a) / (1 - a)) - 4 * a) < 1e-8
    assert abs(comps[0][0] + a) < 1e-9


def test_psi_at_zero_and_kink():
    data = hrma.builtin("fubini-study")
    assert abs(hrma.psi(data, 0.0, [0.0])[0]) < 1e-12
    ks = hrma.kinks(data, 2.0)
    assert len(ks) == 1
    x, a, b = ks[0]
    assert abs(x) < 1e-12
    assert abs(a + b) < 1e-12
    assert abs(math.log((1 + b) / (1 - b)) - 4 * b) < 1e-9
    assert hrma.kinks(data, 0.5) == []


def test_conjugate_of_parabola():
    xs = [i / 100 - 1 for i in range(201)]
    vs = [0.5 * x * x for x in xs]
    slopes, values = hrma.conjugate(xs, vs, [-0.5, 0.0, 0.5])
    for p, v in zip(slopes, values):
        assert abs(v - 0.5 * p * p) < 1e-12


def test_mass_is_zero_before_lifespan_and_bounded_after():
    data = hrma.builtin("fubini-study")
    assert hrma.mass(data, 1.0, raster=256, s_mesh=100)["mass_singular_lower"] == 0.0
    r = hrma.mass(data, 1.5, raster=256, s_mesh=100)
    assert 0.0 < r["mass_singular_lower"] < r["prop3_bound"]


def test_bad_config_names_field():
    with pytest.raises(ValueError, match="udot0"):
        hrma.parse_config("dimension = 1\nfacet = 1 -1\nfacet = -1 -1\n")
