import dataclasses
import random

import pytest

from frustint.timing import MM, SPEED_OF_LIGHT, Geometry, arrival_times, check_alignment

C = SPEED_OF_LIGHT


def test_zero_geometry():
    for swapped in (False, True):
        assert all(t == 0 for t in arrival_times(Geometry(), swapped).times.values())
    assert check_alignment(Geometry()).passed


def test_unswapped_substitution():
    g = Geometry(l_sp1=100, l_si=50, l_ci=30, l_BD=10)
    t = arrival_times(g, swapped=False).times
    assert t["t_i1"] == pytest.approx((100 + 100 + 60 + 20) * MM / C, rel=1e-15)
    assert set(t) == {"t_i1", "t_s1", "t_P3"}


def test_swapped_idlers_differ_by_one_displacer():
    g = Geometry(l_sp1=80, l_si=20, l_ci=33, l_BD=39.7)
    t = arrival_times(g, swapped=True).times
    assert t["t'_i2"] - t["t'_i1"] == pytest.approx(39.7 * MM / C, rel=1e-12)


def random_aligned(rng):
    return Geometry.aligned(l_sp1=rng.uniform(0, 500), l_sp2=rng.uniform(50, 300),
                            l_cp=rng.uniform(50, 300), l_si=rng.uniform(0, 100),
                            l_ss=rng.uniform(0, 100), l_BD=rng.uniform(1, 60))


def test_aligned_geometries_pass():
    rng = random.Random(5)
    for _ in range(200):
        r = check_alignment(random_aligned(rng))
        assert r.passed, r.failures
        t = r.times
        assert abs(t["t'_i2"] - t["t_P3"]) <= 1e-15 * t["t_P3"]
        assert t["t_P3"] != t["t_P4"]


def test_perturbed_idler_arm():
    g = Geometry.aligned(100, 40, 25, 30, 20, 10)
    r = check_alignment(dataclasses.replace(g, l_ci=g.l_ci + 1.0))
    assert not r.conditions["idler_I_III"]
    assert not r.path_matches["path1"]
    assert r.path_mismatch_s["path1"] == pytest.approx(2 * MM / C, rel=1e-9)
    assert r.conditions["signal_I_III"] and r.path_matches["path2"]


def test_perturbed_signal_arm_names_path4():
    g = Geometry.aligned(100, 40, 25, 30, 20, 10)
    r = check_alignment(dataclasses.replace(g, l_ss2=g.l_ss2 + 0.01))
    assert r.failures == ["signal_II_IV", "path4"]


def test_tolerance_is_in_micrometres():
    g = Geometry.aligned(100, 40, 25, 30, 20, 10)
    nudged = dataclasses.replace(g, l_ss1=g.l_ss1 + 0.0002)  # round trip: 0.4 um
    assert check_alignment(nudged, tolerance_um=1.0).passed
    assert not check_alignment(nudged, tolerance_um=0.1).passed


def test_geometry_validation():
    with pytest.raises(ValueError):
        Geometry(l_si=-1)
    with pytest.raises(ValueError):
        Geometry.from_dict({"l_xx": 1})
