"""Gorenstein certification, Brown-Comenetz duality, injective hulls,
dual localization, absolute checks, twists and orthogonality."""

import pytest

from localduality.exactla import ContractViolation
from localduality.graded import (GradedModule, GradedRing, HomIdeal, Window)
from localduality.complexes import module_complex, homology
from localduality.duality import (absolute_gorenstein_check, brown_comenetz,
                                  dual_localize, gorenstein_certificate,
                                  injective_hull, maximal_ideal,
                                  orthogonality_check, twist_check)
from conftest import free, max_ideal


# Gorenstein certificates ------------------------------------------------------


def test_line_is_gorenstein(poly_line, window):
    cert = gorenstein_certificate(poly_line, window)
    assert cert.verdict is True
    assert (cert.krull_dim, cert.shift) == (1, 0)


def test_plane_is_gorenstein(poly_plane, window):
    cert = gorenstein_certificate(poly_plane, window)
    assert cert.verdict is True
    assert (cert.krull_dim, cert.shift) == (2, 0)


def test_hypersurface_is_gorenstein(hypersurface, window):
    cert = gorenstein_certificate(hypersurface, window)
    assert cert.verdict is True
    assert (cert.krull_dim, cert.shift) == (1, -1)


def test_exterior_algebra_is_gorenstein(window):
    ring = GradedRing(2, [("e", -1)], [{(2,): 1}], name="E")
    cert = gorenstein_certificate(ring, window)
    assert cert.verdict is True
    assert cert.krull_dim == 0


def test_non_gorenstein_with_witness(poly_plane, window):
    ring = poly_plane.quotient([poly_plane.parse("x^2"),
                                poly_plane.parse("x*y")], name="NG")
    cert = gorenstein_certificate(ring, window)
    assert cert.verdict is False
    assert cert.failure  # names the obstruction


def test_fat_point_not_gorenstein(poly_plane, window):
    ring = poly_plane.quotient([poly_plane.parse("x^2"),
                                poly_plane.parse("x*y"),
                                poly_plane.parse("y^2")], name="FP")
    cert = gorenstein_certificate(ring, window)
    assert cert.verdict is False


# injective hulls and Brown-Comenetz ------------------------------------------


def test_injective_hull_at_max(poly_line, window):
    im = injective_hull(max_ideal(poly_line), window)
    assert im.route == "matlis"
    assert all(im.dim(t) == 1 for t in range(0, window.t_hi + 1))
    assert all(im.dim(t) == 0 for t in range(window.t_lo, 0))


def test_injective_hull_at_generic(poly_line, window):
    generic = HomIdeal(poly_line, [], is_prime_asserted=True, name="(0)")
    ip = injective_hull(generic, window)
    assert ip.kappa_rank == 1
    assert "probabilistic" in ip.flags


def test_brown_comenetz_involution(poly_line, window):
    mod = GradedModule(poly_line, [("a", 0)], [["x^3"]])
    c = module_complex(mod, window)
    dd = brown_comenetz(brown_comenetz(c, window), window)
    assert homology(dd, window) == homology(c, window)


def test_brown_comenetz_flips_degrees(poly_line, window):
    c = module_complex(free(poly_line), window)
    d = brown_comenetz(c, window)
    h = {k: v for k, v in homology(d, window).items() if v}
    assert h == {(0, t): 1 for t in range(0, window.t_hi + 1)}


# dual localization ------------------------------------------------------------


def test_dual_localize_at_max_is_identity(poly_plane, window):
    rep = dual_localize(free(poly_plane), max_ideal(poly_plane), window)
    assert rep.get("identity") and rep["ranks"] == {2: 1}


def test_dual_localize_at_height_one(poly_plane, window):
    p = HomIdeal(poly_plane, [poly_plane.parse("x")],
                 is_prime_asserted=True, name="(x)")
    rep = dual_localize(free(poly_plane), p, window)
    assert rep["ranks"] == {2: 1}
    assert rep["dimension_drop"] == 1
    assert "probabilistic" in rep["flags"]


def test_dual_localize_refuses_non_gorenstein(poly_plane, window):
    # F2[x,y]/(x^2, xy) has dimension 1 and is not Gorenstein; (x) is a
    # non-maximal prime, so the Ext route is required and must refuse
    ring = poly_plane.quotient([poly_plane.parse("x^2"),
                                poly_plane.parse("x*y")], name="NG")
    p = HomIdeal(ring, [ring.parse("x")], is_prime_asserted=True,
                 name="(x)")
    with pytest.raises(ContractViolation):
        dual_localize(free(ring), p, window)


# absolute checks --------------------------------------------------------------


def test_absolute_check_exact_mode(poly_line, window):
    rep = absolute_gorenstein_check(poly_line, max_ideal(poly_line), window)
    assert rep["verdict"] and rep["mode"] == "exact"


def test_absolute_check_kappa_mode(poly_plane, window):
    p = HomIdeal(poly_plane, [poly_plane.parse("y")],
                 is_prime_asserted=True, name="(y)")
    rep = absolute_gorenstein_check(poly_plane, p, window)
    assert rep["verdict"] and rep["mode"] == "kappa(p)-rank"
    assert rep["ranks"] == {2: 1}


# twists -----------------------------------------------------------------------


def test_twist_with_unit_module(poly_line, window):
    J = free(poly_line)
    rep = twist_check(poly_line, J, max_ideal(poly_line), window)
    assert rep["verdict"], rep


def test_twist_with_shifted_module(poly_line, window):
    J = GradedModule(poly_line, [("a", 3)], [], name="S3R")
    rep = twist_check(poly_line, J, max_ideal(poly_line), window)
    assert not rep["verdict"], rep


def test_twist_with_zero_module(poly_line, window):
    rep = twist_check(poly_line, None, max_ideal(poly_line), window)
    assert not rep["verdict"]  # I_m is nonzero in range


def test_twist_refuses_nonmaximal(poly_plane, window):
    p = HomIdeal(poly_plane, [poly_plane.parse("x")],
                 is_prime_asserted=True, name="(x)")
    with pytest.raises(ContractViolation):
        twist_check(poly_plane, free(poly_plane), p, window)


# orthogonality ----------------------------------------------------------------


def test_orthogonality_distinct_primes(poly_plane, window):
    p = HomIdeal(poly_plane, [poly_plane.parse("x")],
                 is_prime_asserted=True, name="(x)")
    m = max_ideal(poly_plane)
    rep = orthogonality_check(p, m, "y", window)
    assert rep["verdict"], rep


def test_orthogonality_refuses_same_prime(poly_plane, window):
    m1 = max_ideal(poly_plane)
    m2 = max_ideal(poly_plane)
    with pytest.raises(ContractViolation):
        orthogonality_check(m1, m2, "x", window)


def test_orthogonality_refuses_bad_witness(poly_plane, window):
    p = HomIdeal(poly_plane, [poly_plane.parse("x")],
                 is_prime_asserted=True, name="(x)")
    m = max_ideal(poly_plane)
    with pytest.raises(ContractViolation):
        orthogonality_check(p, m, "x", window)  # x lies in both
