import pytest

from localduality.graded import GradedModule, GradedRing, HomIdeal, Window


@pytest.fixture
def poly_line():
    return GradedRing(2, [("x", -1)], [], name="F2[x]")


@pytest.fixture
def poly_plane():
    return GradedRing(2, [("x", -1), ("y", -1)], [], name="F2[x,y]")


@pytest.fixture
def hypersurface(poly_plane):
    return poly_plane.quotient([poly_plane.parse("y^2")],
                               name="F2[x,y]/(y^2)")


@pytest.fixture
def window():
    return Window(-8, 8)


def max_ideal(ring: GradedRing, name: str = "m") -> HomIdeal:
    return HomIdeal(ring, [ring.gen_poly(i) for i in range(ring.n)],
                    is_prime_asserted=True, name=name)


def free(ring: GradedRing, degrees=(0,), name="F") -> GradedModule:
    return GradedModule.free_module(ring, list(degrees), name=name)
