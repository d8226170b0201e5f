import pathlib

import pytest
import sympy as sp

from quasiarc.geom import Similitude, SimilitudeSystem, build_basic_figure

FIGURES = pathlib.Path(__file__).resolve().parent.parent / "figures"

KOCH_SYM = (
    (sp.Integer(0), sp.Integer(0)),
    (sp.Rational(1, 3), sp.Integer(0)),
    (sp.Rational(1, 2), sp.sqrt(3) / 6),
    (sp.Rational(2, 3), sp.Integer(0)),
    (sp.Integer(1), sp.Integer(0)),
)


def koch_vertices():
    return [complex(float(a), float(b)) for a, b in KOCH_SYM]


@pytest.fixture(scope="session")
def koch():
    return build_basic_figure(koch_vertices(), 2, sym_vertices=KOCH_SYM,
                              name="koch")


@pytest.fixture(scope="session")
def koch16(koch):
    from quasiarc.spectrum import iterate_system
    return iterate_system(koch, 2)


@pytest.fixture(scope="session")
def omega():
    from fractions import Fraction

    from quasiarc.family import build_omega_tau
    return build_omega_tau(Fraction(2001, 2000))


@pytest.fixture(scope="session")
def segment():
    """Two-map subdivision of [0, 1]: rectifiable negative control."""
    return SimilitudeSystem((Similitude(0.5 + 0j, 0j),
                             Similitude(0.5 + 0j, 0.5 + 0j)))
