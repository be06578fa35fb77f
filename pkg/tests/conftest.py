import pytest

from ksurf import acceptance
from ksurf.endsolver import boundary_samples, newton_solve


@pytest.fixture(scope="session")
def cache():
    """Shared lazily-solved fixtures for the acceptance criteria."""
    return acceptance.FixtureCache()


@pytest.fixture(scope="session")
def main_end(cache):
    """The k = 0.5 reference end with boundary 0.05 + 0.02 cos x."""
    return cache.main()[0]


@pytest.fixture(scope="session")
def quick_end():
    """A small fast end for unit-level checks."""
    v = boundary_samples(1, 64, cos=(0.05, 0.02))
    end, _ = newton_solve(0.5, v, Nx=64, Y=6.0, Ny=385)
    return end


@pytest.fixture(scope="session")
def winding2_end():
    """A winding-2 end whose boundary carries content at every low frequency.

    For winding m the horizontal translations only reach the frequency-1
    slots (n = +-m), so an m = 2 end with n = 1 and n = 2 data exhibits the
    full slow decay class that a simple m = 1 graph hides.
    """
    v = boundary_samples(2, 256, cos=(0.05, 0.02, 0.015), sin=(0.0, 0.0, 0.01))
    end, _ = newton_solve(0.5, v, m=2, Nx=256, Y=12.0)
    return end
