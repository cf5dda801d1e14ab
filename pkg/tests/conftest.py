import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

from wulffkit.anisotropy import Ellipsoid, HarmonicPerturbation, Isotropic, SmoothedLp  # noqa: E402

Q_DIAG = np.diag([4.0, 1.0, 1.0])


def family_examples():
    """One representative anisotropy per family (n = 2) plus n = 1 cases."""
    return [
        Isotropic(),
        Ellipsoid(Q_DIAG),
        SmoothedLp(4.0, 0.5),
        HarmonicPerturbation(1.0, 0.1, 3, 1),
        Isotropic(n=1),
        Ellipsoid(np.array([[2.0, 0.3], [0.3, 1.0]]), n=1),
        HarmonicPerturbation(1.0, 0.05, 3, 0, n=1),
    ]


@pytest.fixture(scope="module", params=family_examples(), ids=lambda g: f"{g.family}-n{g.n}")
def gamma(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
