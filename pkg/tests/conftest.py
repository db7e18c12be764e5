import numpy as np
import pytest

import bandlab as bl


@pytest.fixture(scope="session")
def lat1d():
    return bl.new_lattice([[1.0]])


@pytest.fixture(scope="session")
def zero(lat1d):
    return bl.potential_from_coeffs(lat1d, [])


@pytest.fixture(scope="session")
def cosine(lat1d):
    # V(x) = 2 cos(2 pi x): the single-shell toy potential
    return bl.potential_from_coeffs(lat1d, [((1,), 1.0), ((-1,), 1.0)])


@pytest.fixture(scope="session")
def blowup_std():
    # m=1, p=3/2 tail, the workhorse modification used throughout
    return bl.build_blowup(bl.BlowupSpec(m=1, p=1.5, C=1.0))


@pytest.fixture(scope="session")
def hex2d():
    return bl.new_lattice(np.array([[1.0, -0.5], [0.0, np.sqrt(3.0) / 2.0]]))
