import numpy as np
import pytest

from boundedladder.weights import inverse_square, make_sequence


def sequence_zoo(n_max=40):
    return {
        "harmonic": make_sequence("harmonic", {}, n_max),
        "quon_first_0.5": make_sequence("quon_first", {"q": 0.5}, n_max),
        "quon_second_1.3": make_sequence("quon_second", {"q": 1.3}, n_max),
        "inverse_square": inverse_square(n_max),
    }


@pytest.fixture(params=sorted(sequence_zoo()))
def zoo_sequence(request):
    return sequence_zoo()[request.param]


@pytest.fixture
def harmonic():
    return make_sequence("harmonic", {}, 80)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def random_operator(rng, D):
    return rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
