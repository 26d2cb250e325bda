import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from boundedladder.errors import BadParams, NonPositiveWeight
from boundedladder.weights import (
    WeightSequence, factorials, from_json, inverse_square, make_sequence, radius_estimate,
)


class TestMakeSequence:
    def test_harmonic(self):
        assert make_sequence("harmonic", {}, 5).values.tolist() == [0, 1, 2, 3, 4, 5]

    def test_custom_pass_through(self):
        x = make_sequence("custom", {"values": [0, 1, 1, 1]}, 3)
        assert x.values.tolist() == [0, 1, 1, 1]
        assert x.kind == "custom"

    def test_quon_first(self):
        # geometric sums 1 + q + ... + q^(n-1)
        expected = [sum(0.5 ** j for j in range(n)) for n in range(4)]
        assert expected == [0, 1, 1.5, 1.75]
        np.testing.assert_allclose(make_sequence("quon_first", {"q": 0.5}, 3).values, expected,
                                   rtol=0, atol=1e-15)

    def test_general_f_table(self):
        x = make_sequence("general_f", {"q": 1.0, "f": [1, 1, 1, 1, 1]}, 4)
        assert x.values.tolist() == [0, 1, 2, 3, 4]

    @pytest.mark.parametrize("values", [[0, 1, 0, 2], [0, -1, 1], [-1, 1, 1], [0, 1, float("nan")]])
    def test_rejects_bad_weights(self, values):
        with pytest.raises(NonPositiveWeight):
            make_sequence("custom", {"values": values})

    def test_x0_zero_allowed(self):
        assert make_sequence("custom", {"values": [0, 2, 3]}).values[0] == 0

    @pytest.mark.parametrize("kind,params,n_max", [
        ("quon_first", {}, 5),
        ("quon_first", {"q": 0}, 5),
        ("quon_second", {"q": "abc"}, 5),
        ("harmonic", {}, 1),
        ("nonsense", {}, 5),
        ("custom", {}, 5),
        ("general_f", {"q": 0.5, "f": "bogus"}, 5),
    ])
    def test_bad_params(self, kind, params, n_max):
        with pytest.raises(BadParams):
            make_sequence(kind, params, n_max)

    def test_first_kind_q_minus_one_has_zero_weight(self):
        with pytest.raises(NonPositiveWeight):
            make_sequence("quon_first", {"q": -1.0}, 4)

    def test_immutable(self):
        x = make_sequence("harmonic", {}, 4)
        with pytest.raises(ValueError):
            x.values[1] = 7.0


class TestJson:
    def test_custom(self):
        x = from_json({"kind": "custom", "values": [0, 1, 2]})
        assert x.values.tolist() == [0, 1, 2]

    def test_generated_kinds_extend_to_requested_length(self):
        x = from_json({"kind": "quon_first", "q": 0.5, "n_max": 4}, n_max=10)
        assert x.n_max == 10

    def test_round_trip(self):
        x = make_sequence("general_f", {"q": 0.8, "f": "exp_q2m1"}, 12)
        y = from_json(x.to_json())
        np.testing.assert_array_equal(x.values, y.values)

    def test_missing_kind(self):
        with pytest.raises(BadParams):
            from_json({"values": [0, 1, 2]})


class TestFactorials:
    def test_harmonic(self):
        assert factorials(make_sequence("harmonic", {}, 4)).tolist() == [1, 1, 2, 6, 24]

    def test_custom_running_product(self):
        assert factorials(make_sequence("custom", {"values": [0, 2, 3]})).tolist() == [1, 2, 6]

    def test_first_entry_is_one(self):
        assert factorials(make_sequence("custom", {"values": [5, 2, 3]}))[0] == 1

    @given(st.lists(st.floats(0.01, 50), min_size=2, max_size=30))
    def test_multiplicative(self, tail):
        x = WeightSequence([0.0] + tail)
        p = factorials(x)
        ratios = p[1:] / p[:-1]
        np.testing.assert_allclose(ratios, x.values[1:], rtol=4 * np.finfo(float).eps)


class TestRadius:
    def test_harmonic_is_infinite(self):
        r, reliable = radius_estimate(make_sequence("harmonic", {}, 40))
        assert math.isinf(r) and reliable

    def test_quon_first(self):
        r, reliable = radius_estimate(make_sequence("quon_first", {"q": 0.5}, 30))
        # x_n -> 1/(1-q) = 2
        assert r == pytest.approx(math.sqrt(2), rel=1e-8)
        assert reliable

    def test_constant(self):
        r, _ = radius_estimate(make_sequence("custom", {"values": [0] + [4] * 20}))
        assert r == 2.0

    def test_decaying_weights_give_small_radius(self):
        r, _ = radius_estimate(inverse_square(40))
        assert r < 0.05


def test_harmonic_increments():
    x = make_sequence("harmonic", {}, 30)
    assert np.all(np.diff(x.values) == 1)


def test_inverse_square_l1_norm_oracle():
    # partial sums of 1/n^2 approach pi^2/6
    partial = math.fsum(1.0 / k ** 2 for k in range(1, 10 ** 6 + 1))
    assert inverse_square(5).params["l1_norm"] == pytest.approx(partial, abs=1.1e-6)


def test_from_json_nested_params():
    flat = from_json({"kind": "quon_first", "q": 0.5}, n_max=10)
    nested = from_json({"kind": "quon_first", "params": {"q": 0.5}}, n_max=10)
    assert np.array_equal(flat.values, nested.values)
