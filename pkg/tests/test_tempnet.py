import numpy as np
import pytest

from cdsim.errors import DomainError
from cdsim.tempnet import (
    ContactParams,
    contact_probabilities,
    sample_contacts_uniform,
    sample_contacts_visibility,
    to_weighted_lists,
)


def rng_of(seed):
    return np.random.Generator(np.random.PCG64(seed))


class TestUniformSampling:
    def test_forced_draw_two_nodes(self):
        params = ContactParams(k=2, include_self=False)
        draws = sample_contacts_uniform(2, params, rng_of(0))
        assert np.array_equal(draws[0], [1, 1])
        assert np.array_equal(draws[1], [0, 0])
        lists = to_weighted_lists(draws, 2)
        assert lists[0] == {1: 1.0}

    def test_weights_sum_to_one(self):
        params = ContactParams(k=3)
        draws = sample_contacts_uniform(10, params, rng_of(1))
        for entry in to_weighted_lists(draws, 3):
            assert sum(entry.values()) == 1.0

    def test_empirical_frequency_uniform(self):
        # 10^6 draws; any fixed node should be hit about 1/n of the time
        n, k = 1000, 3
        params = ContactParams(k=k)
        rng = rng_of(7)
        hits = 0
        total = 0
        for _ in range(334):
            draws = sample_contacts_uniform(n, params, rng)
            hits += int(np.count_nonzero(draws == 17))
            total += draws.size
        p = 1.0 / n
        se = np.sqrt(p * (1 - p) / total)
        assert abs(hits / total - p) < 3 * se

    def test_determinism(self):
        params = ContactParams(k=4)
        a = sample_contacts_uniform(50, params, rng_of(3))
        b = sample_contacts_uniform(50, params, rng_of(3))
        assert np.array_equal(a, b)

    def test_without_replacement_distinct(self):
        params = ContactParams(k=5, with_replacement=False)
        draws = sample_contacts_uniform(12, params, rng_of(5))
        for row in draws:
            assert len(set(row.tolist())) == 5

    def test_exclude_self(self):
        params = ContactParams(k=6, include_self=False)
        draws = sample_contacts_uniform(9, params, rng_of(4))
        for i, row in enumerate(draws):
            assert i not in row

    def test_small_population_rejected(self):
        with pytest.raises(DomainError):
            sample_contacts_uniform(1, ContactParams(k=2), rng_of(0))

    def test_small_k_warns(self):
        with pytest.warns(UserWarning):
            ContactParams(k=1)


class TestVisibilitySampling:
    def test_zero_boost_matches_uniform_stream(self):
        params = ContactParams(k=3, u_v=0.0)
        x = np.where(rng_of(9).random(40) < 0.3, 1, -1)
        a = sample_contacts_visibility(40, params, x, rng_of(11))
        b = sample_contacts_uniform(40, params, rng_of(11))
        assert np.array_equal(a, b)

    def test_empirical_adopter_frequency(self):
        # zeta = 0.2, u_v = 1: each adopter should be drawn with prob 2/1200
        n, k = 1000, 3
        x = -np.ones(n, dtype=np.int8)
        x[:200] = 1
        params = ContactParams(k=k, u_v=1.0)
        rng = rng_of(13)
        hits = 0
        total = 0
        for _ in range(334):
            draws = sample_contacts_visibility(n, params, x, rng)
            hits += int(np.count_nonzero(draws == 5))
            total += draws.size
        p = 2.0 / 1200.0
        se = np.sqrt(p * (1 - p) / total)
        assert abs(hits / total - p) < 3 * se

    def test_homogeneous_population_uniform(self):
        n = 30
        params = ContactParams(k=3, u_v=2.0)
        all_plus = np.ones(n, dtype=np.int8)
        draws = sample_contacts_visibility(n, params, all_plus, rng_of(2))
        assert draws.min() >= 0 and draws.max() < n
        counts = np.bincount(draws.ravel(), minlength=n)
        assert counts.std() < counts.mean() * 2

    def test_exclude_self_and_no_replacement(self):
        n = 10
        x = -np.ones(n, dtype=np.int8)
        x[:3] = 1
        params = ContactParams(k=4, u_v=1.5, include_self=False, with_replacement=False)
        draws = sample_contacts_visibility(n, params, x, rng_of(21))
        for i, row in enumerate(draws):
            assert i not in row
            assert len(set(row.tolist())) == 4


class TestContactProbabilities:
    def test_zero_boost_uniform(self):
        x = np.array([1, -1, 1, -1, -1])
        p = contact_probabilities(5, ContactParams(k=3, u_v=0.0), x)
        assert np.allclose(p, 0.2, atol=0, rtol=0)

    def test_printed_form_at_unit_boost(self):
        # at u_v = 1 the denominator reduces to n (1 + zeta)
        n = 10
        x = -np.ones(n)
        x[:4] = 1
        p = contact_probabilities(n, ContactParams(k=3, u_v=1.0), x)
        zeta = 0.4
        assert p[0] == pytest.approx(2.0 / (n * (1 + zeta)), abs=1e-15)
        assert p[-1] == pytest.approx(1.0 / (n * (1 + zeta)), abs=1e-15)

    def test_normalization_exact_over_grid(self):
        n = 60
        for adopters in (0, 1, 15, 30, 59, 60):
            x = -np.ones(n)
            x[:adopters] = 1
            for uv in (0.0, 0.3, 1.0, 2.7, 10.0):
                p = contact_probabilities(n, ContactParams(k=2, u_v=uv), x)
                assert abs(p.sum() - 1.0) < 1e-12

    def test_monotone_adopter_mass_in_visibility(self):
        n = 40
        x = -np.ones(n)
        x[:10] = 1
        masses = []
        for uv in (0.0, 0.5, 1.0, 2.0, 5.0):
            p = contact_probabilities(n, ContactParams(k=2, u_v=uv), x)
            masses.append(p[x == 1].sum())
        assert all(b > a for a, b in zip(masses, masses[1:]))
