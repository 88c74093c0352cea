"""Ancestral sampling, nested prefixes, bootstrap resampling, dataset I/O."""

import numpy as np
import pytest
from scipy import stats

from bncritic.errors import EmptyDatasetError, OutOfRangeError, ParseError
from bncritic.infer import posterior
from bncritic.sample import (
    Dataset,
    derive_seed,
    forward_sample,
    load_dataset,
    prefix,
    resample,
    save_dataset,
)


class TestForwardSample:
    def test_deterministic(self, md):
        a = forward_sample(md, 200, 42)
        b = forward_sample(md, 200, 42)
        assert np.array_equal(a.rows, b.rows)

    def test_seed_matters(self, md):
        a = forward_sample(md, 200, 42)
        b = forward_sample(md, 200, 43)
        assert not np.array_equal(a.rows, b.rows)

    def test_n_zero(self, md):
        ds = forward_sample(md, 0, 1)
        assert ds.n_rows == 0
        assert ds.columns == tuple(v.name for v in md.observables)

    def test_columns_and_shape(self, md):
        ds = forward_sample(md, 1000, 7)
        assert ds.rows.shape == (1000, 5)
        assert ds.rows.min() >= 0 and ds.rows.max() <= 3

    def test_uniform_marginal_frequencies(self, single_obs_net):
        ds = forward_sample(single_obs_net, 100_000, 5)
        freqs = np.bincount(ds.rows[:, 0], minlength=4) / ds.n_rows
        # binomial 99.99% interval around 0.25 at n = 100k is well within 0.01
        np.testing.assert_allclose(freqs, 0.25, atol=0.01)

    def test_md_marginals_chi_square(self, md):
        ds = forward_sample(md, 100_000, 11)
        for j, v in enumerate(md.observables):
            exact = posterior(md, {}, v.name).probabilities
            counts = np.bincount(ds.rows[:, j], minlength=v.cardinality)
            _, p = stats.chisquare(counts, exact * ds.n_rows)
            assert p > 0.001, f"{v.name}: p={p}"


class TestPrefix:
    def test_identity(self, md):
        ds = forward_sample(md, 100, 3)
        assert np.array_equal(prefix(ds, 100).rows, ds.rows)

    def test_composition(self, md):
        ds = forward_sample(md, 500, 3)
        assert np.array_equal(prefix(prefix(ds, 500), 50).rows, prefix(ds, 50).rows)

    def test_nesting_across_runs(self, md):
        # the first 50 rows of a 1000-row run equal a 50-row run outright
        small = forward_sample(md, 50, 9)
        large = forward_sample(md, 1000, 9)
        assert np.array_equal(small.rows, prefix(large, 50).rows)

    def test_out_of_range(self, md):
        ds = forward_sample(md, 10, 1)
        with pytest.raises(OutOfRangeError):
            prefix(ds, 11)
        with pytest.raises(OutOfRangeError):
            prefix(ds, -1)


class TestResample:
    def test_deterministic(self, md):
        ds = forward_sample(md, 100, 2)
        a = resample(ds, 250, 17)
        b = resample(ds, 250, 17)
        assert np.array_equal(a.rows, b.rows)

    def test_single_row_dataset(self):
        ds = Dataset(("X", "Y"), np.array([[2, 1]]))
        out = resample(ds, 7, 0)
        assert np.array_equal(out.rows, np.tile([2, 1], (7, 1)))

    def test_two_row_frequencies(self):
        ds = Dataset(("X",), np.array([[0], [1]]))
        out = resample(ds, 100_000, 3)
        freq = out.rows[:, 0].mean()
        assert abs(freq - 0.5) < 0.01

    def test_empty_dataset(self):
        ds = Dataset(("X",), np.empty((0, 1), dtype=np.int64))
        with pytest.raises(EmptyDatasetError):
            resample(ds, 5, 0)


class TestDerivedSeeds:
    def test_distinct_paths_distinct_seeds(self):
        seeds = {derive_seed(0, i, j) for i in range(10) for j in range(10)}
        assert len(seeds) == 100

    def test_deterministic(self):
        assert derive_seed(123, 4, 5) == derive_seed(123, 4, 5)


class TestDatasetIO:
    def test_round_trip(self, md):
        ds = forward_sample(md, 50, 21)
        text = save_dataset(ds, md)
        back = load_dataset(text, md)
        assert back.columns == ds.columns
        assert np.array_equal(back.rows, ds.rows)

    def test_labels_in_file(self, md):
        ds = forward_sample(md, 3, 21)
        lines = save_dataset(ds, md).splitlines()
        assert lines[0] == "Patient1,Patient2,Patient3,Patient4,Patient5"
        for cell in lines[1].split(","):
            assert cell in ("degrade", "maintain", "improve", "healed")

    def test_unknown_label_rejected(self, md):
        text = "Patient1,Patient2,Patient3,Patient4,Patient5\nhealed,healed,healed,healed,cured\n"
        with pytest.raises(ParseError):
            load_dataset(text, md)

    def test_column_mismatch_rejected(self, md):
        with pytest.raises(ParseError):
            load_dataset("A,B\n", md)

    def test_empty_file_rejected(self, md):
        with pytest.raises(ParseError):
            load_dataset("", md)
