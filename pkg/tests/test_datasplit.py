import itertools
import math
from fractions import Fraction

import pytest

from evaltk import BernoulliDataset, DomainError, derandomized_e, reproducibility_report, split, split_e_value
from evaltk.datasplit import MAX_SPLITS, n_splits, np_p_value, unrank_combination


def all_datasets(n):
    return [BernoulliDataset(bits) for bits in itertools.product((0, 1), repeat=n)]


def null_prob(bits, theta0):
    k = sum(bits)
    return theta0**k * (1 - theta0) ** (len(bits) - k)


class TestSplit:
    def test_partition(self):
        data = BernoulliDataset((0, 1) * 4)
        train, test = split(data, 3)
        assert len(train) == 4 and len(test) == 4
        assert set(train) | set(test) == set(range(8)) and not set(train) & set(test)
        assert split(data, 3) == split(data, 3)

    def test_fraction_rounding(self):
        data = BernoulliDataset((1,) * 10)
        assert len(split(data, 0, 0.3)[0]) == 3
        with pytest.raises(DomainError):
            split(BernoulliDataset((1, 0)), 0, 0.1)
        with pytest.raises(DomainError):
            split(data, 0, 1.0)

    def test_exhaustive_enumerates_every_subset_once(self):
        data = BernoulliDataset((0,) * 8)
        got = [split(data, r, mode="exhaustive")[0] for r in range(math.comb(8, 4))]
        assert got == list(itertools.combinations(range(8), 4))

    @pytest.mark.parametrize("n, k", [(1, 1), (5, 0), (5, 5), (7, 3), (10, 5)])
    def test_unrank_matches_itertools(self, n, k):
        assert [unrank_combination(n, k, r) for r in range(math.comb(n, k))] == list(
            itertools.combinations(range(n), k)
        )
        with pytest.raises(DomainError):
            unrank_combination(n, k, math.comb(n, k))


class TestSplitEValue:
    def test_hand_computed(self):
        data = BernoulliDataset((1, 1, 1, 1))
        assert split(data, 0, mode="exhaustive")[0] == (0, 1)
        assert split_e_value(data, 0, 0.5, 1.0, mode="exhaustive") == pytest.approx(2.25, abs=1e-15)

    def test_fitted_equal_to_null_gives_one(self):
        # train bits (1, 0) give theta_hat = 1/2 for every smoothing level
        for test_bits in itertools.product((0, 1), repeat=2):
            data = BernoulliDataset((1, 0) + test_bits)
            for s in (1e-9, 1.0, 5.0):
                assert split_e_value(data, 0, 0.5, s, mode="exhaustive") == 1.0

    def test_parameter_errors(self):
        data = BernoulliDataset((1, 0, 1, 0))
        with pytest.raises(DomainError):
            split_e_value(data, 0, null_theta=1.0)
        with pytest.raises(DomainError):
            split_e_value(data, 0, smoothing=0.0)

    @pytest.mark.parametrize("theta0", [0.5, 0.3])
    def test_conditional_validity_all_splits_up_to_eight(self, theta0):
        # for every n <= 8, split, and training pattern: average over test patterns is 1
        for n in range(2, 9):
            k = round(n / 2)
            for rank in range(math.comb(n, k)):
                train = unrank_combination(n, k, rank)
                test = [i for i in range(n) if i not in train]
                for train_bits in itertools.product((0, 1), repeat=k):
                    acc = []
                    for test_bits in itertools.product((0, 1), repeat=n - k):
                        bits = [0] * n
                        for i, b in zip(train, train_bits):
                            bits[i] = b
                        for i, b in zip(test, test_bits):
                            bits[i] = b
                        e = split_e_value(BernoulliDataset(bits), rank, theta0, 1.0, mode="exhaustive")
                        acc.append(null_prob(test_bits, theta0) * e)
                    assert math.fsum(acc) == pytest.approx(1.0, abs=1e-12)

    def test_exhaustive_null_mean_single_seed(self):
        n = 6
        mean = math.fsum(null_prob(d.bits, 0.5) * split_e_value(d, 0) for d in all_datasets(n))
        assert mean == pytest.approx(1.0, abs=1e-9)


def test_np_p_value_tails():
    # theta_hat > theta0: upper binomial tail
    assert np_p_value([1, 1, 1], 0.8, 0.5) == pytest.approx(1 / 8)
    assert np_p_value([1, 0, 0], 0.8, 0.5) == pytest.approx(7 / 8)
    assert np_p_value([0, 0, 0], 0.2, 0.5) == pytest.approx(1 / 8)
    assert np_p_value([1, 0], 0.5, 0.5) == 1.0


class TestDerandomized:
    def test_all_ones_eight(self):
        rep = derandomized_e(BernoulliDataset((1,) * 8))
        # every split: theta_hat = 5/6 and four ones in the test half
        expected = Fraction(5, 3) ** 4
        assert len(rep.per_seed) == 70
        assert rep.derandomized_e == pytest.approx(float(expected), rel=1e-14)
        assert rep.derandomized_e > 1
        assert rep.e_spread == 0

    def test_deterministic(self):
        data = BernoulliDataset((1, 0, 1, 1, 0, 1, 1, 1))
        a = derandomized_e(data)
        b = derandomized_e(data)
        c = derandomized_e(data, workers=4)
        assert a.derandomized_e == b.derandomized_e == c.derandomized_e
        assert a.to_csv() == b.to_csv() == c.to_csv()

    def test_seed_mode_threads_agree(self):
        data = BernoulliDataset((1, 0, 1, 1, 0, 1, 1, 1, 0, 1))
        seeds = list(range(40))
        assert derandomized_e(data, seeds, "seeds").to_dict() == derandomized_e(
            data, seeds, "seeds", workers=8
        ).to_dict()

    @pytest.mark.parametrize("theta0", [0.5, 0.3])
    def test_null_validity_double_enumeration(self, theta0):
        n = 6
        mean = math.fsum(null_prob(d.bits, theta0) * derandomized_e(d, null_theta=theta0).derandomized_e
                         for d in all_datasets(n))
        assert 1 - 1e-9 <= mean <= 1 + 1e-9

    def test_seed_averaged_marginal_validity(self):
        seeds = [0, 1, 2, 17, 99]
        for n in (4, 7, 10):
            mean = math.fsum(null_prob(d.bits, 0.5) * derandomized_e(d, seeds, "seeds").derandomized_e
                             for d in all_datasets(n))
            assert mean <= 1 + 1e-9

    def test_monotone_evidence(self):
        for n in range(2, 11):
            vals = [derandomized_e(BernoulliDataset((1,) * k + (0,) * (n - k))).derandomized_e
                    for k in range(n + 1)]
            for k in range(math.ceil(n / 2), n):
                assert vals[k] <= vals[k + 1] * (1 + 1e-12)

    def test_exhaustive_depends_only_on_count(self):
        a = derandomized_e(BernoulliDataset((1, 1, 0, 0, 1, 0))).derandomized_e
        b = derandomized_e(BernoulliDataset((0, 1, 0, 1, 0, 1))).derandomized_e
        assert a == pytest.approx(b, rel=1e-14)

    def test_guard(self):
        data = BernoulliDataset((1, 0) * 11)
        assert n_splits(22) > MAX_SPLITS
        with pytest.raises(DomainError):
            derandomized_e(data)

    def test_report_serialization(self):
        rep = derandomized_e(BernoulliDataset((1, 1, 0, 1)), [5, 6], "seeds")
        d = rep.to_dict()
        assert [r["seed"] for r in d["per_seed"]] == [5, 6]
        assert rep.to_csv().splitlines()[0] == "seed,e_value,p_value"
        assert rep.derandomized_e == pytest.approx(math.fsum(e for _, e in rep.per_seed) / 2)


class TestReproducibility:
    def test_spreads(self):
        data = BernoulliDataset((1, 1, 0, 1, 1, 0, 1, 1, 1, 0, 1, 0))
        rep = reproducibility_report(data, n_seeds=500, batch_sizes=(1, 50))
        assert rep.exhaustive_spread == 0.0
        assert rep.single_log_e_spread > 0
        assert rep.single_p_spread > 0
        assert rep.batch_spread[50] < rep.batch_spread[1]

    def test_degenerate(self):
        rep = reproducibility_report(BernoulliDataset((1, 0)), n_seeds=1)
        assert rep.single_log_e_spread is None and rep.single_p_spread is None
        assert rep.batch_spread[1] is None and rep.batch_spread[50] is None


def test_dataset_parsing(tmp_path):
    assert BernoulliDataset.parse("1\n0\n1\n").bits == (1, 0, 1)
    assert BernoulliDataset.parse('{"bits": [0, 1]}').bits == (0, 1)
    f = tmp_path / "d.txt"
    f.write_text("1\n1\n")
    assert BernoulliDataset.load(f).n == 2
    for bad in ("1\n2\n", "1\n"):
        with pytest.raises(DomainError):
            BernoulliDataset.parse(bad)
