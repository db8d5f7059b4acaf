import math

import numpy as np
import pytest

from bscc.errors import (
    DegenerateReference,
    InvalidInput,
    InvalidRange,
    InvalidStragglerCount,
    IoError,
    ShapeError,
)
from bscc.experiments import (
    AGGREGATE_HEADER,
    RECORD_HEADER,
    ExperimentConfig,
    aggregate,
    emit_csv,
    load_config,
    panel_configs,
    parse_config,
    read_aggregates_csv,
    read_records_csv,
    relative_error,
    run_experiment,
    run_trial,
    sample_dataset,
    sample_stragglers,
    splitmix64,
    trial_seed,
)


class TestSeeding:
    def test_splitmix_reference_value(self):
        # first output of the reference generator seeded with 0
        assert splitmix64(0) == 0xE220A8397B1DCDAF

    def test_trial_seed_depends_on_every_part(self):
        base = trial_seed(1, 2, 3)
        assert len({base, trial_seed(2, 2, 3), trial_seed(1, 3, 3), trial_seed(1, 2, 4)}) == 4


class TestSampling:
    def test_dataset_deterministic(self):
        cfg = ExperimentConfig()
        a = sample_dataset(cfg, np.random.default_rng(5)).blocks
        b = sample_dataset(cfg, np.random.default_rng(5)).blocks
        np.testing.assert_array_equal(a, b)

    def test_dataset_default_range(self):
        blocks = sample_dataset(ExperimentConfig(), np.random.default_rng(0)).blocks
        assert blocks.size == 200 and blocks.min() >= 0 and blocks.max() <= 1

    def test_degenerate_range(self):
        with pytest.raises(InvalidRange):
            ExperimentConfig(lo=1.0, hi=1.0)

    def test_straggler_extremes(self, rng):
        np.testing.assert_array_equal(sample_stragglers(20, 0, rng), np.arange(20))
        assert sample_stragglers(20, 16, rng).size == 4
        with pytest.raises(InvalidStragglerCount):
            sample_stragglers(20, 17, rng)

    def test_straggler_uniformity(self):
        stats = pytest.importorskip("scipy.stats")
        rng = np.random.default_rng(99)
        n, s, draws = 20, 7, 10_000
        counts = np.zeros(n)
        for _ in range(draws):
            counts[sample_stragglers(n, s, rng)] += 1
        p = stats.chisquare(counts).pvalue
        assert p > 1e-3


class TestRelativeError:
    def test_examples(self):
        assert relative_error([[3, 4]], [[3, 4]]) == 0.0
        assert relative_error([[3, 4]], [[0, 0]]) == 1.0
        assert relative_error([[3, 4]], [[3, 0]]) == pytest.approx(16 / 25)

    def test_errors(self):
        with pytest.raises(DegenerateReference):
            relative_error([[0, 0]], [[1, 1]])
        with pytest.raises(ShapeError):
            relative_error([[1, 2]], [[1, 2, 3]])


class TestTrials:
    def test_deterministic(self):
        cfg = ExperimentConfig(s_values=(10,), trials=3, seed=4)
        assert run_trial(cfg, "bscc", 10, 2) == run_trial(cfg, "bscc", 10, 2)

    def test_paired_design(self):
        cfg = ExperimentConfig(s_values=(10,), trials=3, seed=4)
        a, b = run_trial(cfg, "bscc", 10, 1), run_trial(cfg, "bacc", 10, 1)
        assert a.seed == b.seed
        assert a.e_rel != b.e_rel

    def test_bscc_beats_bacc_single_trial(self):
        cfg = ExperimentConfig(trials=1, seed=0)
        assert run_trial(cfg, "bscc", 0, 0).e_rel < run_trial(cfg, "bacc", 0, 0).e_rel

    def test_unknown_scheme(self):
        with pytest.raises(InvalidInput):
            run_trial(ExperimentConfig(), "lcc", 0, 0)

    def test_run_experiment_matches_run_trial(self):
        cfg = ExperimentConfig(s_values=(0, 5), trials=2, seed=3)
        res = run_experiment(cfg)
        for r in res.records:
            assert r == run_trial(cfg, r.scheme, r.S, r.trial_index)

    def test_single_record(self):
        res = run_experiment(ExperimentConfig(trials=1, schemes=("bacc",)))
        assert len(res.records) == 1 and res.aggregates[0].trials == 1

    def test_record_count_and_order(self):
        cfg = ExperimentConfig(s_values=(0, 20), trials=3)
        keys = [(r.scheme, r.S, r.trial_index) for r in run_experiment(cfg).records]
        assert len(keys) == 2 * 2 * 3
        assert keys[0] == ("bscc", 0, 0) and keys[-1] == ("bacc", 20, 2)

    def test_doubling_trials_is_consistent(self):
        small = run_experiment(ExperimentConfig(trials=40, seed=8, schemes=("bacc",)))
        big = run_experiment(ExperimentConfig(trials=80, seed=8, schemes=("bacc",)))
        e = np.array([r.e_rel for r in small.records])
        diff = abs(big.aggregates[0].mean_e_rel - small.aggregates[0].mean_e_rel)
        assert diff < 3 * e.std(ddof=1) / math.sqrt(40)


class TestAggregate:
    def test_mean_is_linear_then_db(self):
        cfg = ExperimentConfig(trials=4, seed=1, schemes=("bacc",))
        res = run_experiment(cfg)
        e = [r.e_rel for r in res.records]
        a = res.aggregates[0]
        assert a.mean_e_rel == pytest.approx(np.mean(e))
        assert a.mean_db == pytest.approx(10 * np.log10(np.mean(e)))
        assert a.std_db == pytest.approx(np.std([r.e_rel_db for r in res.records], ddof=1))

    def test_empty(self):
        assert aggregate([]) == []


class TestCsv:
    def test_round_trip(self, tmp_path):
        res = run_experiment(ExperimentConfig(s_values=(0, 30), trials=3, seed=5))
        p, pa = emit_csv(res.records, res.aggregates, tmp_path / "t.csv")
        assert pa.name == "t_aggregates.csv"
        back = read_records_csv(p)
        assert [
            (r.scheme, r.S, r.trial_index, r.seed, r.e_rel, r.e_rel_db, r.clamped_beta_flag) for r in back
        ] == [(r.scheme, r.S, r.trial_index, r.seed, r.e_rel, r.e_rel_db, r.clamped_beta_flag) for r in res.records]
        assert read_aggregates_csv(pa) == res.aggregates

    def test_header_only(self, tmp_path):
        p, pa = emit_csv([], [], tmp_path / "empty.csv")
        assert p.read_text() == ",".join(RECORD_HEADER) + "\n"
        assert pa.read_text() == ",".join(AGGREGATE_HEADER) + "\n"

    def test_unwritable(self, tmp_path):
        with pytest.raises(IoError):
            emit_csv([], [], tmp_path / "missing" / "t.csv")


class TestConfig:
    def test_parse(self):
        cfg = parse_config("# comment\nN = 50\nK=4\ns_values=0, 5,10\nENCODER=berrut\nschemes=bscc\nlo=-1 # trailing\n")
        assert (cfg.N, cfg.K, cfg.s_values, cfg.encoder, cfg.schemes, cfg.lo) == (50, 4, (0, 5, 10), "berrut", ("bscc",), -1.0)

    def test_defaults(self):
        assert parse_config("") == ExperimentConfig()

    @pytest.mark.parametrize("text", ["colour=red", "N=10\nN=20", "N", "N=ten", "encoder=hermite", "function=tan"])
    def test_rejects(self, text):
        with pytest.raises(InvalidInput):
            parse_config(text)

    def test_straggler_count_checked(self):
        with pytest.raises(InvalidStragglerCount):
            parse_config("N=20\ns_values=17")

    def test_load_missing(self, tmp_path):
        with pytest.raises(IoError):
            load_config(tmp_path / "nope.cfg")


def test_panel_configs():
    cfgs = panel_configs(trials=10, seed=1)
    assert {(c.encoder, c.function) for c in cfgs} == {
        ("lagrange", "xsinx"), ("lagrange", "sigmoid"), ("berrut", "xsinx"), ("berrut", "sigmoid")
    }
    assert all(c.N == 100 and c.K == 8 and c.block_rows == c.block_cols == 5 for c in cfgs)
