import json
import math

import numpy as np
import pytest

from qvdp import analytic, sweep
from qvdp.errors import ConfigError, ShapeError
from qvdp.liouvillian import SystemParams


def small_config(**kw):
    base = dict(drive_values=(0.0, 1.0, 2.0), detuning_values=(-1.0, 0.0, 1.0), kappa2_values=(10.0,),
                n_theta=64)
    base.update(kw)
    return sweep.SweepConfig(**base)


class TestConfig:
    def test_plan_order(self):
        tasks = sweep.plan(small_config(kappa2_values=(1.0, 10.0)))
        assert len(tasks) == 18
        assert [t.index for t in tasks] == list(range(18))
        assert tasks[0] == (0, 0.0, -1.0, 1.0) and tasks[1].drive == 1.0 and tasks[3].detuning == 0.0
        assert tasks[9].kappa2 == 10.0

    def test_plan_size(self):
        assert len(sweep.plan(small_config())) == 9

    def test_round_trip_and_hash(self, tmp_path):
        cfg = small_config(kappa2_values=(math.inf,), mode="analytic")
        path = tmp_path / "c.json"
        path.write_text(json.dumps(cfg.to_dict()))
        loaded = sweep.SweepConfig.load(path)
        assert loaded == cfg and loaded.config_hash() == cfg.config_hash()
        assert small_config(n_theta=128).config_hash() != small_config().config_hash()

    def test_version_rejected(self):
        d = small_config().to_dict()
        d["version"] = "qvdp.sweep-config/0"
        with pytest.raises(ConfigError):
            sweep.SweepConfig.from_dict(d)
        d = small_config().to_dict()
        d["colour"] = "red"
        with pytest.raises(ConfigError):
            sweep.SweepConfig.from_dict(d)

    @pytest.mark.parametrize("kw", [dict(kappa2_values=(0.0,)), dict(kappa2_values=(math.inf,)),
                                    dict(metrics=("entropy",)), dict(drive_values=()), dict(mode="fast")])
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            small_config(**kw)

    def test_presets(self):
        for name in sweep.PRESETS:
            assert sweep.preset(name).drive_values
        cfg = sweep.preset("fig1b")
        assert len(sweep.plan(cfg)) == 51 * 51 and cfg.dim == 12
        assert np.array_equal(np.array(cfg.detuning_values), -np.array(cfg.detuning_values[::-1]))
        with pytest.raises(ConfigError):
            sweep.preset("fig9")


class TestRun:
    def test_deep_quantum_coherence_map(self):
        axis_f = tuple(np.linspace(0, 10, 11))
        axis_d = tuple(np.linspace(-5, 5, 11))
        cfg = sweep.SweepConfig(axis_f, axis_d, (1e4,), metrics=("coherence",), n_theta=32)
        amap = sweep.arnold_map(sweep.run(sweep.plan(cfg), cfg), "coherence")
        ref = np.array([[analytic.coherence(SystemParams(d, f, math.inf)) for f in axis_f] for d in axis_d])
        assert np.max(np.abs(amap.values - ref)) < 2e-2

    def test_parallel_matches_serial(self):
        cfg = small_config()
        a = sweep.run(sweep.plan(cfg), cfg, 1)
        b = sweep.run(sweep.plan(cfg), cfg, 2)
        assert [r.metrics for r in a] == [r.metrics for r in b]

    def test_classical_points_flagged(self):
        cfg = small_config(kappa2_values=(0.0,), dim=15)
        assert all(r.cutoff_flag for r in sweep.run(sweep.plan(cfg), cfg))

    def test_failure_is_recorded(self, monkeypatch):
        def boom(params):
            raise ArithmeticError("singular")
        monkeypatch.setattr(sweep.liouvillian, "solve", boom)
        cfg = small_config(drive_values=(1.0,), detuning_values=(0.0,))
        (rec,) = sweep.run(sweep.plan(cfg), cfg)
        assert rec.error and not rec.converged and math.isnan(rec.value("g2"))

    def test_mirror_symmetric_g2(self):
        cfg = small_config(kappa2_values=(1.0,), detuning_values=(-2.0, -1.0, 0.0, 1.0, 2.0), metrics=("g2",))
        amap = sweep.arnold_map(sweep.run(sweep.plan(cfg), cfg), "g2")
        finite = np.isfinite(amap.values)
        assert np.allclose(amap.values[finite], amap.values[::-1][finite], atol=1e-8, rtol=0)

    def test_analytic_mean_n_apex(self):
        cfg = sweep.preset("fig6b", drive_values=(0.0, 2.0, 5.0), detuning_values=(-3.0, 0.0, 3.0))
        amap = sweep.arnold_map(sweep.run(sweep.plan(cfg), cfg), "mean_n")
        assert np.allclose(amap.values[:, 0], 1 / 3)
        assert np.all(amap.values[1] >= amap.values[0])
        recs = sweep.run(sweep.plan(cfg), cfg)
        assert "coherence_gradient" in recs[0].extras

    def test_ragged_grid(self):
        cfg = small_config()
        recs = sweep.run(sweep.plan(cfg), cfg)
        with pytest.raises(ShapeError, match=r"\(1.0, 2.0\)"):
            sweep.arnold_map(recs[:-1], "delta")

    def test_log_resume(self, tmp_path):
        cfg = small_config()
        log = tmp_path / "run.jsonl"
        first = sweep.run(sweep.plan(cfg)[:4], cfg, log_path=log)
        assert len(first) == 4
        full = sweep.run(sweep.plan(cfg), cfg, log_path=log)
        header, logged = sweep.read_log(log)
        assert header["config_hash"] == cfg.config_hash()
        assert [r.index for r in logged] == list(range(9))
        assert full[:4] == first
        with pytest.raises(ConfigError):
            sweep.run(sweep.plan(cfg), small_config(n_theta=32), log_path=log)


class TestConvergence:
    def test_converged_deep_quantum(self):
        rep = sweep.convergence_check(SystemParams(0.0, 1.0, 1e3), "delta", (8, 12, 16))
        assert rep.converged and not rep.cutoff_dependent

    def test_classical_is_cutoff_dependent(self):
        rep = sweep.convergence_check(SystemParams(0.0, 10.0, 0.0), "delta", (20, 40, 60))
        assert rep.cutoff_dependent

    @pytest.mark.parametrize("dims", [(12,), (12, 8), (12, 12)])
    def test_bad_dims(self, dims):
        with pytest.raises(ValueError):
            sweep.convergence_check(SystemParams(0.0, 1.0, 1e3), "delta", dims)
