import numpy as np
import pytest

from qmet.bounds import c_sld
from qmet.errors import NoConvergence
from qmet.experiments import (
    SCATTER_HEADER,
    draw_parameter_sets,
    haar_pure_state,
    optimize_qutrit_probe,
    qubit_sweep_row,
    qubit_rows_to_csv,
    run_scatter_study,
    run_qubit_sweep,
    scatter_row,
    scatter_rows_to_csv,
    write_csv,
    QUBIT_SWEEP_HEADER,
)
from qmet.models import eval_qutrit2, eval_qutrit3, geometry_vectors
from qmet.stepwise import best_order_dp


class TestHaarSampling:
    def test_unit_norm(self):
        rng = np.random.default_rng(0)
        for d in (2, 3, 4):
            for _ in range(50):
                psi = haar_pure_state(d, rng)
                assert abs(np.linalg.norm(psi) - 1.0) <= 1e-12

    def test_first_moment(self):
        # |<e1|psi>|^2 ~ Beta(1, d-1): mean 1/d, var (d-1)/(d^2 (d+1))
        d, n = 3, 100_000
        rng = np.random.default_rng(1)
        vals = np.array([abs(haar_pure_state(d, rng)[0]) ** 2 for _ in range(n)])
        sigma = np.sqrt((d - 1.0) / (d**2 * (d + 1.0)) / n)
        assert abs(np.mean(vals) - 1.0 / d) <= 3.0 * sigma

    def test_reproducible_stream(self):
        a = haar_pure_state(3, np.random.default_rng(42))
        b = haar_pure_state(3, np.random.default_rng(42))
        assert np.array_equal(a, b)


class TestQubitSweep:
    def test_anchor_row(self):
        row = qubit_sweep_row(0.0, 0.0, np.pi, 1.0)
        assert row["c_s"] == pytest.approx(1.25, abs=1e-12)
        assert row["c_h"] == pytest.approx(2.25, abs=1e-12)
        assert row["c_t"] == pytest.approx(2.25, abs=1e-12)
        assert row["c_sep_12"] == pytest.approx(2.25, abs=1e-12)
        assert row["c_sep_21"] == pytest.approx(2.25, abs=1e-12)
        assert row["R"] == pytest.approx(1.0, abs=1e-12)

    def test_no_violations(self):
        rows, summary = run_qubit_sweep(n_samples=2000, seed=7)
        assert summary["violations"] == 0
        assert summary["max_margin"] <= 1e-9
        assert summary["max_r_error"] <= 1e-9
        assert len(rows) == 2000

    def test_csv_shape(self, tmp_path):
        rows, _ = run_qubit_sweep(n_samples=5, seed=1)
        path = tmp_path / "sweep.csv"
        write_csv(path, QUBIT_SWEEP_HEADER, qubit_rows_to_csv(rows), {"seed": 1})
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "# seed=1"
        assert lines[1] == ",".join(QUBIT_SWEEP_HEADER)
        assert len(lines) == 2 + 5

    def test_deterministic(self):
        a, _ = run_qubit_sweep(n_samples=50, seed=3)
        b, _ = run_qubit_sweep(n_samples=50, seed=3)
        assert qubit_rows_to_csv(a) == qubit_rows_to_csv(b)

    def test_floats_round_trip_through_csv(self):
        # 17 significant digits reproduce binary doubles exactly
        rows, _ = run_qubit_sweep(n_samples=10, seed=2)
        for row, printed in zip(rows, qubit_rows_to_csv(rows)):
            for key, text in zip(QUBIT_SWEEP_HEADER, printed):
                assert float(text) == row[key]


class TestScatter:
    def test_small_run_populates_summary(self):
        rows, summary = run_scatter_study(n_states=40, seed=11)
        assert summary["n_rows"] == 40
        assert summary["n_ok"] == 40
        assert 0.0 <= summary["frac_csep_below_ch"] <= 1.0

    def test_rows_rederivable(self):
        rows, _ = run_scatter_study(n_states=8, seed=5)
        for r in rows:
            ev = eval_qutrit3(r.b, r.theta, r.phi, r.t, r.probe)
            res = best_order_dp(ev.q)
            assert res.value == pytest.approx(r.c_sep_min, rel=1e-10)
            assert res.ordering == r.best_ordering
            redo = scatter_row(r.index, (r.b, r.theta, r.phi, r.t), r.probe)
            assert redo.c_h == pytest.approx(r.c_h, rel=1e-7)

    def test_singular_probe_flagged(self):
        # a J_ntheta eigenstate has zero variance: Q_BB = 0, so the row is flagged
        b, theta, phi, t = 1.0, np.pi / 7.0, np.pi / 5.0, 1.0
        from qmet.models import geometry_vectors3, spin_one_operators

        n_theta, _, _ = geometry_vectors3(b, theta, phi, t)
        j = np.stack(spin_one_operators())
        jn = np.tensordot(n_theta, j, axes=1)
        _, vecs = np.linalg.eigh(jn)
        probe = vecs[:, 1]  # m = 0 eigenvector
        rows, summary = run_scatter_study(
            params=(b, theta, phi, t), n_states=1, seed=0, probes=[probe]
        )
        assert rows[0].flag == "singular_qfim"
        assert summary["n_ok"] == 0
        assert np.isnan(summary["frac_csep_below_ch"])

    def test_multi_param_sets(self):
        rows, _ = run_scatter_study(n_states=3, seed=9, multi_params=2)
        assert len(rows) == 6
        assert len({(r.b, r.theta, r.phi) for r in rows}) == 2
        sets = draw_parameter_sets(4, np.random.default_rng(0))
        assert len(sets) == 4
        for b, theta, phi, t in sets:
            assert 0.5 <= b <= 2.0 and abs(theta) <= np.pi / 3.0 and t == 1.0

    def test_csv_roundtrip_deterministic(self, tmp_path):
        config = {"command": "scatter", "seed": 13, "n_states": 6}
        out = []
        for k in range(2):
            rows, _ = run_scatter_study(n_states=6, seed=13)
            path = tmp_path / f"scatter{k}.csv"
            write_csv(path, SCATTER_HEADER, scatter_rows_to_csv(rows), config)
            out.append(path.read_bytes())
        assert out[0] == out[1]

    def test_threaded_matches_serial(self, monkeypatch):
        rows_serial, _ = run_scatter_study(n_states=6, seed=2)
        monkeypatch.setenv("QMET_THREADS", "4")
        rows_threaded, _ = run_scatter_study(n_states=6, seed=2)
        assert scatter_rows_to_csv(rows_serial) == scatter_rows_to_csv(rows_threaded)


class TestProbeOptimization:
    def test_reference_point(self):
        res = optimize_qutrit_probe(np.pi, np.pi / 4.0, 1.0, seed=3, restarts=8)
        assert res.residual_u <= 1e-6
        assert res.qfim_deviation <= 1e-4
        ev = eval_qutrit2(np.pi, np.pi / 4.0, 1.0, res.probe)
        assert c_sld(ev.q) == pytest.approx(0.3125, rel=1e-4)

    def test_residuals_rederivable(self):
        res = optimize_qutrit_probe(1.3, 0.4, 0.9, seed=5, restarts=6)
        ev = eval_qutrit2(1.3, 0.4, 0.9, res.probe)
        target = np.diag([4.0 * 0.9**2, 16.0 * np.sin(1.3 * 0.9 / 2.0) ** 2])
        assert np.linalg.norm(ev.u) == pytest.approx(res.residual_u, abs=1e-12)
        assert np.linalg.norm(ev.q - target) == pytest.approx(
            res.qfim_deviation, abs=1e-12
        )

    def test_degenerate_angle_fails(self):
        # B t = 2 pi freezes the theta row of the QFIM; no probe can converge
        with pytest.raises(NoConvergence):
            optimize_qutrit_probe(2.0 * np.pi, 0.7, 1.0, seed=1, restarts=2)
