import json

import numpy as np
import pytest

from exchange_lab.config import build_run, load_config, parse_config
from exchange_lab.cumulant import TimeSeries
from exchange_lab.errors import ConfigError
from exchange_lab.io import CSV_COLUMNS, dumps_json, fmt, read_timeseries_csv, timeseries_csv, timeseries_json

GENERIC = {
    "model": "generic",
    "params": {
        "h_s": [[1, 0], [0, -1]],
        "h_e": [[0.5, 0], [0, -0.5]],
        "h_se": [[0, 0.3, 0, 0], [0.3, 0, 0, 0], [0, 0, 0, -0.3], [0, 0, -0.3, 0]],
    },
    "state": {"c": [1, 0], "d": {"basis_index": 0}},
    "grid": {"t_max": 2.0, "steps": 5},
}


def doc(**overrides):
    out = json.loads(json.dumps(GENERIC))
    out.update(overrides)
    return out


class TestSchema:
    def test_minimal(self):
        cfg = parse_config(doc())
        assert cfg.model == "generic"
        np.testing.assert_allclose(cfg.t_grid, np.linspace(0, 2, 5))
        assert cfg.output_format == "csv"

    @pytest.mark.parametrize(
        "bad",
        [
            doc(extra=1),
            doc(model="ising"),
            doc(grid={"t_max": 0, "steps": 3}),
            doc(grid={"t_max": 1, "steps": 0}),
            doc(grid={"t_max": 1, "steps": 2, "dt": 3}),
            doc(numerics={"method": "guess"}),
            doc(output={"format": "xml"}),
            doc(params={"h_s": [[1]], "h_e": [[1]]}),
            doc(params={**GENERIC["params"], "h_x": [[1]]}),
            doc(state={"c": "up", "d": [1, 0]}),
        ],
    )
    def test_rejects(self, bad):
        with pytest.raises(ConfigError):
            parse_config(bad)

    def test_complex_entries(self):
        cfg = parse_config(doc(state={"c": [{"re": 0.6, "im": 0.8}, 0], "d": [0.5, 0.5]}))
        _, state = build_run(cfg)
        assert state.system_amplitudes[0] == complex(0.6, 0.8)

    def test_load_errors(self, tmp_path):
        with pytest.raises(OSError):
            load_config(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(bad)


class TestBuild:
    def test_content_errors(self):
        for d in (
            doc(state={"c": [1, 1], "d": [1, 0]}),
            doc(state={"c": [1, 0], "d": {"basis_index": 9}}),
            doc(params={**GENERIC["params"], "h_se": [[0, 1], [0, 0]]}),
        ):
            with pytest.raises(ConfigError):
                build_run(parse_config(d))

    @pytest.mark.parametrize(
        "model,params,dims",
        [
            ("impurity-bec-q0", {"eps": [0.7], "e": [1.1], "n_max": 3}, (2, 4)),
            ("electron-phonon-q0", {"nu": 2, "eps": [0.5, 1.2], "omega0": 1, "v0": 0.5, "n_max": 4}, (4, 5)),
            ("two-level-env", {"e1": 1, "e2": 0, "levels": [{"eps": 0, "r12": 0.2, "i12": 0.1}]}, (1, 2)),
        ],
    )
    def test_models(self, model, params, dims):
        d = doc(model=model, params=params, state={"c": {"basis_index": 0}, "d": {"basis_index": 0}})
        m, _ = build_run(parse_config(d))
        assert (m.dim_s, m.dim_e) == dims

    def test_damping_rejected(self):
        params = {"e1": 1, "e2": 0, "c_damp": -0.1, "levels": [{"eps": 0, "r12": 0.2, "i12": 0.1}]}
        d = doc(model="two-level-env", params=params, state={"c": [1], "d": [1, 0]})
        with pytest.raises(ConfigError):
            build_run(parse_config(d))


class TestSerialization:
    def series(self):
        t = np.array([0.0, 0.1, 1 / 3])
        return TimeSeries(t, np.array([0.0, 1e-17, -2.5]), np.array([1.0, np.pi, 0.0]),
                          np.array([1, 1j, 0.5 - 0.5j]), model_name="x")

    def test_round_trip(self, tmp_path):
        path = tmp_path / "out.csv"
        text = timeseries_csv(self.series())
        path.write_bytes(text.encode())
        assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
        assert "\r" not in text
        data = read_timeseries_csv(path)
        s = self.series()
        assert np.array_equal(data["t"], s.t)
        assert np.array_equal(data["v_e"], s.v_e)
        assert np.array_equal(data["chi_im"], s.chi.imag)

    def test_fmt_round_trips(self):
        for x in (np.pi, 1 / 3, 1e-300, -0.1):
            assert float(fmt(x)) == x

    def test_json(self):
        out = json.loads(timeseries_json(self.series()))
        assert out["columns"]["t"][2] == 1 / 3
        assert json.loads(dumps_json({"z": 1j, "a": np.float64(2.0)})) == {"a": 2.0, "z": {"im": 1.0, "re": 0.0}}
