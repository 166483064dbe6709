"""
tests for controller
"""
# ==================================================================================
#       Copyright (c) 2026 The stochosc authors.
#
#   Licensed under the Apache License, Version 2.0 (the "License");
#   you may not use this file except in compliance with the License.
#   You may obtain a copy of the License at
#
#          http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS,
#   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#   See the License for the specific language governing permissions and
#   limitations under the License.
# ==================================================================================
import os
import pytest
from stochosc import controller, run


@pytest.fixture
def document_file(small_document, tmp_path):
    path = tmp_path / "small.conf"
    path.write_text(small_document)
    return str(path)


def _read_all(directory):
    return {name: (directory / name).read_bytes() for name in sorted(os.listdir(directory))}


def test_simulate(document_file, tmp_path):
    paths, code = controller.simulate(document_file, str(tmp_path / "out"), threads=1)
    assert code == controller.EXIT_OK
    assert os.path.basename(paths[0]) == "effective.conf"
    assert all(p.startswith(str(tmp_path / "out")) for p in paths)


def test_worker_count_and_rerun_are_bit_identical(document_file, tmp_path):
    _, code = controller.simulate(document_file, str(tmp_path / "one"), threads=1)
    assert code == controller.EXIT_OK
    _, code = controller.simulate(document_file, str(tmp_path / "two"), threads=2)
    assert code == controller.EXIT_OK
    assert _read_all(tmp_path / "one") == _read_all(tmp_path / "two")

    # re-running from the echoed configuration reproduces everything
    _, code = controller.simulate(str(tmp_path / "one" / "effective.conf"), str(tmp_path / "echo"), threads=1)
    assert code == controller.EXIT_OK
    assert _read_all(tmp_path / "one") == _read_all(tmp_path / "echo")


def test_overrides_reach_the_run(document_file, tmp_path):
    controller.simulate(document_file, str(tmp_path / "a"), threads=1)
    controller.simulate(document_file, str(tmp_path / "b"), seed=99, threads=1, n_trajectories=6)
    echoed = (tmp_path / "b" / "effective.conf").read_text()
    assert "master_seed = 99" in echoed
    assert "n_trajectories = 6" in echoed
    assert (tmp_path / "a" / "observables_overlap.csv").read_bytes() != (tmp_path / "b" / "observables_overlap.csv").read_bytes()


def test_validation_errors(tmp_path):
    msg, code = controller.simulate("fig99", str(tmp_path))
    assert code == controller.EXIT_VALIDATION
    assert "PresetNotFound" in msg

    bad = tmp_path / "bad.conf"
    bad.write_text("nu = 0.8\ndt = 0.5\n")
    msg, code = controller.simulate(str(bad), str(tmp_path / "out"))
    assert code == controller.EXIT_VALIDATION
    assert "nu*dt exceeds 0.1" in msg
    assert not (tmp_path / "out").exists()

    _, code = controller.validate(str(bad))
    assert code == controller.EXIT_VALIDATION


def test_runtime_errors_happen_before_simulation(document_file, tmp_path, monkeypatch):
    def never(*args, **kwargs):
        raise AssertionError("no trajectory should run")

    monkeypatch.setattr(controller, "run_ensemble", never)

    blocker = tmp_path / "file"
    blocker.write_text("x")
    msg, code = controller.simulate(document_file, str(blocker), threads=1)
    assert code == controller.EXIT_RUNTIME
    assert "OutputError" in msg

    coarse = tmp_path / "coarse.conf"
    coarse.write_text("outputs = fock\nfock_times = 30\nfock_points = 101\n")
    msg, code = controller.simulate(str(coarse), str(tmp_path / "out"), threads=1)
    assert code == controller.EXIT_RUNTIME
    assert "ResolutionError" in msg
    assert not (tmp_path / "out").exists()


def test_undecodable_config(tmp_path):
    path = tmp_path / "latin1.conf"
    path.write_bytes(b"nu = 0.8\n# caf\xe9\n")
    msg, code = controller.validate(str(path))
    assert code == controller.EXIT_VALIDATION
    assert "ConfigError" in msg
    assert "line 2" in msg

    msg, code = controller.simulate(str(path), str(tmp_path / "out"), threads=1)
    assert code == controller.EXIT_VALIDATION
    assert not (tmp_path / "out").exists()


def test_unreadable_config(tmp_path, monkeypatch):
    path = tmp_path / "locked.conf"
    path.write_text("nu = 0.8\n")

    def denied(*args, **kwargs):
        raise PermissionError(13, "Permission denied")

    monkeypatch.setattr(controller, "open", denied, raising=False)
    msg, code = controller.validate(str(path))
    assert code == controller.EXIT_VALIDATION
    assert "ConfigError" in msg


def test_validate_and_presets(document_file):
    manifest, code = controller.validate(document_file)
    assert code == controller.EXIT_OK
    assert [v.label for v in manifest.variants] == ["constant", "overlap"]

    manifest, code = controller.validate("fig11")
    assert code == controller.EXIT_OK
    assert len(manifest.variants) == 2

    rows, code = controller.list_presets()
    assert code == controller.EXIT_OK
    assert rows[0][0] == "paper"
    assert len(rows) == 16


def test_metrics_file(document_file, tmp_path, monkeypatch):
    metrics = tmp_path / "metrics.prom"
    monkeypatch.setattr(controller, "METRICS_FILE", str(metrics))
    _, code = controller.simulate(document_file, str(tmp_path / "out"), threads=1)
    assert code == controller.EXIT_OK
    text = metrics.read_text()
    assert 'StochOscEnsemble_total{counter="Trajectories"}' in text


def test_cli(document_file, tmp_path, capsys):
    with pytest.raises(SystemExit) as excinfo:
        run.main(["presets"])
    assert excinfo.value.code == 0
    assert "fig15" in capsys.readouterr().out

    with pytest.raises(SystemExit) as excinfo:
        run.main(["validate", document_file])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.startswith("ok: 2 variant(s)")

    with pytest.raises(SystemExit) as excinfo:
        run.main(["validate", "nope"])
    assert excinfo.value.code == 1

    out = tmp_path / "cli"
    with pytest.raises(SystemExit) as excinfo:
        run.main(["simulate", document_file, "--out", str(out), "--threads", "1", "--n-traj", "4", "--seed", "5", "--dt", "0.02"])
    assert excinfo.value.code == 0
    printed = capsys.readouterr().out.split()
    assert str(out / "effective.conf") in printed
    assert "dt = 0.02" in (out / "effective.conf").read_text()
