import json
import subprocess
import sys
from pathlib import Path

import pytest

from dtquiver.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_quiver_dot(capsys):
    code, out, _ = run(capsys, "quiver", "--chi", "2", "--N", "3", "--emit", "dot")
    assert code == 0
    body = [l for l in out.splitlines() if "->" in l]
    assert len(body) == 12 + 6
    assert out.startswith("// pairing")
    code, out, _ = run(capsys, "quiver", "--chi", "0", "--N", "1", "--emit", "dot")
    assert code == 0 and out.count("label=") == 1


def test_quiver_json(capsys):
    code, out, _ = run(capsys, "quiver", "--chi", "1", "--N", "2")
    data = json.loads(out)
    assert data["projection"] == [[1, 0, 0], [0, 1, 2]]
    assert data["loops"] == 2
    code, out, _ = run(capsys, "quiver", "--model", "conifold")
    assert json.loads(out)["vertices"] == ["inf", "0", "1"]


def test_bps_quiver(capsys):
    code, out, _ = run(capsys, "bps-quiver", "--model", "conifold", "--gamma", "1,2,2")
    assert code == 0
    assert len(json.loads(out)["vertices"]) == 9
    code, out, _ = run(capsys, "bps-quiver", "--model", "d0d6", "--chi", "2", "--gamma", "1,3",
                       "--emit", "dot")
    assert code == 0 and out.count("label=") == 7


def test_oracle_commands(capsys):
    code, out, _ = run(capsys, "oracle", "macmahon", "--chi", "1", "--nmax", "6")
    lines = out.strip().splitlines()
    assert lines[0] == "n,coefficient" and len(lines) == 8 and lines[5] == "4,13"
    code, out, _ = run(capsys, "oracle", "oneloop", "--nmax", "12")
    assert code == 0 and out.strip().endswith("PASS")
    code, out, _ = run(capsys, "oracle", "framed", "--chi", "1", "--N", "2", "--n", "0,1")
    assert out.strip().splitlines()[1].endswith(",2")


def test_wallcross_d0d6(capsys):
    code, out, _ = run(capsys, "wallcross", str(CONFIGS / "d0d6_chi1.toml"))
    assert code == 0
    data = json.loads(out)
    assert {"class": [1, 2], "value": "3"} in data["omega_plus"]
    # multi-cover: DTbar(2,2) = Omega(2,2) + Omega(1,1)/4 = -1 - 1/4
    assert {"class": [2, 2], "value": "-5/4"} in data["dtbar_plus"]
    assert all(c["ok"] for c in data["checks"].values())
    assert set(data) >= {"omega_minus", "dtbar_minus", "omega_plus", "dtbar_plus", "checks"}
    assert "." not in "".join(e["value"] for e in data["dtbar_plus"])


def test_wallcross_same_chamber(capsys, tmp_path):
    cfg = tmp_path / "same.toml"
    cfg.write_text('[spectrum]\ngenerator = "d0d6"\nparams = { chi = 2 }\n'
                   '[charge.minus]\nvalues = ["1,1", "0,1"]\n'
                   '[charge.plus]\nvalues = ["1,1", "0,1"]\n[run]\ntruncation = 4\n')
    code, out, _ = run(capsys, "wallcross", str(cfg))
    data = json.loads(out)
    assert data["omega_plus"] == data["omega_minus"]


def test_wallcross_is_byte_stable(capsys):
    outs = {run(capsys, "wallcross", str(CONFIGS / "conifold.toml"))[1] for _ in range(2)}
    assert len(outs) == 1


def test_multiple_configs_parallel(capsys):
    paths = [str(CONFIGS / "d0d6_chi1.toml"), str(CONFIGS / "pentagon.toml")]
    serial = run(capsys, "wallcross", *paths)[1]
    parallel = run(capsys, "wallcross", *paths, "--jobs", "2")[1]
    assert serial == parallel
    assert len(json.loads(serial)) == 2


def test_check_command(capsys):
    code, out, _ = run(capsys, "check", str(CONFIGS / "standard_1_3.toml"))
    assert code == 0
    assert "pushforward\tPASS" in out


@pytest.mark.parametrize("argv", [
    ["quiver", "--chi", "1"],
    ["quiver", "--chi", "1", "--N", "-1"],
    ["oracle", "framed", "--chi", "-1", "--N", "2", "--n", "0,1"],
    ["wallcross", "/no/such/file.toml"],
    ["bps-quiver", "--model", "conifold", "--gamma", "1,x,2"],
    ["frobnicate"],
])
def test_validation_errors_exit_2(capsys, argv):
    assert main(argv) == 2


def test_bad_config_exit_2(capsys, tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[lattice]\nrank = 2\n[pairing]\nrows = [[0, 1], [1, 0]]\n[run]\ntruncation = 2\n")
    assert main(["wallcross", str(cfg)]) == 2
    cfg.write_text("this is not toml = = =")
    assert main(["wallcross", str(cfg)]) == 2
    # equal phases on a pairing that is nonzero: not generic
    cfg.write_text('[lattice]\nrank = 2\n[pairing]\nrows = [[0, 1], [-1, 0]]\n'
                   '[charge.minus]\nvalues = ["0,1", "0,1"]\n[charge.plus]\nvalues = ["1,1", "0,1"]\n'
                   '[spectrum]\nentries = [{ class = [1, 0], value = "1" }, { class = [0, 1], value = "1" }]\n'
                   '[run]\ntruncation = 3\n')
    assert main(["wallcross", str(cfg)]) == 2


def test_failed_check_exit_3(capsys, tmp_path):
    cfg = tmp_path / "asym.toml"
    # the pentagon output is not symmetric under swapping the two classes' roles in this involution
    cfg.write_text('[lattice]\nrank = 2\n[pairing]\nrows = [[0, 1], [-1, 0]]\n'
                   '[charge.minus]\nvalues = ["1,1", "-1,1"]\n[charge.plus]\nvalues = ["-1,1", "1,1"]\n'
                   '[spectrum]\nentries = [{ class = [1, 0], value = "2" }, { class = [0, 1], value = "1" }]\n'
                   '[run]\ntruncation = 3\ninvolution = [[0, 1], [1, 0]]\n')
    assert main(["check", str(cfg)]) == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dtquiver", "oracle", "macmahon", "--nmax", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "n,coefficient\n0,1\n1,-1\n2,3\n"
