import json
import subprocess
import sys

import pytest

from halfline import checks, cli, io
from halfline import matrix as mr
from halfline import measure as m
from halfline.spectra import nonexample_measure


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(io.dumps(obj))
        return str(path)
    return write


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_deform_at_one_keeps_origin_atom(files, capsys):
    mu = m.HalfLineMeasure([(0.0, 2.0), (1.0, 1.0)])
    mu = m.add(mu, m.from_function(lambda x: 1 + 0 * x, 0.25, 1.0))
    code, out, _ = run(capsys, "deform", files("mu.json", io.measure_to_obj(mu)), "--t", "1")
    assert code == 0
    assert json.loads(out) == {"atoms": [{"loc": 0.0, "re": 2.0, "im": 0.0}],
                               "density": None}


def test_convolve_norm_det(files, capsys):
    a = files("a.json", io.measure_to_obj(m.dirac_at(1.0)))
    b = files("b.json", io.measure_to_obj(m.scale(2.0, m.dirac_at(0.5))))
    code, out, _ = run(capsys, "convolve", a, b)
    assert code == 0 and io.measure_from_obj(json.loads(out)).atoms == [(1.5, 2 + 0j)]
    code, out, _ = run(capsys, "norm", b)
    assert json.loads(out) == {"tv_norm": 2.0}
    mat = files("m.json", io.matrix_to_obj(mr.shear(2, 1, 2, m.dirac_at(1.0))))
    code, out, _ = run(capsys, "det", mat)
    assert io.measure_from_obj(json.loads(out)).atoms == [(0.0, 1 + 0j)]


def test_laplace_csv(files, capsys):
    path = files("mu.json", io.measure_to_obj(nonexample_measure(2.0 ** -8, 16.0)))
    code, out, _ = run(capsys, "laplace", path, "--s", "1", "2", "2+1j")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "s_re,s_im,val_re,val_im"
    s_re, s_im, re, im = map(float, lines[2].split(","))
    assert (s_re, s_im) == (2.0, 0.0) and abs(re - 2 / 9) <= 1e-4


def test_factor_commands(files, capsys):
    rot = files("rot.json", io.matrix_to_obj(mr.constant([[0, 1], [-1, 0]])))
    code, out, _ = run(capsys, "factor-complex", rot)
    report = json.loads(out)["report"]
    assert code == 0 and report["max_roundtrip_error"] <= 1e-12
    poly = mr.MeasureMatrix([[m.HalfLineMeasure([(0.0, 1), (1.0, 1)]), m.dirac_at(1.0)],
                             [m.scale(-1, m.dirac_at(1.0)),
                              m.HalfLineMeasure([(0.0, 1), (1.0, -1)])]])
    code, out, _ = run(capsys, "factor-poly", files("p.json", io.matrix_to_obj(poly)))
    assert code == 0 and json.loads(out)["report"]["max_roundtrip_error"] <= 1e-12


def test_homotopy_command(files, capsys):
    mat = files("m.json", io.matrix_to_obj(mr.shear(2, 1, 2, m.dirac_at(1.0))))
    code, out, _ = run(capsys, "homotopy", mat, "--samples", "9")
    cert = json.loads(out)
    assert code == 0 and cert["samples"] == 9 and cert["end_residual"] == 0
    code, out, _ = run(capsys, "homotopy", mat, "--samples", "5", "--full")
    assert len(json.loads(out)["samples"]) == 5


def test_spectrum_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "--h", "0.0078125", "--horizon", "16",
                       "spectrum", "--samples", "720", "--resolution", "128")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "theta,re,im"
    assert [float(x) for x in lines[1].split(",")] == [0.0, 1.0, 0.0]
    assert len(lines) == 721
    code, _, _ = run(capsys, "spectrum", "--resolution", "128", "--out-dir", str(tmp_path))
    report = json.loads((tmp_path / "spectrum_report.json").read_text())
    assert report["bounded_components"] == 0
    assert report["closed_form_max_error"] <= 5e-4


def test_outputs_are_byte_identical(files, tmp_path, capsys):
    mu = files("mu.json", io.measure_to_obj(nonexample_measure(2.0 ** -6, 8.0)))
    outs = []
    for k in range(2):
        target = tmp_path / f"out{k}.json"
        assert run(capsys, "-o", str(target), "deform", mu, "--t", "0.3")[0] == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_output_reparses_to_same_value(files, capsys):
    mu = nonexample_measure(2.0 ** -6, 8.0)
    code, out, _ = run(capsys, "deform", files("mu.json", io.measure_to_obj(mu)),
                       "--t", "0.25")
    assert m.distance(io.measure_from_obj(json.loads(out)), m.deform(mu, 0.25)) <= 1e-12


@pytest.mark.parametrize("text, kind", [
    ("{bad", "parse_error"),
    ('{"atoms": [{"loc": -1, "re": 1}], "density": null}', "parse_error"),
])
def test_domain_errors_exit_one(tmp_path, capsys, text, kind):
    path = tmp_path / "bad.json"
    path.write_text(text)
    code, out, err = run(capsys, "norm", str(path))
    assert code == 1 and out == ""
    payload = json.loads(err)
    assert payload["error"] == kind and payload["message"]


def test_mathematical_errors_exit_one(files, capsys):
    code, _, err = run(capsys, "deform", files("d.json", io.measure_to_obj(m.dirac())),
                       "--t", "2")
    assert code == 1 and "error" in json.loads(err)
    rot = files("r.json", io.matrix_to_obj(mr.constant([[2, 0], [0, 1]])))
    code, _, err = run(capsys, "factor-complex", rot)
    assert code == 1 and json.loads(err)["error"] == "determinant_not_one"
    code, _, err = run(capsys, "factor-complex",
                       files("s.json", io.matrix_to_obj(mr.shear(2, 1, 2, m.dirac_at(1.0)))))
    assert code == 1 and json.loads(err)["error"] == "membership_violation"
    code, _, err = run(capsys, "laplace", files("d2.json", io.measure_to_obj(m.dirac())),
                       "--s", "-1")
    assert code == 1 and json.loads(err)["error"] == "half_plane_violation"


def test_verify_exit_codes(capsys, monkeypatch, tmp_path):
    target = tmp_path / "v.json"
    code, out, _ = run(capsys, "verify", "--only", "1,2,9", "--json", str(target))
    assert code == 0 and out.count("[PASS]") == 3
    assert [r["number"] for r in json.loads(target.read_text())] == [1, 2, 9]

    failing = checks.CheckResult(99, "always-fails", False, 1.0, 0.0, 0.0)
    monkeypatch.setattr(checks, "run_checks", lambda seed, only=None: [failing])
    code, out, _ = run(capsys, "verify")
    assert code == 2 and "[FAIL]" in out


def test_console_entry_point():
    done = subprocess.run([sys.executable, "-m", "halfline", "spectrum", "--samples", "4",
                           "--resolution", "64"], capture_output=True, text=True)
    assert done.returncode == 0
    assert done.stdout.splitlines()[1] == "0.0,1.0,0.0"
