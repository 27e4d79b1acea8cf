import json
from fractions import Fraction as F

import pytest

from cmc1 import catalog
from cmc1.cli import main
from cmc1.gaussian import GaussianRational as GR


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


# catalog ----------------------------------------------------------------------------------


def test_catalog_lookup():
    assert catalog.lookup("voss-k4").expected() == (4, F(4), F(4))
    assert catalog.lookup("power-n").expected(n=GR(4)) == (1, F(7, 4), F(7, 4))
    assert catalog.lookup("parabolic-catenoid").face
    with pytest.raises(catalog.UnknownSurface):
        catalog.lookup("no-such-surface")


def test_parse_helpers():
    assert catalog.parse_scalar("1-3/4i") == GR(1, F(-3, 4))
    assert catalog.parse_scalar("0.25") == GR(F(1, 4))
    assert catalog.parse_params(["n=3", "a=-1,1,i"]) == {"n": GR(3), "a": (GR(-1), GR(1), GR(0, 1))}
    with pytest.raises(ValueError):
        catalog.parse_params(["n"])


@pytest.mark.parametrize("name,bad", [("catenoid-cousin", {"l": GR(1)}), ("prop27-surface", {"theta": GR(0)}),
                                      ("voss-k3", {"a": (GR(1), GR(1))})])
def test_catalog_rejects_bad_parameters(name, bad):
    with pytest.raises(ValueError):
        catalog.build(name, **bad)


def test_cli_catalog_check(capsys):
    code, out, _ = run(capsys, "catalog", "--check")
    assert code == 0
    assert all(s["match"] for s in out["surfaces"]) and len(out["surfaces"]) == len(catalog.catalog_list())


# analyze ----------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "argv,triple",
    [
        (["--surface", "voss-k3"], (3, "3", "3")),
        (["--surface", "power-n", "--param", "n=4"], (1, "7/4", "7/4")),
        (["--surface", "catenoid-cousin", "--param", "n=2"], (2, "2", "2")),
    ],
)
def test_analyze(capsys, argv, triple):
    code, out, _ = run(capsys, "analyze", *argv, "--no-curvature")
    assert code == 0
    r = out["ramification"]
    assert (r["D_G"], r["nu"], r["bound"]) == triple
    assert all(out["checks"].values())


def test_analyze_face_and_figure(capsys, tmp_path):
    fig = tmp_path / "ell.png"
    code, out, _ = run(capsys, "analyze", "--surface", "elliptic-catenoid", "--fig", str(fig), "--samples", "10")
    assert code == 0 and out["checks"]["face_inequality"]
    assert fig.stat().st_size > 1000 and fig.read_bytes()[:4] == b"\x89PNG"


def test_analyze_failing_check_exits_1(capsys, tmp_path):
    d = catalog.build("catenoid-cousin")
    doc = d.to_json()
    doc["Q"] = catalog.build("catenoid-cousin", n=GR(2)).to_json()["Q"]
    path = tmp_path / "wrong.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "analyze", "--surface", str(path), "--no-curvature", "--samples", "10")
    assert code == 1 and out["checks"]["schwarz"] is False


def test_analyze_roundtrips_surface_file(capsys, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(catalog.build("prop27-surface").to_json()))
    code, out, _ = run(capsys, "analyze", "--surface", str(path), "--no-curvature", "--out", str(tmp_path / "o.json"))
    assert code == 0 and out is None
    assert json.loads((tmp_path / "o.json").read_text())["reducibility"]["case"] == "i"


# frobenius --------------------------------------------------------------------------------


def test_frobenius_scan(capsys, tmp_path):
    fig = tmp_path / "scan.svg"
    code, out, _ = run(capsys, "frobenius", "--surface", "prop27-surface", "--theta-scan=-10:0:0.1", "--fig", str(fig))
    assert code == 0
    assert out["vanishing_locus"] == ["-6", "-2"]
    assert len(out["scan"]) == 101
    assert fig.read_text().lstrip().startswith("<?xml")


def test_frobenius_scan_needs_theta(capsys):
    code, _, err = run(capsys, "frobenius", "--surface", "voss-k3", "--theta-scan=0:1:1")
    assert code == 2 and "theta" in json.loads(err)["error"]


# develop / monodromy / mesh ---------------------------------------------------------------


def test_develop(capsys):
    code, out, _ = run(capsys, "develop", "--surface", "enneper-cousin-dual", "--path", "[[0, 0], [1, 0]]")
    assert code == 0
    det = out["frame"]["det"]
    assert abs(det[0] - 1) < 1e-10 and abs(det[1]) < 1e-10
    assert abs(out["point"]["minkowski"][0] ** 2 - sum(x * x for x in out["point"]["minkowski"][1:]) - 1) < 1e-8


def test_monodromy(capsys, tmp_path):
    code, out, _ = run(capsys, "monodromy", "--surface", "catenoid-cousin", "--around", "0", "--fig", str(tmp_path / "m.pdf"))
    assert code == 0 and out["class"] == "SU(2)"
    code, _, _ = run(capsys, "monodromy", "--surface", "catenoid-cousin", "--around", "7")
    assert code == 2


def test_mesh_and_export(capsys, tmp_path):
    code, out, _ = run(capsys, "mesh", "--surface", "enneper-cousin-dual", "--chart", "cartesian",
                       "--range=-1,1,-1,1", "--resolution", "5,5")
    assert code == 0 and out["vertices"] == 25
    obj = tmp_path / "e.obj"
    code, _, _ = run(capsys, "export", "--surface", "enneper-cousin-dual", "--chart", "cartesian",
                     "--range=-1,1,-1,1", "--resolution", "5,5", "--file", str(obj))
    assert code == 0 and obj.read_text().count("\nv ") == 25


# usage errors -----------------------------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "--surface", "no-such-surface"],
        ["analyze", "--surface", "catenoid-cousin", "--param", "l=1"],
        ["analyze", "--surface", "catenoid-cousin", "--param", "oops"],
        ["develop", "--surface", "enneper-cousin-dual", "--path", "not json"],
        ["develop", "--surface", "catenoid-cousin", "--path", "[[1, 0], [-1, 0]]"],
        ["frobenius", "--surface", "prop27-surface", "--theta-scan=1:0:1"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in json.loads(err)


def test_argparse_errors_exit_2(capsys):
    for argv in ([], ["analyze"], ["bogus-verb"], ["analyze", "--surface", "voss-k3", "--exact", "--float"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
    capsys.readouterr()


def test_process_exit_codes():
    import subprocess
    import sys

    def code(*argv):
        return subprocess.run([sys.executable, "-m", "cmc1.cli", *argv], capture_output=True).returncode

    assert code("catalog", "--name", "voss-k3", "--check") == 0
    assert code("analyze", "--surface", "nope") == 2
    assert code("analyze") == 2
