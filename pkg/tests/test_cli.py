import json
import math

from qclift.cli import main


def run(tmp_path, *args, sub="analyze", mapname="identity", extra=()):
    out = tmp_path / "out"
    argv = [sub, "--map", mapname, "--out", str(out), *args, *extra]
    return main(argv), out


def test_analyze_identity(tmp_path):
    code, out = run(tmp_path, "--grid", "8x16", "--no-figures")
    assert code == 0
    payload = json.loads((out / "analysis.json").read_text())
    assert payload["rho_estimate"] == 0.0
    assert payload["condition_violated"] is False
    header = (out / "condition_grid.csv").read_text().splitlines()[0]
    assert header == "z_re,z_im,n_value,margin"


def test_analyze_alpha_power(tmp_path):
    code, out = run(tmp_path, "--grid", "12x32", "--no-figures",
                    mapname="alpha_power:alpha=0.7071067811865476")
    assert code == 0
    payload = json.loads((out / "analysis.json").read_text())
    assert abs(payload["rho_estimate"] - 0.5) < 1e-6


def test_analyze_koebe_flags_violation(tmp_path):
    code, out = run(tmp_path, "--grid", "8x16", "--no-figures", mapname="koebe")
    assert code == 0
    payload = json.loads((out / "analysis.json").read_text())
    assert payload["condition_violated"] is True
    assert payload["rho_estimate"] >= 3.0 - 1e-9


def test_verify_identity_passes(tmp_path):
    code, out = run(tmp_path, "--grid", "10x24", "--samples", "40",
                    "--no-figures", sub="verify")
    assert code == 0
    payload = json.loads((out / "verification.json").read_text())
    assert payload["schema_version"] == 1
    names = [c["name"] for c in payload["checks"]]
    from qclift.suite import REGISTERED_CHECK_NAMES
    assert names == REGISTERED_CHECK_NAMES
    assert all(c["status"] != "fail" for c in payload["checks"])
    assert all(c["anchor"] for c in payload["checks"])


def test_verify_koebe_warns_not_fails(tmp_path, capsys):
    code, out = run(tmp_path, "--grid", "10x24", "--samples", "30",
                    "--no-figures", sub="verify", mapname="koebe")
    assert code == 0
    err = capsys.readouterr().err
    assert "rho >= 1" in err
    payload = json.loads((out / "verification.json").read_text())
    assert payload["condition_violated"] is True
    statuses = {c["name"]: c["status"] for c in payload["checks"]}
    assert statuses["condition-rho"] == "not-guaranteed"
    assert statuses["contact-order"] == "pass"


def test_extend_identity_sphere_image(tmp_path):
    code, out = run(tmp_path, "--grid", "8x24", "--no-figures", sub="extend",
                    extra=("--surface", "sphere-image", "--t", "0.0"))
    assert code == 0
    info = json.loads((out / "sphere_image_info.json").read_text())
    assert info["dropped_infinite"] == 0
    lines = (out / "sphere_image.obj").read_text().splitlines()
    verts = [tuple(map(float, ln.split()[1:])) for ln in lines if ln.startswith("v ")]
    assert len(verts) == info["vertices"]
    for v in verts:
        assert abs(math.hypot(*v) - 1.0) <= 1e-9   # unit upper hemisphere
        assert v[2] >= 0.0


def test_extend_identity_sigma_is_flat_disk(tmp_path):
    code, out = run(tmp_path, "--grid", "6x16", "--no-figures", sub="extend",
                    extra=("--surface", "sigma"))
    assert code == 0
    lines = (out / "sigma.obj").read_text().splitlines()
    verts = [tuple(map(float, ln.split()[1:])) for ln in lines if ln.startswith("v ")]
    assert all(abs(v[2]) < 1e-12 and math.hypot(v[0], v[1]) < 1.0 for v in verts)
    faces = [ln for ln in lines if ln.startswith("f ")]
    assert len(faces) == 16 + 2 * 16 * 5   # center fan plus split quads


def test_extend_identity_sigma_star_inversion(tmp_path):
    code, out = run(tmp_path, "--grid", "6x16", "--no-figures", sub="extend",
                    extra=("--surface", "sigma-star"))
    assert code == 0
    info = json.loads((out / "sigma_star_info.json").read_text())
    assert info["dropped_infinite"] == 1   # the center reflects to infinity
    lines = (out / "sigma_star.obj").read_text().splitlines()
    verts = [tuple(map(float, ln.split()[1:])) for ln in lines if ln.startswith("v ")]
    for v in verts:
        assert math.hypot(v[0], v[1]) > 1.0   # exterior points zeta/|zeta|²


def test_dilatation_identity_and_shear(tmp_path):
    code, out = run(tmp_path, "--grid", "8x16", "--samples", "60",
                    "--no-figures", sub="dilatation")
    assert code == 0
    payload = json.loads((out / "dilatation.json").read_text())
    assert payload["max_ratio"] <= 1 + 1e-6
    code, out2 = run(tmp_path / "b", "--grid", "8x16", "--samples", "60",
                     "--no-figures", sub="dilatation", mapname="shear:alpha=0.25")
    assert code == 0
    payload = json.loads((out2 / "dilatation.json").read_text())
    assert payload["max_ratio"] <= 1.0001


def test_planar_identity_grid(tmp_path):
    code, out = run(tmp_path, "--grid", "16x32", "--no-figures", sub="planar")
    assert code == 0
    payload = json.loads((out / "planar.json").read_text())
    assert payload["boundary_continuity_ok"] is True
    rows = (out / "planar_grid.csv").read_text().splitlines()[1:]
    for row in rows:
        zr, zi, fr, fi, side = row.split(",")
        assert abs(float(zr) - float(fr)) < 1e-12
        assert abs(float(zi) - float(fi)) < 1e-12


def test_planar_analytic_matches_classical(tmp_path):
    from qclift.extension import classical_aw
    from qclift.maps import builtin
    code, out = run(tmp_path, "--grid", "64x128", "--no-figures", sub="planar",
                    mapname="alpha_power:alpha=0.7071067811865476")
    assert code == 0
    spec = builtin("alpha_power", alpha=0.7071067811865476)
    rows = (out / "planar_grid.csv").read_text().splitlines()[1:]
    checked = 0
    for row in rows:
        zr, zi, fr, fi, side = row.split(",")
        if side != "outside":
            continue
        z = complex(float(zr), float(zi))
        F = classical_aw(spec, z)
        assert abs(complex(float(fr), float(fi)) - F) <= 1e-12 * (1 + abs(F))
        checked += 1
    assert checked > 100
    payload = json.loads((out / "planar.json").read_text())
    assert payload["boundary_continuity_ok"] is True


def test_determinism(tmp_path):
    for sub, name, files in [
        ("verify", "shear:alpha=0.25", ("verification.json", "checks.csv")),
        ("extend", "identity", ("sigma.obj", "sigma_info.json")),
        ("dilatation", "identity", ("dilatation.csv", "dilatation.json")),
        ("planar", "shear:alpha=0.25", ("planar_grid.csv", "planar.json")),
    ]:
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / f"{sub}-{tag}"
            argv = [sub, "--map", name, "--grid", "6x12", "--samples", "20",
                    "--seed", "7", "--out", str(out), "--no-figures"]
            assert main(argv) in (0, 1)
            outs.append(out)
        for fname in files:
            assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()


def test_figures_rendered_by_default(tmp_path):
    code, out = run(tmp_path, "--grid", "6x12")
    assert code == 0
    assert (out / "condition_margin.png").exists()
    code, out2 = run(tmp_path / "f2", "--grid", "6x12", "--no-figures")
    assert code == 0
    assert not (out2 / "condition_margin.png").exists()


def test_bad_map_exits_2(tmp_path):
    assert main(["analyze", "--map", "no_such_builtin",
                 "--out", str(tmp_path)]) == 2
    assert main(["analyze", "--map", "shear:alpha=oops",
                 "--out", str(tmp_path)]) == 2


def test_bad_map_file_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["analyze", "--map", str(bad), "--out", str(tmp_path)]) == 2


def test_bad_grid_exits_2(tmp_path):
    assert main(["analyze", "--map", "identity", "--grid", "nope",
                 "--out", str(tmp_path)]) == 2


def test_map_file_input(tmp_path):
    cfg = {"h_prime": {"type": "builtin", "name": "alpha_power",
                       "params": {"alpha": 0.95}},
           "q": {"type": "series", "coeffs": [[0.0, 0.0], [0.1, 0.0]]}}
    path = tmp_path / "blend.json"
    path.write_text(json.dumps(cfg))
    code, out = run(tmp_path, "--grid", "8x16", "--no-figures",
                    mapname=str(path))
    assert code == 0
    payload = json.loads((out / "analysis.json").read_text())
    assert 0.0 < payload["rho_estimate"] < 1.0


def test_extend_shell_is_domain_sphere(tmp_path):
    code, out = run(tmp_path, "--grid", "6x16", "--no-figures", sub="extend",
                    mapname="shear:alpha=0.25",
                    extra=("--surface", "shell", "--t", "0.3"))
    assert code == 0
    lines = (out / "shell.obj").read_text().splitlines()
    verts = [tuple(map(float, ln.split()[1:])) for ln in lines if ln.startswith("v ")]
    # the domain shell is independent of the map and meets C along the unit circle
    from qclift.extension import fiber_point
    p = fiber_point(0j, 0.3)
    assert any(abs(v[0]) < 1e-12 and abs(v[1]) < 1e-12
               and abs(v[2] - p.x3) < 1e-12 for v in verts)


def test_timing_flag_controls_report_field(tmp_path):
    code, out = run(tmp_path, "--grid", "4x8", "--no-figures", extra=("--timing",))
    assert code == 0
    assert "timing_seconds" in json.loads((out / "analysis.json").read_text())
    code, out2 = run(tmp_path / "t2", "--grid", "4x8", "--no-figures")
    assert "timing_seconds" not in json.loads((out2 / "analysis.json").read_text())


def test_forced_tolerance_failure_sets_exit_one(tmp_path):
    out = tmp_path / "strict"
    code = main(["verify", "--map", "identity", "--grid", "6x12",
                 "--samples", "20", "--out", str(out), "--no-figures",
                 "--tol-scale", "1e-9"])
    assert code == 1
    payload = json.loads((out / "verification.json").read_text())
    assert any(c["status"] == "fail" for c in payload["checks"])


def test_samples_below_one_rejected(tmp_path):
    assert main(["analyze", "--map", "identity", "--samples", "0",
                 "--out", str(tmp_path)]) == 2


def test_all_figure_paths_render(tmp_path):
    jobs = [
        ("analyze", "identity", ["condition_margin.png"]),
        ("verify", "identity", ["margins.png"]),
        ("extend", "identity", ["sigma.png"]),
        ("dilatation", "identity", ["dilatation_hist.png"]),
        ("planar", "identity", ["planar_map.png"]),
    ]
    for sub, name, pngs in jobs:
        out = tmp_path / sub
        argv = [sub, "--map", name, "--grid", "5x12", "--samples", "10",
                "--out", str(out)]
        assert main(argv) == 0
        for png in pngs:
            assert (out / png).stat().st_size > 0


def test_extend_sigma_star_warns_out_of_hypothesis(tmp_path, capsys):
    code, out = run(tmp_path, "--grid", "5x12", "--no-figures", sub="extend",
                    mapname="koebe", extra=("--surface", "sigma-star"))
    assert code == 0
    assert "rho" in capsys.readouterr().err


def test_verify_blend_through_map_file(tmp_path):
    cfg = {"h_prime": {"type": "builtin", "name": "alpha_power",
                       "params": {"alpha": 0.95}},
           "q": {"type": "series", "coeffs": [[0.0, 0.0], [0.1, 0.0]]}}
    path = tmp_path / "blend.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    code = main(["verify", "--map", str(path), "--grid", "12x24",
                 "--samples", "60", "--out", str(out), "--no-figures"])
    assert code == 0
    payload = json.loads((out / "verification.json").read_text())
    assert 0.0 < payload["rho_estimate"] < 1.0
    assert all(c["status"] != "fail" for c in payload["checks"])
