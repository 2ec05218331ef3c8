import json

import pytest

from jandl import io
from jandl.cli import main
from jandl.localdata import generate_pure_gauge
from jandl.surface import named_surface


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def mobius_scene(tmp_path, capsys):
    path = tmp_path / "scene.json"
    assert run(capsys, "generate", "--surface", "mobius", "--seed", "3", "--out", str(path))[0] == 0
    return path


class TestRoundTrip:
    @pytest.mark.parametrize("model, rank", [("mobius", 1), ("annulus", 2), ("rp2", 1)])
    def test_scene_byte_identical(self, model, rank):
        dc = named_surface(model)
        d = generate_pure_gauge(dc, 2, rank=rank)
        text = io.dump_text(io.Scene(dc, d, 2).to_json())
        again = io.dump_text(io.scene_from_json(json.loads(text)).to_json())
        assert again == text

    def test_flat_byte_identical(self, tmp_path, capsys):
        path = tmp_path / "flat.json"
        run(capsys, "generate", "--equivariant", "v4", "--rank", "1", "--out", str(path))
        text = path.read_text()
        assert io.dump_text(io.flat_to_json(io.flat_from_json(json.loads(text)))) == text

    def test_generate_is_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for p in (a, b):
            run(capsys, "generate", "--surface", "klein", "--seed", "5", "--out", str(p))
        assert a.read_bytes() == b.read_bytes()

    def test_scene_references_relative_files(self, tmp_path):
        dc = named_surface("disk")
        d = generate_pure_gauge(dc, 0)
        (tmp_path / "s.json").write_text(io.dump_text(io.surface_to_json(dc)))
        (tmp_path / "d.json").write_text(io.dump_text(io.datum_to_json(d)))
        (tmp_path / "scene.json").write_text(json.dumps({"surface": "s.json", "datum": "d.json"}))
        scene = io.load_scene(tmp_path / "scene.json")
        assert scene.datum.rank == 1


class TestParsing:
    def test_bad_phase(self):
        with pytest.raises(io.InputError):
            io.parse_phase(0.5)
        with pytest.raises(io.InputError):
            io.parse_phase("1/0")

    def test_unknown_group(self):
        with pytest.raises(io.InputError, match="unknown group"):
            io.group_from_json("d8")

    def test_rank_mismatch(self, mobius_scene):
        obj = json.loads(mobius_scene.read_text())
        obj["rank"] = 2
        with pytest.raises(io.InputError, match="rank"):
            io.scene_from_json(obj)


class TestValidateCommand:
    def test_clean(self, mobius_scene, capsys):
        code, out, _ = run(capsys, "validate", "--scene", str(mobius_scene))
        report = json.loads(out)
        assert code == 0 and report["clean"] and report["command"] == "validate"

    def test_perturbed_g(self, mobius_scene, tmp_path, capsys):
        obj = json.loads(mobius_scene.read_text())
        row = obj["datum"]["g_v"][0]
        row[1] = io.Phase.parse(row[1]).__mul__(io.Phase.parse("1/7")).to_text()
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(obj))
        code, out, _ = run(capsys, "validate", "--scene", str(bad))
        rels = {v["relation"] for v in json.loads(out)["violations"]}
        assert code == 1 and "R2" in rels

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(capsys, "validate", "--scene", str(tmp_path / "nope.json"))
        assert code == 2 and "cannot read" in err

    def test_malformed_json(self, tmp_path, capsys):
        p = tmp_path / "broken.json"
        p.write_text('{\n  "surface": [1, 2,\n}')
        code, _, err = run(capsys, "validate", "--scene", str(p))
        assert code == 2 and "line 3" in err

    def test_report_file(self, mobius_scene, tmp_path, capsys):
        rep = tmp_path / "report.json"
        code, out, _ = run(capsys, "validate", "--scene", str(mobius_scene), "--report", str(rep))
        assert code == 0 and out == "" and json.loads(rep.read_text())["clean"]

    def test_unknown_option(self, capsys):
        assert run(capsys, "validate", "--bogus")[0] == 2


class TestHolonomyCommand:
    def test_pure_gauge_sweep(self, mobius_scene, capsys):
        code, out, _ = run(capsys, "holonomy", "--scene", str(mobius_scene), "--sweep", "all")
        rep = json.loads(out)
        assert code == 0 and rep["value"] == "0/1"
        assert rep["invariant"] and rep["exhaustive"]

    def test_rank_two(self, tmp_path, capsys):
        p = tmp_path / "ann.json"
        run(capsys, "generate", "--surface", "annulus", "--rank", "2", "--out", str(p))
        code, out, _ = run(capsys, "holonomy", "--scene", str(p), "--sweep", "20")
        rep = json.loads(out)
        assert code == 0 and rep["rank"] == 2  # trace 2 on each boundary circle
        assert rep["value"] == pytest.approx([4.0, 0.0], abs=1e-9)

    def test_twisted_rp2(self, tmp_path, capsys):
        p = tmp_path / "rp2.json"
        run(capsys, "generate", "--surface", "rp2", "--twist", "1", "--out", str(p))
        code, out, _ = run(capsys, "holonomy", "--scene", str(p))
        assert code == 0 and json.loads(out)["value"] == "1/2"

    def test_bad_sweep(self, mobius_scene, capsys):
        assert run(capsys, "holonomy", "--scene", str(mobius_scene), "--sweep", "x")[0] == 2


class TestGroupCommands:
    def test_cohomology(self, capsys):
        code, out, _ = run(capsys, "cohomology", "--group", "z2-", "--degree", "2")
        rep = json.loads(out)
        assert code == 0 and rep["cohomology"][0]["group"] == "Z/2"

    @pytest.mark.parametrize("group, count", [("z2-", 2), ("z2+", 1), ("v4", 4)])
    def test_classify(self, capsys, group, count):
        code, out, _ = run(capsys, "classify", "--group", group)
        assert code == 0 and json.loads(out)["classes"] == count


class TestDescendCommand:
    def test_descend(self, tmp_path, capsys):
        up, down = tmp_path / "up.json", tmp_path / "down.json"
        run(capsys, "generate", "--equivariant", "v4", "--labels", "2", "--out", str(up))
        code, out, _ = run(capsys, "descend", "--datum", str(up), "--group", "v4",
                           "--out", str(down))
        rep = json.loads(out)
        assert code == 0 and rep["clean"] and rep["quotient_indices"] == 4
        assert io.flat_from_json(json.loads(down.read_text())).group.order == 2

    def test_group_mismatch(self, tmp_path, capsys):
        up = tmp_path / "up.json"
        run(capsys, "generate", "--equivariant", "v4", "--out", str(up))
        assert run(capsys, "descend", "--datum", str(up), "--group", "z4alt")[0] == 2
