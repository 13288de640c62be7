"""CLI contract: subcommands, exit codes, reports, determinism."""

import numpy as np
import pytest

from srgc.cli import main
from srgc.lightfield import lf_equal, load_light_field

SCENE = """
angular 3 3
spatial 32 32
bitdepth 8
background 90
seed 4
patch rect 2 2 12 12 0.5 noise 40 210 8
patch rect 18 18 12 12 0.5 noise 40 210 8
"""


@pytest.fixture
def scene_dir(tmp_path):
    spec = tmp_path / "scene.txt"
    spec.write_text(SCENE)
    out = tmp_path / "lf"
    assert main(["synth", "--spec", str(spec), "--out", str(out)]) == 0
    return out


def _report_dict(path):
    out = {}
    for line in path.read_text().splitlines():
        k, v = line.split("=", 1)
        out[k] = v
    return out


class TestPipeline:
    def test_synth_encode_decode(self, scene_dir, tmp_path):
        stream = tmp_path / "a.srgc"
        rec = tmp_path / "rec"
        code = main(
            [
                "encode", str(scene_dir),
                "--disparity", str(scene_dir / "gt.lfdm"),
                "--q-gft", "8", "--slic-k", "8", "--n-target", "128",
                "--out", str(stream),
            ]
        )
        assert code == 0 and stream.exists()
        assert main(["decode", str(stream), "--out", str(rec)]) == 0
        loaded = load_light_field(rec)
        assert loaded.spatial_dims == (32, 32)

    def test_missing_input_dir_exit_2(self, tmp_path, capsys):
        code = main(
            [
                "encode", str(tmp_path / "nope"),
                "--disparity", str(tmp_path / "gt.lfdm"),
                "--out", str(tmp_path / "a.srgc"),
            ]
        )
        assert code == 2
        assert capsys.readouterr().err.strip()

    def test_unknown_flag_exit_1(self, capsys):
        assert main(["encode", "x", "--bogus"]) == 1

    def test_missing_subcommand_exit_1(self):
        assert main([]) == 1

    def test_bad_scene_spec_exit_2(self, tmp_path):
        spec = tmp_path / "bad.txt"
        spec.write_text("patch blob 0 0 1 1 0 const 3")
        assert main(["synth", "--spec", str(spec), "--out", str(tmp_path / "o")]) == 2


class TestGroupingFlag:
    def test_no_grouping_vs_default_eig_counts(self, scene_dir, tmp_path):
        common = [
            "encode", str(scene_dir),
            "--disparity", str(scene_dir / "gt.lfdm"),
            "--q-gft", "16", "--slic-k", "8", "--n-target", "128",
        ]
        rep_g = tmp_path / "g.txt"
        rep_n = tmp_path / "n.txt"
        assert main(common + ["--out", str(tmp_path / "g.srgc"), "--report", str(rep_g)]) == 0
        assert main(
            common + ["--no-grouping", "--out", str(tmp_path / "n.srgc"), "--report", str(rep_n)]
        ) == 0
        drep_g = tmp_path / "dg.txt"
        drep_n = tmp_path / "dn.txt"
        assert main(["decode", str(tmp_path / "g.srgc"), "--out", str(tmp_path / "rg"),
                     "--report", str(drep_g)]) == 0
        assert main(["decode", str(tmp_path / "n.srgc"), "--out", str(tmp_path / "rn"),
                     "--report", str(drep_n)]) == 0
        enc_g = _report_dict(rep_g)
        dec_g = _report_dict(drep_g)
        dec_n = _report_dict(drep_n)
        if int(enc_g["groups"]) >= 1:
            assert int(dec_g["eig_decoder"]) < int(dec_n["eig_decoder"])

    def test_grouped_psnr_not_worse(self, scene_dir, tmp_path):
        """Raw residuals make grouped reconstruction at least as good."""
        from srgc.bench import psnr

        common = [
            "encode", str(scene_dir),
            "--disparity", str(scene_dir / "gt.lfdm"),
            "--q-gft", "16", "--slic-k", "8", "--n-target", "128",
            "--residual-mode", "raw",
        ]
        assert main(common + ["--out", str(tmp_path / "g.srgc")]) == 0
        assert main(common + ["--no-grouping", "--out", str(tmp_path / "n.srgc")]) == 0
        assert main(["decode", str(tmp_path / "g.srgc"), "--out", str(tmp_path / "rg")]) == 0
        assert main(["decode", str(tmp_path / "n.srgc"), "--out", str(tmp_path / "rn")]) == 0
        src = load_light_field(scene_dir)
        p_g = psnr(src, load_light_field(tmp_path / "rg"))
        p_n = psnr(src, load_light_field(tmp_path / "rn"))
        assert p_g >= p_n - 1e-9


class TestDeterminism:
    def test_thread_counts_byte_identical(self, scene_dir, tmp_path):
        blobs = []
        for threads in ("1", "8"):
            out = tmp_path / f"t{threads}.srgc"
            assert main(
                [
                    "encode", str(scene_dir),
                    "--disparity", str(scene_dir / "gt.lfdm"),
                    "--q-gft", "16", "--slic-k", "8", "--n-target", "128",
                    "--threads", threads,
                    "--out", str(out),
                ]
            ) == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]


class TestConfigPrecedence:
    def test_file_then_flags(self, scene_dir, tmp_path):
        cfgfile = tmp_path / "cfg.txt"
        cfgfile.write_text("q_gft = 16\nslic_k = 8\nn_target = 128\n")
        out1 = tmp_path / "a.srgc"
        out2 = tmp_path / "b.srgc"
        common = ["encode", str(scene_dir), "--disparity", str(scene_dir / "gt.lfdm"),
                  "--config", str(cfgfile)]
        assert main(common + ["--out", str(out1)]) == 0
        # flag overrides the file: different q -> different stream
        assert main(common + ["--q-gft", "64", "--out", str(out2)]) == 0
        assert out1.read_bytes() != out2.read_bytes()

    def test_unknown_config_key_exit_2(self, scene_dir, tmp_path):
        cfgfile = tmp_path / "cfg.txt"
        cfgfile.write_text("quality = 3\n")
        assert main(
            ["encode", str(scene_dir), "--disparity", str(scene_dir / "gt.lfdm"),
             "--config", str(cfgfile), "--out", str(tmp_path / "x.srgc")]
        ) == 2


class TestAnalyze:
    def test_stream_info(self, scene_dir, tmp_path, capsys):
        stream = tmp_path / "a.srgc"
        assert main(
            ["encode", str(scene_dir), "--disparity", str(scene_dir / "gt.lfdm"),
             "--q-gft", "16", "--slic-k", "8", "--out", str(stream)]
        ) == 0
        assert main(["analyze", str(stream)]) == 0
        out = capsys.readouterr().out
        assert "magic=SRGC" in out
        assert "bpp=" in out
        assert "section_coefficients_bytes=" in out

    def test_psnr_mode(self, scene_dir, tmp_path, capsys):
        assert main(["analyze", "--ref", str(scene_dir), "--rec", str(scene_dir)]) == 0
        assert "psnr_y=inf" in capsys.readouterr().out

    def test_no_args_usage_error(self):
        assert main(["analyze"]) == 1


class TestSweep:
    def test_csv_written(self, scene_dir, tmp_path):
        out = tmp_path / "rd.csv"
        assert main(
            [
                "sweep", str(scene_dir),
                "--disparity", str(scene_dir / "gt.lfdm"),
                "--q-list", "16,64",
                "--slic-k", "8", "--n-target", "128",
                "--out", str(out),
            ]
        ) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("q_gft,q_dct,bpp,psnr_y")
        assert len(lines) == 3

    def test_bad_qlist_exit_1(self, scene_dir, tmp_path):
        assert main(
            ["sweep", str(scene_dir), "--disparity", str(scene_dir / "gt.lfdm"),
             "--q-list", "a,b"]
        ) == 1
