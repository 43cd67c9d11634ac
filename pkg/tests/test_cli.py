import csv
import subprocess
import sys

import numpy as np
import pytest

from svrcodec.cli import main
from svrcodec.pixio import GrayImage, read_pgm, write_pgm


@pytest.fixture
def pgm(tmp_path, camera):
    path = tmp_path / "in.pgm"
    write_pgm(path, GrayImage.from_array(camera.pixels[:48, :64]))
    return path


@pytest.mark.parametrize("method", ["rki1", "csf-svr", "nl-svr", "jpeg"])
def test_encode_decode_metrics(method, pgm, tmp_path, capsys):
    code, out = tmp_path / "x.bin", tmp_path / "out.pgm"
    scale = "50" if method == "jpeg" else "1"
    assert main(["encode", str(pgm), "--method", method, "--scale", scale, "--out", str(code)]) == 0
    assert main(["decode", str(code), "--out", str(out)]) == 0
    assert read_pgm(out).pixels.shape == (48, 64)
    assert main(["metrics", str(pgm), str(out), "--stream", str(code),
                 "--csv", str(tmp_path / "m.csv")]) == 0
    with open(tmp_path / "m.csv", newline="") as fh:
        (rec,) = list(csv.DictReader(fh))
    assert float(rec["bpp"]) == 8 * code.stat().st_size / (48 * 64)
    assert 0 < float(rec["ssim"]) <= 1


def test_sweep_and_dump(pgm, tmp_path):
    rows, avg, grid = tmp_path / "r.csv", tmp_path / "a.csv", tmp_path / "g.csv"
    assert main(["sweep", str(pgm), "--method", "csf-svr", "--method", "jpeg", "--scale", "1",
                 "--scale", "2", "--sigma", "0.03", "--csv", str(rows), "--out", str(avg),
                 "--full-grid-dump", str(grid)]) == 0
    with open(rows, newline="") as fh:
        recs = list(csv.DictReader(fh))
    assert sum(r["method"] == "csf-svr" for r in recs) == 2
    sv = tmp_path / "sv.csv"
    assert main(["dump-sv", str(pgm), "--method", "rki1", "--sigma", "0.03", "--csv", str(sv)]) == 0
    assert sv.read_text().startswith("bx,by,i,j,weight")


def test_errors_are_one_line(tmp_path, pgm, capsys):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"nothing here")
    assert main(["decode", str(bad), "--out", str(tmp_path / "o.pgm")]) == 1
    assert main(["encode", str(tmp_path / "missing.pgm"), "--out", str(bad)]) == 1
    junk = tmp_path / "junk.pgm"
    junk.write_bytes(b"P5\n4 4\n255\n\x00")
    assert main(["metrics", str(pgm), str(junk)]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 3 and all(line.startswith("svrcodec ") for line in err)


def test_module_entry_point(pgm, tmp_path):
    res = subprocess.run([sys.executable, "-m", "svrcodec", "encode", str(pgm), "--method",
                          "wavelet", "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert res.returncode != 0 and "wavelet" in res.stderr
    res = subprocess.run([sys.executable, "-m", "svrcodec", "encode", str(pgm), "--out",
                          str(tmp_path / "o.bin")], capture_output=True, text=True)
    assert res.returncode == 0 and "bpp" in res.stdout
