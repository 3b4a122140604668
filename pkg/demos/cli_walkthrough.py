"""
The battn command line
======================

Writes a few small input files to a temporary directory and runs each
subcommand on them, echoing what it prints.
"""
import contextlib
import io
import tempfile
from pathlib import Path

from battn.cli import main
from battn.raster import decode_pgm


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    print("$ battn", " ".join(argv))
    print(out.getvalue() + err.getvalue(), end="")
    print(f"[exit {code}]\n")
    return code


tmp = Path(tempfile.mkdtemp())
(tmp / "lm.txt").write_text(
    "LANDMARKS v1\n"
    "8\n"
    "shirt 5 0 10 4 0 22 4 0 4 14 0 28 15 1 16 27\n"
    "sock 1 0 16 16\n"
    "blank 2 2 0 0 2 0 0\n"
)

# one PGM per row, plus a status line per row in input order
run("map", "--landmarks", str(tmp / "lm.txt"), "--width", "32", "--height", "32",
    "--floor", "0.1", "--out-dir", str(tmp / "maps"))
grid = decode_pgm((tmp / "maps" / "shirt.pgm").read_bytes())
print("shirt.pgm:", grid.shape, "min", grid.min(), "max", grid.max(), "\n")

# the hull each row would be filled from
run("hull", "--landmarks", str(tmp / "lm.txt"))

# category evaluation with the cross-entropy reported alongside
(tmp / "pred.txt").write_text("SCORES v1\n3\na 0.1 2.0 0.3\nb 1.5 0.2 0.1\nc 0.0 0.1 0.2\n")
(tmp / "gt.txt").write_text("CATEGORIES v1\n3\na 1\nb 2\nc 2\n")
run("eval", "--task", "category", "--pred", str(tmp / "pred.txt"), "--gt", str(tmp / "gt.txt"),
    "--topk", "1,2", "--loss")

# mismatched ids are an error with their own exit code
(tmp / "gt2.txt").write_text("CATEGORIES v1\n3\na 1\nz 0\n")
run("eval", "--task", "category", "--pred", str(tmp / "pred.txt"), "--gt", str(tmp / "gt2.txt"), "--topk", "1")

# cropping to a bounding box and rescaling to 224
(tmp / "boxes.txt").write_text("BBOXES v1\n4\nshirt 0 0 32 32\nsock 8 8 24 24\nblank 0 0 1 1\n")
run("transform", "--landmarks", str(tmp / "lm.txt"), "--bboxes", str(tmp / "boxes.txt"), "--size", "224")
