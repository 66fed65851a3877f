"""Run the demo pipeline and print a transcript of every command and its output.

    python3 demo/run_demo.py                 # print transcript
    python3 demo/run_demo.py --check         # compare with expected_output.txt
    python3 demo/run_demo.py --update        # rewrite expected_output.txt
"""

from __future__ import annotations

import argparse
import contextlib
import io
import sys
import tempfile
from pathlib import Path

from adscite.cli import main

HERE = Path(__file__).resolve().parent
EXPECTED = HERE / "expected_output.txt"
DATE = "2006-09-30"

STEPS = [
    ["ingest-records", "{demo}/records.txt", "--date", DATE],
    ["ingest-refs", "{demo}/references.txt"],
    ["match-eprints"],
    ["resolve", "--date", DATE],
    ["build-index", "--as-of", DATE],
    ["query", "cites", "1999ASPC..172..291A"],
    ["query", "cites", "2006ApJ...640..233N"],
    ["query", "refs", "2006ApJ...640..233N"],
    ["query", "cites", "2005IPM....41.1395K", "--refereed"],
    ["metrics", "rank", "--author", "Kurtz, M."],
    ["metrics", "hindex", "--author", "Kurtz, M."],
    ["metrics", "useful", "2005A&A...440....1L", "2006ApJ...640..233N", "--top", "5"],
    ["metrics", "instructive", "1999ASPC..172..291A", "2002SPIE.4847..238K", "2005IPM....41.1395K", "--top", "5"],
    ["report", "sources", "--figure", "{out}/sources.png"],
    ["report", "unresolved", "--figure", "{out}/unresolved.png"],
    ["alerts", "register", "{demo}/queries.txt"],
    ["alerts", "run", "--date", DATE],
    ["alerts", "run", "--date", DATE],
    ["export", "xml", "virtual", "observatory"],
]


def transcript(out_dir: Path) -> str:
    """Run every step in a fresh workspace under ``out_dir``; return the transcript."""
    ws = out_dir / "workspace"
    lines = []
    for step in STEPS:
        argv = [a.format(demo=HERE, out=out_dir) for a in step]
        shown = [a.format(demo="demo", out="out") for a in step]
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
            status = main(["-w", str(ws), *argv])
        lines.append("$ adscite " + " ".join(_quote(a) for a in shown) + "\n")
        lines.append(buf.getvalue())
        if status:
            lines.append(f"[exit {status}]\n")
    return "".join(lines)


def _quote(arg: str) -> str:
    return f'"{arg}"' if " " in arg or "&" in arg else arg


def run(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--check", action="store_true")
    group.add_argument("--update", action="store_true")
    parser.add_argument("--out", help="keep workspace and figures here")
    args = parser.parse_args(argv)
    with tempfile.TemporaryDirectory() as tmp:
        text = transcript(Path(args.out or tmp))
    if args.update:
        EXPECTED.write_text(text, "utf-8")
    elif args.check:
        if text != EXPECTED.read_text("utf-8"):
            print("demo output differs from expected_output.txt", file=sys.stderr)
            return 1
        print("demo output matches")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(run())
