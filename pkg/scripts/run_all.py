"""Run every example config through the command line entry point.

Usage: python scripts/run_all.py [--svg]
"""
import sys
from pathlib import Path

import yaml

from tripler.cli import main

HERE = Path(__file__).parent


def run(svg: bool) -> int:
    status = 0
    for cfg in sorted((HERE / "configs").glob("*.yaml")):
        mode = yaml.safe_load(cfg.read_text())["mode"]
        argv = [mode, "--config", str(cfg)] + (["--svg"] if svg else [])
        code = main(argv)
        print(f"{cfg.name}: exit {code}")
        status = status or code
    return status


if __name__ == "__main__":
    sys.exit(run("--svg" in sys.argv[1:]))
