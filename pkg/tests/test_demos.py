import runpy
from pathlib import Path

import pytest

from distgen.cli import main

DEMOS = Path(__file__).resolve().parent.parent / "demos"


@pytest.mark.parametrize("path", sorted(DEMOS.glob("*.py")), ids=lambda p: p.name)
def test_demo_runs(path, capsys):
    runpy.run_path(str(path), run_name="__main__")
    assert capsys.readouterr().out


@pytest.mark.parametrize("name,code", [
    ("beta1_g.json", 0), ("kumaraswamy_g_gamma.json", 0), ("fails_d7.json", 2), ("t7.json", 0),
    ("disjoint_mixture.json", 0),
])
def test_shipped_spec_files(name, code, capsys):
    assert main(["validate", str(DEMOS / "specs" / name)]) == code
