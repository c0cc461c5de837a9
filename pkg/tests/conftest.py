"""Shared fixtures: small hand-checked configurations and a CLI runner."""
from __future__ import annotations

import json
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from k3verify.kernel.config import PointConfig

F = Fraction


@pytest.fixture
def two_point_cfg():
    """n = 2 configuration with A_01 = 6, det A = -36, K3 = 1/36."""
    return PointConfig((F(0), F(1)), (F(0), F(2)), (F(0), F(3)), (F(0), F(1)))


@pytest.fixture
def three_point_cfg():
    return PointConfig(tuple(map(F, (0, 1, 2))), tuple(map(F, (0, 1, 3))),
                       tuple(map(F, (0, 2, 5))), tuple(map(F, (0, 1, 4))))


@pytest.fixture
def write_json(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path
    return _write


@pytest.fixture
def run_cli():
    """Run ``python -m k3verify`` in a subprocess; returns the CompletedProcess."""
    def _run(*args, env=None, timeout=600):
        full_env = dict(os.environ)
        full_env.update(env or {})
        return subprocess.run([sys.executable, "-m", "k3verify", *map(str, args)],
                              capture_output=True, text=True, env=full_env, timeout=timeout)
    return _run


# -- acceptance summary -------------------------------------------------------

@pytest.fixture
def acceptance(request):
    """Record (and print) one PASS/FAIL/INCONCLUSIVE line per acceptance criterion."""
    lines = request.config.__dict__.setdefault("_k3_acceptance", [])

    def _record(number, title, status, detail=""):
        line = f"[{number}] {status:<12} {title}" + (f" -- {detail}" if detail else "")
        lines.append(line)
        print(line)
        return line
    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_k3_acceptance")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s[1:s.index("]")])):
            terminalreporter.write_line(line)
