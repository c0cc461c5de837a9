import json
import math
from fractions import Fraction as F

import numpy as np
import pytest

from k3verify.parallel import default_workers, run_indexed
from k3verify.report import Report, Status, combine, jsonable


def square(i, offset=0):
    return i * i + offset


def test_status_combination_and_exit_codes():
    assert combine(["pass", "pass"]) is Status.PASS
    assert combine(["pass", "inconclusive"]) is Status.INCONCLUSIVE
    assert combine(["inconclusive", "fail", "pass"]) is Status.FAIL
    assert [s.exit_code for s in Status] == [0, 1, 2]


def test_jsonable_conversions():
    data = jsonable({"q": F(1, 36), "z": 1 + 2j, "a": np.arange(3), "inf": math.inf,
                     "s": Status.FAIL, 3: (1.5, None)})
    assert data == {"q": "1/36", "z": {"re": 1.0, "im": 2.0}, "a": [0, 1, 2], "inf": "inf",
                    "s": "fail", "3": [1.5, None]}
    json.dumps(data)


def test_report_serialization_and_summary():
    rep = Report("demo", seed=3, trials=4, rejected=1)
    rep.add_check("a", Status.PASS, value=F(1, 2))
    rep.add_check("b", "inconclusive")
    rep.max_deviation = 1e-3
    rep.finalize()
    assert rep.status is Status.INCONCLUSIVE and rep.exit_code == 2 and not rep.passed
    d = json.loads(rep.to_json())
    assert d["checks"][0] == {"name": "a", "status": "pass", "value": "1/2"}
    assert "timestamp" in d and "timestamp" not in rep.to_dict(with_timestamp=False)
    assert rep.summary() == "demo: INCONCLUSIVE (4 trials, 1 singular draws rejected) max deviation 1.000e-03"


def test_parallel_matches_serial():
    serial = run_indexed(square, range(10), 1, offset=2)
    assert serial == [i * i + 2 for i in range(10)]
    assert run_indexed(square, range(10), 3, offset=2) == serial


def test_default_workers_env(monkeypatch):
    monkeypatch.setenv("K3VERIFY_THREADS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("K3VERIFY_THREADS", "junk")
    assert default_workers() >= 1
