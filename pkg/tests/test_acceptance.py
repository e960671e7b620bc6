"""One test per acceptance criterion; each prints a single PASS/FAIL line."""
import pytest

from edgemp.verify import SUITES

CRITERIA = sorted(SUITES.items(), key=lambda kv: kv[1][0])


@pytest.mark.parametrize("name", [n for n, _ in CRITERIA], ids=[f"criterion_{c}_{n}" for n, (c, _) in CRITERIA])
def test_criterion(name, capsys):
    result = SUITES[name][1]()
    with capsys.disabled():
        print("\n" + result.summary())
    failed = [f"{c.name}: {c.detail}" for c in result.checks if not c.passed]
    assert result.passed, "; ".join(failed)
