"""
Tests for the acceptance gates
"""

import pytest

from incoherenton_lab import checks
from incoherenton_lab.checks import CHECKS, require_passed, run_checks
from incoherenton_lab.exceptions import CheckFailedError, FitError, InvalidArgumentsError
from incoherenton_lab.models import CheckResult

FAST = [name for name, (_, slow) in CHECKS.items() if not slow]
SLOW = [name for name, (_, slow) in CHECKS.items() if slow]


def test_registry_split():
  """Test the registry holds both fast and slow gates"""
  assert "toy_dos" in FAST
  assert "eta_pairing" in FAST
  assert "coherence_regimes" in SLOW
  assert len(FAST) + len(SLOW) == len(CHECKS)


@pytest.mark.integration
@pytest.mark.parametrize("name", FAST)
def test_fast_check_passes(name):
  """Test each fast acceptance gate"""
  check, _ = CHECKS[name]
  result = check()
  assert result.name == name
  assert result.passed, result.detail


@pytest.mark.slow
@pytest.mark.parametrize("name", SLOW)
def test_slow_check_passes(name):
  """Test each heavy acceptance gate"""
  check, _ = CHECKS[name]
  result = check()
  assert result.passed, result.detail


def test_run_checks_only():
  """Test that only= restricts the run and marks slowness"""
  results = run_checks(only=["toy_dos"])
  assert [r.name for r in results] == ["toy_dos"]
  assert results[0].slow is False


def test_run_checks_skips_slow_by_default(monkeypatch):
  """Test that slow gates are skipped unless requested"""
  calls = []

  def fake(name):
    def run():
      calls.append(name)
      return CheckResult(name=name, passed=True)

    return run

  monkeypatch.setattr(checks, "CHECKS", {"quick": (fake("quick"), False), "heavy": (fake("heavy"), True)})
  assert [r.name for r in run_checks()] == ["quick"]
  assert [r.name for r in run_checks(include_slow=True)] == ["quick", "heavy"]
  assert run_checks(include_slow=True)[1].slow is True
  assert [r.name for r in run_checks(only=["heavy"])] == ["heavy"]


def test_run_checks_reports_errors_as_failures(monkeypatch):
  """Test that a gate raising a library error is reported, not propagated"""

  def broken():
    raise FitError("window too short")

  monkeypatch.setattr(checks, "CHECKS", {"broken": (broken, False)})
  results = run_checks()
  assert len(results) == 1
  assert not results[0].passed
  assert "FitError" in results[0].detail


def test_run_checks_unknown_name():
  """Test that an unknown check name is rejected before anything runs"""
  with pytest.raises(InvalidArgumentsError, match="no_such_check"):
    run_checks(only=["toy_dos", "no_such_check"])


def test_require_passed():
  """Test that failed gates raise CheckFailedError with exit code 4"""
  require_passed([CheckResult(name="toy_dos", passed=True)])
  with pytest.raises(CheckFailedError, match="1 check\\(s\\) failed: eta_pairing") as info:
    require_passed([CheckResult(name="toy_dos", passed=True), CheckResult(name="eta_pairing", passed=False)])
  assert info.value.exit_code == 4
