"""
Acceptance gates for incoherenton-lab
Each check builds a small model, measures one property and returns a CheckResult
"""

import math
from typing import Callable, Optional

import numpy as np

from .analytic import lambda_inc
from .bethe import eigenvalue_closed, eigenvalue_sum, j_crit_m, solve_string
from .exceptions import CheckFailedError, IncoherentonError, InvalidArgumentsError
from .lab import IncoherentonLab
from .models import CheckResult, InitialState, ModelParams, SweepSpec
from .pipelines.toydos import log_time_grid
from .spectrum import degeneracy_counts
from .utils.logging import get_logger

logger = get_logger(__name__)

CheckFn = Callable[[], CheckResult]


def _within(measured: float, target: float, rel: float) -> bool:
  return abs(measured - target) <= rel * abs(target)


def check_one_particle_gap() -> CheckResult:
  """Delta_QC at L=20 within 5% of sqrt(1 - 16 J^2) for J in {0.15, 0.20}"""
  worst = 0.0
  for J in (0.15, 0.20):
    with IncoherentonLab(ModelParams(L=20, N=1, J=J, gamma=1.0)) as lab:
      gap = lab.spectrum.qc_gap().gaps[0]
    target = math.sqrt(1.0 - 16.0 * J * J)
    worst = max(worst, abs(gap - target) / target)
  return CheckResult(name="one_particle_gap", passed=worst <= 0.05, measured=worst, detail="max relative deviation from sqrt(1-16J^2)")


def check_gap_closing() -> CheckResult:
  """First closed one-particle gap along J = 0.20 .. 0.30 lies in [0.24, 0.26]"""
  with IncoherentonLab(ModelParams(L=20, N=1, J=0.2, gamma=1.0)) as lab:
    closing = lab.spectrum.first_closing(SweepSpec(parameter="J", start=0.20, stop=0.30, step=0.01))
  passed = closing is not None and 0.24 <= closing <= 0.26
  return CheckResult(name="gap_closing", passed=passed, measured=closing, detail="first J with gap_closed")


def _degeneracy_check(name: str, params: ModelParams, expected: dict[complex, int]) -> CheckResult:
  with IncoherentonLab(params) as lab:
    counts = degeneracy_counts(lab.modes.eigenvalues)
  found = {complex(round(w.real, 6), round(w.imag, 6)): n for w, n in counts}
  passed = found == expected
  detail = ", ".join(f"{w.real:g}{w.imag:+g}i:{n}" for w, n in sorted(found.items(), key=lambda item: (-item[0].real, item[0].imag)))
  return CheckResult(name=name, passed=passed, measured=float(sum(found.values())), detail=detail)


def check_zero_hopping_degeneracies() -> CheckResult:
  """Hard-core L=8, N=3, J=0: counts 56, 840, 1680, 560 at 0, -1, -2, -3"""
  expected = {0j: 56, complex(-1, 0): 840, complex(-2, 0): 1680, complex(-3, 0): 560}
  return _degeneracy_check("zero_hopping_degeneracies", ModelParams(L=8, N=3, J=0.0, gamma=1.0), expected)


def check_bose_hubbard() -> CheckResult:
  """Bose-Hubbard L=5, N=2, U=1, J=0: 15-fold 0, 60-fold -1, and the closed eigenvalue set"""
  params = ModelParams(model="bose-hubbard-dephasing", L=5, N=2, J=0.0, gamma=1.0, U=1.0)
  allowed = np.array([0, -1, -1 + 1j, -1 - 1j, -2, -3 + 1j, -3 - 1j, -4])
  with IncoherentonLab(params) as lab:
    w = lab.modes.eigenvalues
    counts = {complex(round(v.real, 6), round(v.imag, 6)): n for v, n in degeneracy_counts(w)}
  deviation = float(np.max(np.min(np.abs(w[:, None] - allowed[None, :]), axis=1)))
  passed = counts.get(0j) == 15 and counts.get(complex(-1, 0)) == 60 and deviation <= 1e-9
  return CheckResult(name="bose_hubbard", passed=passed, measured=deviation, detail=f"deg(0)={counts.get(0j)}, deg(-1)={counts.get(complex(-1, 0))}")


def check_many_body_gap() -> CheckResult:
  """L=8, N=3: every gap open above 0.1 at J=0.1, all closed at some J in [0.15, 0.25]"""
  with IncoherentonLab(ModelParams(L=8, N=3, J=0.1, gamma=1.0)) as lab:
    open_gaps = lab.spectrum.qc_gap().gaps
    closing = lab.spectrum.first_closing(SweepSpec(parameter="J", start=0.15, stop=0.25, step=0.05))
  passed = min(open_gaps) > 0.1 and closing is not None
  return CheckResult(name="many_body_gap", passed=passed, measured=min(open_gaps), detail=f"all gaps closed at J={closing}")


def _modulation_fit(J: float, k: float, critical: bool = False) -> float:  # noqa: N803
  with IncoherentonLab(ModelParams(L=20, N=1, J=J, gamma=1.0)) as lab:
    state = InitialState(k=k, delta_n=0.5)
    trajectory = lab.dynamics.evolve(state, lab.dynamics.times(tmax=40.0, dt_out=0.05))
    return lab.dynamics.fit(trajectory, k, critical=critical).rate_or_omega


def check_relaxation_rates() -> CheckResult:
  """Gamma(J=0.2, k=pi) = 0.4 and omega(J=0.3, k=pi) = 0.663 within 5%; power law 1 +- 0.15 at J=0.25"""
  rate = _modulation_fit(0.2, math.pi)
  omega = _modulation_fit(0.3, math.pi)
  exponent = _modulation_fit(0.25, math.pi, critical=True)
  passed = _within(rate, 0.4, 0.05) and _within(omega, math.sqrt(0.44), 0.05) and abs(exponent - 1.0) <= 0.15
  return CheckResult(name="relaxation_rates", passed=passed, measured=rate, detail=f"Gamma={rate:.4f}, omega={omega:.4f}, exponent={exponent:.3f}")


def check_relaxation_transition() -> CheckResult:
  """Fit kind flips from decay to oscillation near J = 0.25 (k = pi) and 0.354 (k = pi/2)"""
  flips = []
  for k, start, stop in ((math.pi, 0.20, 0.30), (math.pi / 2, 0.30, 0.40)):
    with IncoherentonLab(ModelParams(L=20, N=1, J=start, gamma=1.0)) as lab:
      points = lab.dynamics.relaxation_sweep(SweepSpec(parameter="J", start=start, stop=stop, step=0.01), InitialState(k=k), tmax=40.0)
    flip = next((p.value for p in points if p.fit.fit_kind == "oscillation"), None)
    flips.append(flip)
  passed = flips[0] is not None and abs(flips[0] - 0.25) <= 0.011 and flips[1] is not None and abs(flips[1] - 0.354) <= 0.011
  return CheckResult(name="relaxation_transition", passed=passed, measured=flips[0], detail=f"flip at k=pi: {flips[0]}, k=pi/2: {flips[1]}")


def check_string_thresholds() -> CheckResult:
  """Order-m strings deconfine at the first grid J above m gamma / 4, for m = 1, 2, 3"""
  worst = 0.0
  passed = True
  with IncoherentonLab(ModelParams(L=4, N=1, J=0.1, gamma=1.0)) as lab:
    for m in (1, 2, 3):
      jc = j_crit_m(m, 1.0)
      grid = [jc * (1.0 + d) for d in (-0.02, -0.01, -0.001, 0.001, 0.01, 0.02)]
      found = lab.bethe.deconfinement(m, grid)
      passed = passed and found is not None and found == grid[3]
      if found is not None:
        worst = max(worst, abs(found - jc) / jc)
  return CheckResult(name="string_thresholds", passed=passed, measured=worst, detail="relative offset of the located threshold from m gamma / 4")


def check_string_eigenvalues(samples: int = 100, seed: int = 0) -> CheckResult:
  """Quasimomentum sum and closed form agree to 1e-10 on random strings; m=1, K=pi matches lambda_inc(pi); kappa = ln 2"""
  rng = np.random.default_rng(seed)
  worst = 0.0
  for _ in range(samples):
    m = int(rng.integers(1, 4))
    p = float(rng.uniform(-math.pi + 0.05, -0.05))
    J = float(rng.uniform(0.05, 0.95) * m / (4.0 * abs(math.sin(p))))
    s = solve_string(m, p, J, 1.0)
    worst = max(worst, abs(eigenvalue_sum(s) - eigenvalue_closed(m, s.K, J, 1.0)))
  s = solve_string(1, -math.pi / 2, 0.2, 1.0)
  at_pi = abs(s.lam - lambda_inc(math.pi, 0.2, 1.0))
  kappa_error = abs(s.kappa - math.log(2.0))
  passed = worst <= 1e-10 and at_pi <= 1e-12 and kappa_error <= 1e-12
  return CheckResult(name="string_eigenvalues", passed=passed, measured=worst, detail=f"|lam - lam_inc(pi)|={at_pi:.2e}, |kappa - ln 2|={kappa_error:.2e}")


def check_eta_pairing() -> CheckResult:
  """L=4 ladder: steady eta states, conserved generators and the (N, N) spectrum match for N = 1, 2"""
  worst_steady = worst_commutator = worst_spectrum = 0.0
  for N in (1, 2):
    with IncoherentonLab(ModelParams(L=4, N=N, J=0.3, gamma=1.0)) as lab:
      report = lab.bethe.ladder_report()
    worst_steady = max(worst_steady, report["steady_residual"])
    worst_commutator = max(worst_commutator, report["max_commutator"])
    worst_spectrum = max(worst_spectrum, report["spectrum_mismatch"])
  passed = worst_steady <= 1e-10 and worst_commutator <= 1e-10 and worst_spectrum <= 1e-8
  detail = f"steady={worst_steady:.2e}, commutators={worst_commutator:.2e}, spectrum={worst_spectrum:.2e}"
  return CheckResult(name="eta_pairing", passed=passed, measured=worst_spectrum, detail=detail)


def _window_mean(times: np.ndarray, values: np.ndarray, start: float, stop: float) -> float:
  mask = (times >= start) & (times <= stop)
  return float(np.mean(values[mask]))


def check_coherence_regimes(ensemble: int = 20, jobs: int = 1) -> CheckResult:
  """Random-pure ensemble at L=8, N=3, J=0.1: plateaus 1 and 2, an incoherenton window and Gamma_1 t ~ 1"""
  with IncoherentonLab(ModelParams(L=8, N=3, J=0.1, gamma=1.0), jobs=jobs) as lab:
    series, _ = lab.dynamics.ensemble(ensemble, seed=0, tmax=50.0, dt_out=0.05)
  t = series.times
  g1 = _window_mean(t, series.gamma1, 0.5, 1.5)
  g2 = _window_mean(t, series.gamma2, 0.5, 1.5)
  intermediate = bool(np.any(series.gamma1[(t > 1.5) & (t < 20.0)] < 0.2))
  late = series.gamma1 * t
  late_ok = bool(np.any((late[(t >= 20.0) & (t <= 50.0)] >= 0.5) & (late[(t >= 20.0) & (t <= 50.0)] <= 1.5)))
  passed = _within(g1, 1.0, 0.1) and _within(g2, 2.0, 0.1) and intermediate and late_ok
  return CheckResult(name="coherence_regimes", passed=passed, measured=g1, detail=f"Gamma1={g1:.3f}, Gamma2={g2:.3f}, window={intermediate}, late={late_ok}")


def check_toy_dos() -> CheckResult:
  """Toy model plateaus 1 and 0.05 at delta=0.1, none at delta=0.4, Gamma_1 t -> 1 at t = 1e4"""
  with IncoherentonLab(ModelParams(L=2, N=1, J=0.0, gamma=1.0)) as lab:
    narrow = lab.toydos.params(eta=1.0, delta=0.1)
    wide = lab.toydos.params(eta=1.0, delta=0.4)
    times = log_time_grid()
    plateaus = lab.toydos.plateaus(narrow, times)
    rows = lab.toydos.rows(wide, times)
    tail = lab.toydos.rows(narrow, np.array([1e4]))[0]
  coherent, incoherent = plateaus["coherent"], plateaus["incoherent"]
  span = [r["gamma1"] for r in rows if coherent is not None and incoherent is not None and coherent[1] <= r["t"] <= incoherent[0]]
  monotone = len(span) > 1 and bool(np.all(np.diff(span) < 0))
  product = tail["gamma1"] * tail["t"]
  passed = coherent is not None and incoherent is not None and monotone and _within(product, 1.0, 0.02)
  return CheckResult(name="toy_dos", passed=passed, measured=product, detail=f"coherent={coherent}, incoherent={incoherent}, monotone at delta=0.4: {monotone}")


def check_spectral_invariants() -> CheckResult:
  """General invariants of the dense Liouvillian on a small many-body model"""
  with IncoherentonLab(ModelParams(L=5, N=2, J=0.3, gamma=1.0)) as lab:
    report = lab.spectrum.invariants()
  return CheckResult(name="spectral_invariants", passed=report.passed, measured=report.max_real_part, detail=f"conjugation={report.conjugation_violation:.2e}")


def check_dual_evolution() -> CheckResult:
  """Integration and eigenmode expansion agree to 1e-6"""
  with IncoherentonLab(ModelParams(L=5, N=2, J=0.3, gamma=1.0)) as lab:
    state = InitialState(kind="random-pure", seed=3)
    times = lab.dynamics.times(tmax=5.0, dt_out=0.25)
    integrated = lab.dynamics.evolve(state, times, method="integrate")
    expanded = lab.dynamics.evolve(state, times, method="expansion")
  deviation = float(np.max(np.abs(integrated.states - expanded.states)))
  return CheckResult(name="dual_evolution", passed=deviation <= 1e-6, measured=deviation, detail="max |rho_integrate - rho_expansion|")


def check_momentum_blocks() -> CheckResult:
  """Union of momentum-block spectra equals the full L=12 one-particle spectrum to 1e-8"""
  with IncoherentonLab(ModelParams(L=12, N=1, J=0.3, gamma=1.0)) as lab:
    mismatch = lab.single_particle.block_mismatch()
  return CheckResult(name="momentum_blocks", passed=mismatch <= 1e-8, measured=mismatch, detail="max matched eigenvalue deviation")


# name -> (check, slow)
CHECKS: dict[str, tuple[CheckFn, bool]] = {
  "one_particle_gap": (check_one_particle_gap, False),
  "gap_closing": (check_gap_closing, False),
  "bose_hubbard": (check_bose_hubbard, False),
  "relaxation_rates": (check_relaxation_rates, False),
  "string_thresholds": (check_string_thresholds, False),
  "string_eigenvalues": (check_string_eigenvalues, False),
  "eta_pairing": (check_eta_pairing, False),
  "toy_dos": (check_toy_dos, False),
  "spectral_invariants": (check_spectral_invariants, False),
  "dual_evolution": (check_dual_evolution, False),
  "momentum_blocks": (check_momentum_blocks, False),
  "zero_hopping_degeneracies": (check_zero_hopping_degeneracies, True),
  "many_body_gap": (check_many_body_gap, True),
  "relaxation_transition": (check_relaxation_transition, True),
  "coherence_regimes": (check_coherence_regimes, True),
}


def run_checks(include_slow: bool = False, only: Optional[list[str]] = None) -> list[CheckResult]:
  """
  Run acceptance gates

  Args:
      include_slow: Also run the heavy gates
      only: Restrict to these check names

  Returns:
      One CheckResult per gate; a gate that raises is reported as failed

  Raises:
      InvalidArgumentsError: If only names an unknown check
  """
  unknown = sorted(set(only or []) - set(CHECKS))
  if unknown:
    raise InvalidArgumentsError(f"Unknown check(s): {', '.join(unknown)}")
  results = []
  for name, (check, slow) in CHECKS.items():
    if only is not None and name not in only:
      continue
    if slow and not include_slow and only is None:
      continue
    logger.info("Running check %s", name)
    try:
      result = check()
    except IncoherentonError as e:
      result = CheckResult(name=name, passed=False, detail=f"{type(e).__name__}: {e}")
    results.append(result.model_copy(update={"slow": slow}))
  return results


def require_passed(results: list[CheckResult]) -> None:
  """
  Raise when any gate failed

  Raises:
      CheckFailedError: Naming every failed gate
  """
  failed = [r.name for r in results if not r.passed]
  if failed:
    raise CheckFailedError(f"{len(failed)} check(s) failed: {', '.join(failed)}")
