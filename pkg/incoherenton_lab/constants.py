"""
Constants for incoherenton-lab
Tolerances, exit codes, model aliases and output schemas
"""

# Dense diagonalization cap on D^2 (overridable via INCOH_DENSE_LIMIT)
DEFAULT_DENSE_LIMIT = 20000
DENSE_LIMIT_ENV = "INCOH_DENSE_LIMIT"

# Numerical tolerances
TRACE_TOL = 1e-12
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-8
STEADY_TOL = 1e-9
POSITIVE_REAL_TOL = 1e-9
CONJUGATION_TOL = 1e-8
DEGENERACY_TOL = 1e-9
RESIDUAL_REL_TOL = 1e-8
EXISTS_TOL = 1e-9
CONDITION_LIMIT = 1e10
NEWTON_TOL = 1e-12
NEWTON_MAXITER = 200
STRING_TOL = 1e-10
GROUP_EDGE_MARGIN = 0.05
INCOHERENT_RATIO = 0.1

# Dynamics defaults
DEFAULT_DELTA_N = 0.5
DEFAULT_TMAX_GAMMA = 40.0
DEFAULT_DT_GAMMA = 0.05
DEFAULT_ENSEMBLE = 100
DEFAULT_CHI_TILDE_C = 1.0
DT_STABILITY = 0.1
MAX_SWEEP_POINTS = 10000

# Process exit codes
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CHECK = 4

# Superoperator binary dump
LSOP_MAGIC = b"LSOP"
LSOP_VERSION = 1
LSOP_ORDERING_KET_MAJOR = 0

# Model aliases accepted on the command line
MODEL_ALIASES = {
  "hardcore": "hardcore-dephasing",
  "hardcore-dephasing": "hardcore-dephasing",
  "hard-core": "hardcore-dephasing",
  "bose-hubbard": "bose-hubbard-dephasing",
  "bose-hubbard-dephasing": "bose-hubbard-dephasing",
  "bh": "bose-hubbard-dephasing",
}

MODE_CLASSES = ("incoherent", "intermediate", "coherent")

# CSV schemas: column name -> cell type
CSV_SCHEMAS: dict[str, dict[str, str]] = {
  "spectrum": {
    "re_lambda": "float",
    "im_lambda": "float",
    "n_b": "float",
    "s_diag": "float",
    "s_off": "float",
    "group": "int",
    "class": "str",
    "residual": "float",
  },
  "single_particle": {
    "k": "float",
    "re_lambda": "float",
    "im_lambda": "float",
    "re_alpha": "float",
    "im_alpha": "float",
    "xi_con": "float",
    "exists": "bool",
    "qc_gap": "float",
  },
  "dynamics": {
    "t": "float",
    "re_n_k": "float",
    "im_n_k": "float",
    "chi1": "float",
    "chi2": "float",
    "chi1_tilde": "float",
    "gamma1": "float",
    "gamma2": "float",
    "trace_err": "float",
    "min_eig": "float",
  },
  "strings": {
    "m": "int",
    "p": "float",
    "kappa": "float",
    "mu": "float",
    "K": "float",
    "re_lambda": "float",
    "im_lambda": "float",
    "exists": "bool",
  },
  "toydos": {
    "t": "float",
    "chi1": "float",
    "gamma1": "float",
  },
  "qc_sweep": {
    "param": "float",
    "n": "int",
    "gap": "float",
    "gap_real": "float",
    "closed": "bool",
  },
}


def get_model_name(alias: str) -> str:
  """
  Resolve a model alias to its canonical name

  Args:
      alias: Name as typed by the user

  Returns:
      Canonical model name, or the input unchanged when unknown
  """
  return MODEL_ALIASES.get(alias.strip().lower(), alias)


def get_csv_schema(name: str) -> dict[str, str]:
  """Get the column schema of a named CSV product"""
  try:
    return CSV_SCHEMAS[name]
  except KeyError:
    raise KeyError(f"Unknown CSV schema: {name}") from None


def strings_schema(residual_L: list[int]) -> dict[str, str]:  # noqa: N803
  """Strings schema with one residual_L<L> column per requested ring length"""
  return {**CSV_SCHEMAS["strings"], **{f"residual_L{L}": "float" for L in residual_L}}
