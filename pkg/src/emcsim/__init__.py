"""Embedded Model Control simulation for a networked DC-motor speed loop."""

from .baseline_pi import PiParams, PiState, pi_step
from .config import load_config, parse_config, preset_path
from .emc import DEFAULT_SPEC, ContinuousEigenSpec, EmcOptions, EmcState, emc_step, schedule_gains
from .harness import EmcConfig, PiConfig, Scenario, compute_metrics, run_scenario, write_csv
from .netmodel import TimingSpec, generate_trace
from .plant import DisturbanceProfile, PlantParams, PlantState, tf_coefficients
from .stability import sweep

__version__ = "0.1.0"
