import pytest

from levytail.simulate import SimulationConfig, convergence_experiment

EXPERIMENT_SEED = 1
ALPHA0_VALUES = (1.4, 1.8, 3.0)


@pytest.fixture(scope="session")
def convergence_reports():
    """Full 100-replication experiment for each exponent, run once per session."""
    return {a0: convergence_experiment(SimulationConfig(alpha0=a0, seed=EXPERIMENT_SEED)) for a0 in ALPHA0_VALUES}
