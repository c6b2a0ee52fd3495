"""Hot-started QUBO construction for discrete mean-variance portfolios."""

from hotqubo.numerics import (
    CholeskyFactor,
    DimensionMismatch,
    NotPositiveDefinite,
    cholesky,
    inverse_diagonal,
    quad_form,
    solve,
)
from hotqubo.market import AssetUniverse, Calibration, load_universe
from hotqubo.model import QuadraticModel, build_basic, build_with_transaction_costs
from hotqubo.hotstart import HotStartBox, compute_box, qubit_counts
from hotqubo.encode import Encoding, baseline_encoding, bounded_encoding, decode, encode_value
from hotqubo.qubo import QuboInstance, build_qubo, energy, export, import_qubo
from hotqubo.solve import (
    AnnealSchedule,
    SolveResult,
    brute_force,
    random_search,
    simulated_annealing,
)

__version__ = "0.1.0"
