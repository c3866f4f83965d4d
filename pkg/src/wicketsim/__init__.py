"""Seedable Monte Carlo engine for cricket match and tournament prediction.

Per-player score priors are gamma distributions fitted from historical
batting averages and highest scores against each opponent. Teams are
selected by stratified random sampling over player roles, matches are
decided by comparing summed simulated scores, and tournaments aggregate
thousands of seeded replicates into standings and championship odds.
"""

__version__ = "0.1.0"

from wicketsim.priors import BetaGrid, FitInput, FitResult, GammaParams, fit_gamma
from wicketsim.roster import Dataset, MatchupRecord, Player, Role, SourceTier, Team, load_dataset
from wicketsim.selection import ConditionsProfile, LineupConstraint, SelectionScheme, sample_xi

__all__ = [
    "BetaGrid",
    "ConditionsProfile",
    "Dataset",
    "FitInput",
    "FitResult",
    "GammaParams",
    "LineupConstraint",
    "MatchupRecord",
    "Player",
    "Role",
    "SelectionScheme",
    "SourceTier",
    "Team",
    "fit_gamma",
    "load_dataset",
    "sample_xi",
    "__version__",
]
