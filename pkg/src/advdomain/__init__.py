"""Standard and adversarial complexity, discrepancy and transfer tools for linear models."""
from .adversary import (AdversaryBudget, InnerSolution, grid_oracle, max_dot_over_box, max_shifted_square,
                        min_bilinear_over_box, min_dot_over_box, min_shifted_square)
from .discrepancy import (BoundReport, DomainPair, assemble_adversarial_bound, assemble_corollary_bound,
                          assemble_standard_bound, estimate_adv_disc_from_std, hdh_discrepancy_bruteforce,
                          hdh_discrepancy_regression)
from .errors import NumericalError, ValidationError
from .linalg import DesignMatrix, NormOrder, dual_exponent, group_norm, p_norm, spectral_norm_symmetric
from .rademacher import HypothesisClass, LossSpec, RademacherEstimate
from .training import LinearModel, SyntheticDomainSpec, TrainConfig
from .transfer import DiscreteDomainPair, SubsetSumInstance, vstar_bruteforce, vstar_meet_in_middle

__version__ = "0.1.0"
