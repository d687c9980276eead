from .discrete import (ENUMERATION_BUDGET, EnumerationBudgetError, all_counts,
                       discrete_four_square_oracle, discrete_four_square_prob,
                       log_discrete_four_square_prob, overlap_table,
                       round_counts)
from .variational import (ConvergenceError, DiagonalParam, FourSplit,
                          closed_form_R, density_rho, discretize_density,
                          induced_split, interval_bounds, mixed_partial_r, phi,
                          phi_dt, phi_dtt, phi_tilde, solve_critical_t,
                          two_square_bound_rhs)
