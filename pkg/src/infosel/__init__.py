"""Robust information-source selection for hypothesis testing under source deletions."""

from .instance import (Budgets, InstanceError, ProblemInstance, bits_of, load, make_instance,
                       mask_of, random_equivalence_structure, random_instance,
                       random_penalty_matrix, save, validate)
from .objectives import (MAXPEN, TOTALPEN, Objective, equiv_set, f_value, gamma_obj_value,
                         lambda_value, rho_value)
from .attack import AttackResult, InfeasibleError, optimal_robust_selection, worst_case_attack
from .algorithms import (SelectionOutcome, oblivious_select, robust_greedy_mrmpis,
                         robust_greedy_rmpis, vanilla_greedy)
from .bounds import h_func, theorem2_factor, theorem3_factor

__version__ = "0.1.0"
