__version__ = "0.1.0"

from .model import ModelSpec, AssumptionChecker, check_assumptions
from .policy import maximize_hamiltonian, policy_independence_check
from .hjb_solver import HJBSolver, ValueGrid, solve_hjb, check_class_V, hjb_residual
from .ode import Path, optimal_path, pure_accumulation_path, euler_shooting, payoff
from .diagnostics import PathDiagnostics, CounterexampleSuite, counterexample_suite, magic_of_capital_demo
from .errors import HJBGrowthError

__all__ = [
    'ModelSpec',
    'AssumptionChecker',
    'check_assumptions',
    'maximize_hamiltonian',
    'policy_independence_check',
    'HJBSolver',
    'ValueGrid',
    'solve_hjb',
    'check_class_V',
    'hjb_residual',
    'Path',
    'optimal_path',
    'pure_accumulation_path',
    'euler_shooting',
    'payoff',
    'PathDiagnostics',
    'CounterexampleSuite',
    'counterexample_suite',
    'magic_of_capital_demo',
    'HJBGrowthError',
]
