"""Symbolic expression kernel: trees, calculus, evaluation, zero testing, syntax."""

from .core import (
    COMPLEX, COMPLEX_BASE, I, ONE, REAL, REAL_BASE, ZERO, Add, Atan2, Const,
    ContextError, Expr, ExprError, Fn, Mul, Named, Pow, Var, VarContext, add,
    additive_terms, as_expr, atan, atan2, context_of, cos, cosh, exp, fn, log,
    mul, neg, node_count, power, sin, sinh, sqrt,
)
from .calculus import (
    MissingRhsError, diff, is_polynomial, rational_value, substitute,
    substitute_named, total_derivative,
)
from .evaluate import SingularityError, evaluate, evaluate_batch, evaluate_many
from .syntax import E, ParseError, parse, to_str
from .zerotest import (
    DEFAULT_DOMAIN, DEFAULT_SEED, DEFAULT_TOL, DEFAULT_TRIALS, DomainTooTightError,
    SampleDomain, ZeroResult, choose_mode, guarded_points, is_zero,
    zero_test_settings,
)
from .codegen import compile_exprs
