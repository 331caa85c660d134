"""Stabilized primal-dual finite elements for unique continuation problems
with a finite-dimensional Neumann trace.

Solves -Delta u = f in the unit square given interior data u = q on a
subdomain omega and the a priori knowledge that the normal derivative on
the boundary lies in a known N-dimensional space (plus a compatibility
constant).  The discrete problem is a symmetric saddle-point system for
the primal field and a Lagrange multiplier, stabilized by a gradient-jump
penalty and a Galerkin least-squares term.
"""

from .mesh import Mesh, SubdomainMarking, build_uniform_mesh, mark_omega
from .fe_space import FeSpace, QuadratureRule, triangle_rule, edge_rule
from .trace_space import TraceSpace, MomentVectors, build_trace_space, compute_moments
from .forms import FormBlocks, ProblemData, assemble_blocks, assemble_rhs
from .solver import SolveResult, solve_two_field, solve_three_field, triple_norm
from .analysis import ConvergenceTable, ErrorReport, convergence_study

__all__ = [
    "Mesh",
    "SubdomainMarking",
    "build_uniform_mesh",
    "mark_omega",
    "FeSpace",
    "QuadratureRule",
    "triangle_rule",
    "edge_rule",
    "TraceSpace",
    "MomentVectors",
    "build_trace_space",
    "compute_moments",
    "FormBlocks",
    "ProblemData",
    "assemble_blocks",
    "assemble_rhs",
    "SolveResult",
    "solve_two_field",
    "solve_three_field",
    "triple_norm",
    "ConvergenceTable",
    "ErrorReport",
    "convergence_study",
]
