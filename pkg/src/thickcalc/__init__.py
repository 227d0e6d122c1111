"""Graph expansions for classical and quantum thick morphisms."""

from .series import (FormalSeries, GeneratingFunction, PolynomialFunction, Scalar, Truncation,
                     series_exp, series_log)
from .graphs import (BipartiteGraph, OrderedGraph, WhiteWeightedGraph, automorphism_count,
                     butcher_product, canonical_form, enumerate_graphs, enumerate_trees,
                     loop_count, symmetry_factor)
from .terms import (classical_term, composition_term, graph_sign, partition_parity,
                    quantum_term, quantum_weight, transformation_term)
from .calculus import (Expansion, classical_compose, classical_pullback, classical_transform,
                       quantum_compose, quantum_pullback, quantum_transform, super_expansion)
from .oracle import faa_di_bruno_check, general_R, quantum_oracle, solve_fixed_point

__version__ = "0.1.0"
