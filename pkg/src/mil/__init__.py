"""Exact invariant theory of finite linear groups over finite fields."""

__version__ = "0.1.0"

from .field import GF, Embedding, FieldElement, make_field, field_of_order  # noqa: E402
from .linalg import Matrix, Subspace, fixed_space  # noqa: E402
from .poly import Character, Polynomial, act, format_polynomial, parse_polynomial  # noqa: E402
from .groups import (  # noqa: E402
    MatrixGroup,
    closure,
    point_stabilizer,
    reflection_census,
    reflection_subgroup,
    transvection_subgroup,
)
from .invariants import (  # noqa: E402
    Budget,
    hilbert_function,
    invariant_space,
    transfer,
    twisted_transfer,
)
from .different import different, different_factorization  # noqa: E402
from .decide import (  # noqa: E402
    coregularity_decide,
    dsp_abelian_criterion,
    dsp_decide,
    dsp_pgroup_criterion,
    inheritance_suite,
    serre_check,
)
