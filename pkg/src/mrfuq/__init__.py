"""Information-theoretic uncertainty bounds for discrete Markov random fields."""

__version__ = "0.1.0"

from .engine import (
    BoundReport,
    QoILinearForm,
    cgf,
    kl_divergence,
    kl_linear_form,
    tightness_lambda,
    tilt,
    uq_bound_eta,
    uq_bound_linear,
    uq_bound_model,
)
from .errors import (
    CapacityError,
    InputError,
    ModelFormatError,
    MrfuqError,
    PreconditionError,
    RangeError,
    UnsupportedPerturbationError,
)
from .graphs import UndirectedGraph, induced_subgraph, maximal_cliques, separates
from .models import (
    Factor,
    LogLinearModel,
    ReducedModel,
    clique_class_partition,
    expectation,
    indicator_of_assignment,
    log_partition,
    probability,
    reduce,
)
from .perturbations import (
    ExcessFactor,
    PerturbationReport,
    PType,
    classify,
    excess_factor,
    likelihood_ratio,
    partition_ratio,
)
