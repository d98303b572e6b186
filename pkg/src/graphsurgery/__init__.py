"""Laplacian spectra of compact metric graphs, surgery operations and checks of
the eigenvalue inequalities they satisfy."""

from . import errors
from .bounds import BoundReport, interpolation_check, lower_bounds
from .graph import (
    DIRICHLET,
    NATURAL,
    ConditionKind,
    Edge,
    EdgeEnd,
    MetricGraph,
    Vertex,
    VertexCondition,
    create_graph,
    delta,
    disjoint_union,
    insert_dummy_vertex,
    split_edge,
    suppress_degree_two,
    validate,
)
from .io import dump_graph, graph_from_dict, graph_to_dict, load_graph
from .spectrum import EigenPair, Method, SolverConfig, Spectrum, mu, solve_spectrum, spectral_gap
from .surgery import (
    SurgeryResult,
    TransplantTarget,
    add_edge,
    apply_op,
    apply_script,
    attach_pendant,
    cut_along_function,
    cut_explicit,
    glue_vertices,
    insert_graph,
    lengthen_edge,
    shrink_edge,
    symmetrise_parallel,
    transplant,
    unfold_parallel,
    unfold_pendant,
)
from .topology import (
    bridges,
    build_named,
    circumference,
    doubly_connected_part,
    dumbbell_graph,
    girth,
    is_isomorphic,
    loop_graph,
    path_graph,
    pumpkin_chain,
    pumpkin_dumbbell,
    pumpkin_graph,
    pumpkin_on_stick,
    reduce_to_pumpkin_chain,
    star_graph,
    tadpole_graph,
)
from .verify import CheckOutcome, Verdict, run_all, run_suite

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
