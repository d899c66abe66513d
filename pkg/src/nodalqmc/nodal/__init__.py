"""Node functions, sign queries, crossings and cross-sections."""

from .crossings import (
    CoincidenceReport,
    CrossingRecord,
    PositivityReport,
    as_node,
    bisect_crossing,
    crossing_coincidence,
    factorization_positivity,
    node_sign,
)
from .functions import (
    ConjecturedBeNode,
    ExactTripletNode,
    LiRHFNode,
    NodeFunction,
    ProductNode,
    WaveFunctionSign,
    make_node,
)
from .scan import CrossSection, CrossSectionSpec, random_spec, scan_cross_section
