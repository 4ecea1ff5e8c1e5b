"""Python bindings for the sheafcheck claim-consistency engine."""

from pathlib import Path

from ._sheafcheck import (
    CnfFormula,
    EnvironmentError,
    InputError,
    TransportError,
    analyze_corpus,
    betti,
    conjoin,
    count_models,
    detect_bimodality,
    distribution,
    enumerate_models,
    extract_rating,
    from_prop,
    global_sections,
    initialization_prompt,
    max_sat,
    maximal_simplices,
    parse_dimacs,
    rate_pair_mock,
    relative_consistency,
    satisfiable,
    upset_sections,
    user_message,
)
from ._sheafcheck import SOURCE_DATA_DIR as _SOURCE_DATA_DIR

# Installed wheels carry the data next to the package; in-tree builds use the
# source checkout.
_packaged = Path(__file__).resolve().parent / "data"
DATA_DIR = _packaged if _packaged.is_dir() else Path(_SOURCE_DATA_DIR)
MOCK_REPLIES = DATA_DIR / "mock_replies"
CORPORA = DATA_DIR / "corpora"

__version__ = "0.1.0"
