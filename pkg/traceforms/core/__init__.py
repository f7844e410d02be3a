"""Core components: models, taxonomy, errors and the experiment runner."""

from traceforms.core.errors import TraceFormError
from traceforms.core.models import (
    Certification,
    ExperimentOutput,
    ExperimentReport,
    Verdict,
)
from traceforms.core.taxonomy import CertificationCheck

__all__ = [
    "Certification",
    "CertificationCheck",
    "ExperimentOutput",
    "ExperimentReport",
    "TraceFormError",
    "Verdict",
]
