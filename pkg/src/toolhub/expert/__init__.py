from .http import ExpertServerHandle, serve_expert_http
from .service import (
    Conflict,
    Expired,
    ExpertQueue,
    ExpertRequest,
    ExpertResponse,
    UnknownRequest,
    VERDICTS,
)
from .tools import (
    ConsultHumanExpert,
    ExpertClient,
    GetExpertResponse,
    GetExpertStatus,
)

__all__ = [
    "Conflict",
    "ConsultHumanExpert",
    "Expired",
    "ExpertClient",
    "ExpertQueue",
    "ExpertRequest",
    "ExpertResponse",
    "ExpertServerHandle",
    "GetExpertResponse",
    "GetExpertStatus",
    "UnknownRequest",
    "VERDICTS",
    "serve_expert_http",
]
