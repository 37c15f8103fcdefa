"""Chat-model backend for the three agent roles."""

from .agents import LlmAgents, llm_agents
from .prompts import (
    ACTOR_TEMPLATE,
    EXTRACTOR_TEMPLATE,
    VERIFIER_TEMPLATE,
    PromptTemplate,
    Role,
    build_prompt,
    format_few_shot,
)
from .replies import format_verdict, parse_extractor_reply, parse_verifier_reply
from .scripted import SymbolicChatBackend, guess_task_kind
from .transport import (
    ChatReply,
    ChatRequest,
    HttpTransport,
    LlmSettings,
    RecordingTransport,
    ReplayStore,
    ReplayTransport,
    chat,
)

__all__ = [
    "ACTOR_TEMPLATE",
    "EXTRACTOR_TEMPLATE",
    "VERIFIER_TEMPLATE",
    "ChatReply",
    "ChatRequest",
    "HttpTransport",
    "LlmAgents",
    "LlmSettings",
    "PromptTemplate",
    "RecordingTransport",
    "ReplayStore",
    "ReplayTransport",
    "Role",
    "SymbolicChatBackend",
    "build_prompt",
    "chat",
    "format_few_shot",
    "format_verdict",
    "guess_task_kind",
    "llm_agents",
    "parse_extractor_reply",
    "parse_verifier_reply",
]
