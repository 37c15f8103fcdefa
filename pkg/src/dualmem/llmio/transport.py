"""Chat-completion transport: live HTTP, record, and replay.

Replay keys are a SHA-256 over (model, temperature, messages), so a recorded
store reproduces a whole evaluation without network access.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Protocol

from ..errors import ReplayMissError, TransientTransportError, TransportError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChatRequest:
    model: str
    temperature: float
    messages: tuple[tuple[str, str], ...]
    max_tokens: int = 2048
    timeout: float = 60.0

    def __post_init__(self):
        object.__setattr__(self, "messages", tuple((r, c) for r, c in self.messages))

    @classmethod
    def single(cls, model: str, temperature: float, prompt: str, **kw) -> ChatRequest:
        return cls(model, temperature, (("user", prompt),), **kw)

    @property
    def key(self) -> str:
        payload = json.dumps(
            {"model": self.model, "temperature": round(float(self.temperature), 6), "messages": [list(m) for m in self.messages]},
            sort_keys=True,
            ensure_ascii=False,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ChatReply:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0
    latency: float = 0.0


class Transport(Protocol):
    def send(self, request: ChatRequest) -> ChatReply: ...


@dataclass(frozen=True)
class LlmSettings:
    endpoint: str = ""
    api_key: str = ""
    model: str = "gpt-4.1-mini"
    timeout: float = 60.0
    retries: int = 3

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> LlmSettings:
        env = os.environ if env is None else env
        return cls(
            endpoint=env.get("DUALMEM_LLM_ENDPOINT", ""),
            api_key=env.get("DUALMEM_LLM_API_KEY", ""),
            model=env.get("DUALMEM_LLM_MODEL", cls.model),
            timeout=float(env.get("DUALMEM_LLM_TIMEOUT", cls.timeout)),
            retries=int(env.get("DUALMEM_LLM_RETRIES", cls.retries)),
        )


class HttpTransport:
    """POSTs OpenAI-style ``/chat/completions`` requests."""

    def __init__(self, endpoint: str, api_key: str = "", client=None):
        import httpx

        self.endpoint = endpoint.rstrip("/")
        self.api_key = api_key
        self._client = client or httpx.Client()
        self._httpx = httpx

    def send(self, request: ChatRequest) -> ChatReply:
        url = self.endpoint if self.endpoint.endswith("/chat/completions") else self.endpoint + "/chat/completions"
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        body = {
            "model": request.model,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
            "messages": [{"role": r, "content": c} for r, c in request.messages],
        }
        started = time.monotonic()
        try:
            resp = self._client.post(url, json=body, headers=headers, timeout=request.timeout)
        except (self._httpx.TimeoutException, self._httpx.TransportError) as exc:
            raise TransientTransportError(f"request failed: {exc}") from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientTransportError(f"HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        data = resp.json()
        usage = data.get("usage") or {}
        return ChatReply(
            text=data["choices"][0]["message"]["content"] or "",
            prompt_tokens=int(usage.get("prompt_tokens", 0)),
            completion_tokens=int(usage.get("completion_tokens", 0)),
            latency=time.monotonic() - started,
        )


class ReplayStore:
    """Directory of ``<key>.json`` files holding request and reply side by side."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.Lock()

    def path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, request: ChatRequest) -> ChatReply | None:
        p = self.path(request.key)
        if not p.exists():
            return None
        data = json.loads(p.read_text(encoding="utf-8"))
        return ChatReply(**data["reply"])

    def put(self, request: ChatRequest, reply: ChatReply) -> None:
        record = {
            "request": {
                "model": request.model,
                "temperature": request.temperature,
                "messages": [{"role": r, "content": c} for r, c in request.messages],
            },
            "reply": asdict(reply),
        }
        with self._lock:
            self.root.mkdir(parents=True, exist_ok=True)
            tmp = self.path(request.key).with_suffix(".tmp")
            tmp.write_text(json.dumps(record, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
            os.replace(tmp, self.path(request.key))

    def __len__(self) -> int:
        return len(list(self.root.glob("*.json"))) if self.root.exists() else 0


class ReplayTransport:
    def __init__(self, store: ReplayStore):
        self.store = store

    def send(self, request: ChatRequest) -> ChatReply:
        reply = self.store.get(request)
        if reply is None:
            raise ReplayMissError(request.key)
        return reply


class RecordingTransport:
    def __init__(self, inner: Transport, store: ReplayStore):
        self.inner = inner
        self.store = store

    def send(self, request: ChatRequest) -> ChatReply:
        reply = self.inner.send(request)
        # latency is not reproducible, so it is not recorded
        reply = ChatReply(reply.text, reply.prompt_tokens, reply.completion_tokens, 0.0)
        self.store.put(request, reply)
        return reply


def chat(
    request: ChatRequest,
    transport: Transport,
    retries: int = 3,
    backoff: float = 0.5,
    sleep: Callable[[float], None] = time.sleep,
) -> ChatReply:
    """Send ``request``, retrying transient failures up to ``retries`` times.

    Waits ``backoff * 2**attempt`` seconds between attempts. Raises
    TransportError once retries are exhausted; replay misses are not retried.
    """
    attempt = 0
    while True:
        try:
            return transport.send(request)
        except TransientTransportError as exc:
            if attempt >= retries:
                raise TransportError(f"giving up after {attempt + 1} attempts: {exc}") from exc
            delay = backoff * (2**attempt)
            log.info("transient failure (%s); retry %d/%d in %.2fs", exc, attempt + 1, retries, delay)
            sleep(delay)
            attempt += 1
