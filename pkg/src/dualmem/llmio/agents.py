"""Agent callables backed by a chat transport."""

from __future__ import annotations

import logging

from ..domain import ConstraintSet, Plan, TaskKind, Temperatures, Verdict
from ..orchestrate import AgentBundle, MemoryView
from ..queryparse import parse_plan_text, render_constraints, render_plan
from .prompts import (
    ACTOR_TEMPLATE,
    CONSTRAINT_FORMAT,
    EXTRACTOR_TEMPLATE,
    PLAN_FORMAT,
    TASK_DESCRIPTION,
    TASK_NOUN,
    VERIFIER_TEMPLATE,
    PromptTemplate,
    build_prompt,
    format_few_shot,
)
from .replies import parse_extractor_reply, parse_verifier_reply
from .transport import ChatRequest, LlmSettings, Transport, chat

log = logging.getLogger(__name__)


class LlmAgents:
    """Extractor, actor and verifier that all talk to one transport."""

    def __init__(
        self,
        task_kind: TaskKind | str,
        transport: Transport,
        settings: LlmSettings | None = None,
        temperatures: Temperatures | None = None,
        few_shot=(),
        templates: dict[str, PromptTemplate] | None = None,
    ):
        self.task_kind = TaskKind.parse(task_kind)
        self.transport = transport
        self.settings = settings or LlmSettings()
        self.temperatures = temperatures or Temperatures()
        self.few_shot = format_few_shot(few_shot)
        templates = templates or {}
        self.extractor_template = templates.get("extractor", EXTRACTOR_TEMPLATE)
        self.actor_template = templates.get("actor", ACTOR_TEMPLATE)
        self.verifier_template = templates.get("verifier", VERIFIER_TEMPLATE)

    def _ask(self, prompt: str, temperature: float) -> str:
        request = ChatRequest.single(self.settings.model, temperature, prompt, timeout=self.settings.timeout)
        return chat(request, self.transport, retries=self.settings.retries).text

    def extract(self, query_text: str) -> ConstraintSet:
        prompt = build_prompt(
            self.extractor_template,
            {"query": query_text, "output_format": CONSTRAINT_FORMAT[self.task_kind], "few_shot": self.few_shot},
        )
        cs, diag = parse_extractor_reply(self.task_kind, self._ask(prompt, self.temperatures.extractor))
        for span in diag.unrecognized_spans:
            log.info("extractor line not understood: %s", span)
        return cs

    def act(self, query_text: str, view: MemoryView, rng=None) -> Plan:
        slots = {
            "task_description": TASK_DESCRIPTION[self.task_kind],
            "few_shot": self.few_shot,
            "output_format": PLAN_FORMAT[self.task_kind],
            "query": query_text,
            "constraints": view.cmem_text,
            "errors": view.qmem_errors_text,
            "previous": render_plan(view.previous_plan) if view.previous_plan is not None else None,
            "critique": view.critique if view.previous_plan is not None else None,
        }
        reply = self._ask(build_prompt(self.actor_template, slots), self.temperatures.actor)
        return parse_plan_text(self.task_kind, reply)

    def verify(self, query_text: str, cs: ConstraintSet, plan: Plan) -> Verdict:
        slots = {
            "task": TASK_NOUN[self.task_kind],
            "query": query_text,
            "solution": render_plan(plan),
            "constraints": render_constraints(cs),
        }
        return parse_verifier_reply(self._ask(build_prompt(self.verifier_template, slots), self.temperatures.verifier))

    def bundle(self) -> AgentBundle:
        return AgentBundle(self.extract, self.act, self.verify)


def llm_agents(task_kind, transport: Transport, settings=None, temperatures=None, few_shot=()) -> AgentBundle:
    return LlmAgents(task_kind, transport, settings, temperatures, few_shot).bundle()
