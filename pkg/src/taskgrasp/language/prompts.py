"""Prompt templates for the three LLM queries.

The templates are reconstructions, versioned by ``PROMPT_VERSION`` so that a
live provider's outputs can be tied to the exact wording that produced them.
Each template carries its arguments on dedicated ``Key: value`` lines, which
lets ``parse_prompt`` recover them (the offline stub provider relies on this).
"""
from __future__ import annotations

import enum
import re

from ..errors import ContractViolation, TemplateError

PROMPT_VERSION = "v1"


class PromptKind(str, enum.Enum):
    CATEGORY_TASK = "CategoryTask"
    PART_LABELS = "PartLabels"
    PART_DESCRIPTION = "PartDescription"


_HEADERS = {
    PromptKind.CATEGORY_TASK: "### Task-oriented grasp description",
    PromptKind.PART_LABELS: "### Multi-scale part labels",
    PromptKind.PART_DESCRIPTION: "### Part description",
}

_TEMPLATES = {
    PromptKind.CATEGORY_TASK: """{header}
Object category: {category}
Task type: {task}

A person wants to perform the task "{task}" with an object of category "{category}".
Think about a typical object of this category. Describe which part of the object
the hand should interact with to complete the task, the geometric and shape
characteristics of that part, and the role the part plays in completing the task.
Answer in one paragraph.""",
    PromptKind.PART_LABELS: """{header}
Object category: {category}
Number of scales: 2

List the parts of a typical object of category "{category}" that a hand may grasp.
Follow these rules:
1. Visibility: only list parts that are visible from outside the object.
2. Functionality: prefer parts that are usually involved in hand-object interaction.
3. Generality: use common part names such as head, body, handle, base.
4. Multi-scale: give the parts at two segmentation scales. Scale 1 holds coarse
   parts that together cover the object; scale 2 holds finer sub-parts.
Reply with JSON only, in the form {{"scale_1": ["..."], "scale_2": ["..."]}}.""",
    PromptKind.PART_DESCRIPTION: """{header}
Object category: {category}
Part label: {part_label}

Describe the part "{part_label}" of an object of category "{category}".
Explain the geometry and shape of this part, and the function of the part
with respect to its geometry during hand-object interaction.
Answer in one paragraph.""",
}

_FIELD_RE = re.compile(r"^(Object category|Task type|Part label): (.*)$", re.MULTILINE)


def render_prompt(kind: PromptKind | str, category: str, task: str | None = None,
                  part_label: str | None = None) -> str:
    kind = PromptKind(kind)
    if not category or not category.strip():
        raise TemplateError("category is required")
    category = category.strip()
    if kind is PromptKind.CATEGORY_TASK:
        if not task:
            raise TemplateError("CategoryTask prompt requires a task")
        if part_label is not None:
            raise ContractViolation("CategoryTask prompt takes no part label")
        return _TEMPLATES[kind].format(header=_HEADERS[kind], category=category, task=task.strip())
    if task is not None:
        # part labels and part descriptions must stay task-agnostic
        raise ContractViolation(f"{kind.value} prompt must not receive a task")
    if kind is PromptKind.PART_LABELS:
        if part_label is not None:
            raise ContractViolation("PartLabels prompt takes no part label")
        return _TEMPLATES[kind].format(header=_HEADERS[kind], category=category)
    if not part_label:
        raise TemplateError("PartDescription prompt requires a part label")
    return _TEMPLATES[kind].format(header=_HEADERS[kind], category=category, part_label=part_label.strip())


def parse_prompt(text: str) -> tuple[PromptKind, dict[str, str]]:
    """Inverse of :func:`render_prompt` for prompts produced by this module."""
    first = text.splitlines()[0] if text else ""
    for kind, header in _HEADERS.items():
        if first == header:
            break
    else:
        raise TemplateError("not a prompt rendered by this package")
    keys = {"Object category": "category", "Task type": "task", "Part label": "part_label"}
    fields = {keys[m.group(1)]: m.group(2) for m in _FIELD_RE.finditer(text)}
    return kind, fields
