"""Prompt templates with named placeholders, loaded from text files."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

from .errors import GatewayConfigError

_PLACEHOLDER_RE = re.compile(r"\{([a-z_]+)\}")

_TEMPLATE_FILES = {
    "ASPECT_EXTRACTION": "aspect_extraction.txt",
    "ASPECT_CONSOLIDATION": "aspect_consolidation.txt",
    "SUMMARIZATION": "summarization.txt",
}


class TemplateId(Enum):
    ASPECT_EXTRACTION = "ASPECT_EXTRACTION"
    ASPECT_CONSOLIDATION = "ASPECT_CONSOLIDATION"
    SUMMARIZATION = "SUMMARIZATION"


@dataclass(frozen=True)
class PromptTemplate:
    """A template body with ``{placeholder}`` markers."""

    template_id: TemplateId
    body: str

    @property
    def placeholders(self) -> frozenset[str]:
        return frozenset(_PLACEHOLDER_RE.findall(self.body))

    def render(self, bindings: Mapping[str, str]) -> str:
        """Substitute every placeholder; unbound placeholders are an error."""
        missing = self.placeholders - set(bindings)
        if missing:
            raise GatewayConfigError(
                f"{self.template_id.value}: missing bindings for {sorted(missing)}"
            )

        def _sub(match: re.Match[str]) -> str:
            return str(bindings[match.group(1)])

        return _PLACEHOLDER_RE.sub(_sub, self.body)


def load_templates(templates_dir: Optional[str | Path] = None) -> dict[TemplateId, PromptTemplate]:
    """Load all templates from a directory, defaulting to the packaged set."""
    templates: dict[TemplateId, PromptTemplate] = {}
    for template_id in TemplateId:
        filename = _TEMPLATE_FILES[template_id.value]
        if templates_dir is not None:
            body = (Path(templates_dir) / filename).read_text(encoding="utf-8")
        else:
            body = (
                resources.files("aspectsum").joinpath("templates", filename).read_text("utf-8")
            )
        templates[template_id] = PromptTemplate(template_id=template_id, body=body)
    return templates


def render_prompt(
    template_id: TemplateId,
    bindings: Mapping[str, str],
    templates: Optional[Mapping[TemplateId, PromptTemplate]] = None,
) -> str:
    """Render one template; loads the packaged templates when none are given."""
    table = templates if templates is not None else load_templates()
    return table[template_id].render(bindings)
