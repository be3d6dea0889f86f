"""Indicator request code: embeddable HTML+script snippets.

A snippet is a container element tagged with the indicator id plus one
script tag that loads the engine's render script; at load time the script
fetches the chart document from the engine and draws it in place.  The
snippet itself carries no credentials and no raw user identifiers.
"""

from __future__ import annotations

import html
from typing import Iterable

from .errors import EngineError


def _container(indicator_id: str) -> str:
    return f'<div data-indicator-id="{html.escape(indicator_id, quote=True)}"></div>'


def _script(base_url: str) -> str:
    src = html.escape(base_url.rstrip("/") + "/embed.js", quote=True)
    return f'<script src="{src}" defer></script>'


def indicator_snippet(indicator_id: str, base_url: str) -> str:
    return _container(indicator_id) + _script(base_url)


def question_snippet(indicator_ids: Iterable[str], base_url: str) -> str:
    """One container per associated indicator, one shared script tag, so a
    whole question embeds as a dashboard."""
    containers = "".join(_container(i) for i in indicator_ids)
    return containers + _script(base_url)


def generate_irc(catalog, target_id: str, base_url: str) -> str:
    """Snippet for an indicator id or a question id; UnknownTarget otherwise."""
    if catalog.has_indicator(target_id):
        return indicator_snippet(target_id, base_url)
    question = catalog.find_question(target_id)
    if question is not None:
        return question_snippet(question.indicator_ids, base_url)
    raise EngineError("UnknownTarget", f"no indicator or question {target_id!r}")
