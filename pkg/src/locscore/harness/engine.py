"""Group scoring: the reward engine behind both the service and batch paths."""

from __future__ import annotations

import json
from typing import Any, Mapping

from ..config import EngineConfig
from ..errors import EngineError, MalformedRequestError
from ..geometry import CoordinateSpace
from ..grpo import group_advantages, grpo_objective_detailed
from ..matching import MatcherPolicy
from ..parsing import default_format
from ..rewards import in_advanced_phase, phase_thresholds, score_completion
from .wire import (
    ScoringRequest,
    ScoringResponse,
    error_to_dict,
    parse_request,
    response_to_dict,
)


def score_group(req: ScoringRequest, config: EngineConfig | None = None) -> ScoringResponse:
    """Score every completion of one group and derive group statistics.

    Stateless: the response depends only on the request and configuration.
    Raises ``MalformedRequestError`` for requests that violate the contract.
    """
    config = (config or EngineConfig()).validate()
    if req.want_advantages and len(req.completions) < 2:
        raise MalformedRequestError(
            "advantage computation needs at least two completions per group"
        )
    if req.logprobs is not None and len(req.logprobs) != len(req.completions):
        raise MalformedRequestError("one log-prob record per completion is required")

    fmt = req.format or default_format(config.completion_format)
    try:
        matcher = MatcherPolicy(req.matcher) if req.matcher is not None else config.matcher
    except ValueError as exc:
        raise MalformedRequestError(f"unknown matcher {req.matcher!r}") from exc
    phase_cfg = (req.phase or config.phase).validate()

    completion_space = CoordinateSpace(
        fmt.space_kind, req.sample.space.width, req.sample.space.height
    )
    thresholds = phase_thresholds(phase_cfg, req.progress)
    breakdowns = tuple(
        score_completion(
            text,
            fmt,
            completion_space,
            req.sample.gt,
            matcher,
            phase_cfg,
            req.progress,
            config.rules,
        )
        for text in req.completions
    )
    totals = [b.total for b in breakdowns]

    diagnostics: list[str] = []
    advantages = None
    objective = None
    kl_values = None
    if req.want_advantages:
        advantages = tuple(group_advantages(totals, config.epsilon))
        if req.logprobs is not None:
            detail = grpo_objective_detailed(
                req.logprobs, advantages, config.beta, config.kl_mode, config.clip_range
            )
            objective = detail.objective
            kl_values = detail.kl_values
            if detail.clamped_ratios:
                diagnostics.append(
                    f"{detail.clamped_ratios} sequence log-ratio(s) clamped to +/-50"
                )

    return ScoringResponse(
        request_id=req.request_id,
        rewards=breakdowns,
        advantages=advantages,
        objective=objective,
        kl_values=kl_values,
        thresholds=thresholds,
        phase_name="advanced" if in_advanced_phase(phase_cfg, req.progress) else "beginner",
        diagnostics=tuple(diagnostics),
    )


def handle_request_object(data: Any, config: EngineConfig | None = None) -> dict[str, Any]:
    """Request dict in, response dict out; faults become error responses."""
    request_id = data.get("request_id") if isinstance(data, Mapping) else None
    if request_id is not None:
        request_id = str(request_id)
    try:
        req = parse_request(data)
        return response_to_dict(score_group(req, config))
    except MalformedRequestError as exc:
        return error_to_dict(request_id, "malformed-request", str(exc))
    except EngineError as exc:
        return error_to_dict(request_id, "scoring-error", str(exc))


def handle_request_line(line: str, config: EngineConfig | None = None) -> dict[str, Any]:
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        return error_to_dict(None, "parse-error", f"{exc.msg} at position {exc.pos}")
    return handle_request_object(data, config)
