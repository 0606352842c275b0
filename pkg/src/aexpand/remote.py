"""HTTP client for a sampling completion endpoint.

The endpoint speaks JSON: request {prompt, temperature, top_k,
num_samples, max_tokens}, response {samples: [text, ...]}. Transport
failures retry with exponential backoff; anything structurally wrong in a
response raises a typed error carrying an excerpt of the payload.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import httpx

from .expander import (
    ExpansionQuery,
    ExpansionResult,
    PromptSpec,
    SamplingConfig,
    build_prompt,
    filter_and_rank,
)
from .noise import KeyboardLayout

ENV_URL = "AEXPAND_ENDPOINT_URL"
ENV_TOKEN = "AEXPAND_ENDPOINT_TOKEN"


class RemoteError(Exception):
    retryable = False


class TransportError(RemoteError):
    retryable = True


class MalformedResponseError(RemoteError):
    def __init__(self, message: str, payload: str = ""):
        excerpt = payload[:200]
        super().__init__(f"{message}: {excerpt!r}" if excerpt else message)
        self.payload_excerpt = excerpt


@dataclass(frozen=True)
class EndpointConfig:
    url: str
    auth_token: str | None = None
    max_retries: int = 3
    backoff_base: float = 0.5
    timeout: float = 30.0

    @classmethod
    def from_env(cls) -> "EndpointConfig":
        url = os.environ.get(ENV_URL)
        if not url:
            raise ValueError(f"{ENV_URL} is not set")
        return cls(url=url, auth_token=os.environ.get(ENV_TOKEN))

    @classmethod
    def from_file(cls, path: str | Path) -> "EndpointConfig":
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        return cls(
            url=obj["url"],
            auth_token=obj.get("auth_token"),
            max_retries=int(obj.get("max_retries", 3)),
            backoff_base=float(obj.get("backoff_base", 0.5)),
            timeout=float(obj.get("timeout", 30.0)),
        )


# A transport takes (url, payload dict, headers, timeout) and returns the
# raw response body; injectable so tests can run without a server.
Transport = Callable[[str, dict, dict, float], str]


def _httpx_transport(url: str, payload: dict, headers: dict, timeout: float) -> str:
    response = httpx.post(url, json=payload, headers=headers, timeout=timeout)
    if response.status_code != 200:
        raise TransportError(f"endpoint returned HTTP {response.status_code}")
    return response.text


def remote_expand(
    endpoint: EndpointConfig,
    spec: PromptSpec,
    sampling: SamplingConfig,
    query: ExpansionQuery,
    transport: Transport | None = None,
) -> list[str]:
    """Request sampled continuations for a query's prompt.

    Returns the raw continuations, each truncated at the first closing
    brace. Raises TransportError after exhausting retries and
    MalformedResponseError when the response payload is unusable.
    """
    transport = transport or _httpx_transport
    payload = {
        "prompt": build_prompt(spec, query),
        "temperature": sampling.temperature,
        "top_k": sampling.top_k_logits,
        "num_samples": sampling.num_samples,
        "max_tokens": sampling.max_tokens,
    }
    headers = {"Content-Type": "application/json"}
    if endpoint.auth_token:
        headers["Authorization"] = f"Bearer {endpoint.auth_token}"

    body: str | None = None
    last_error: Exception | None = None
    for attempt in range(endpoint.max_retries + 1):
        try:
            body = transport(endpoint.url, payload, headers, endpoint.timeout)
            break
        except (TransportError, httpx.TransportError, OSError) as err:
            last_error = err
            if attempt < endpoint.max_retries:
                time.sleep(endpoint.backoff_base * (2**attempt))
    if body is None:
        raise TransportError(
            f"endpoint unreachable after {endpoint.max_retries + 1} attempts: {last_error}"
        )

    try:
        data = json.loads(body)
    except json.JSONDecodeError:
        raise MalformedResponseError("response is not JSON", body)
    samples = data.get("samples") if isinstance(data, dict) else None
    if not isinstance(samples, list) or not all(isinstance(s, str) for s in samples):
        raise MalformedResponseError("response lacks a samples list", body)
    if len(samples) != sampling.num_samples:
        raise MalformedResponseError(
            f"expected {sampling.num_samples} samples, got {len(samples)}", body
        )
    return [s.split("}", 1)[0] for s in samples]


@dataclass
class RemoteBackend:
    """Full remote pipeline: prompt, sample, then filter and rank."""

    endpoint: EndpointConfig
    spec: PromptSpec = PromptSpec()
    sampling: SamplingConfig = SamplingConfig()
    layout: KeyboardLayout | None = None
    transport: Transport | None = None

    def expand(self, query: ExpansionQuery) -> ExpansionResult:
        samples = self.remote_samples(query)
        layout = self.layout if query.noisy else None
        if query.noisy and layout is None:
            layout = KeyboardLayout()
        return filter_and_rank(samples, query, layout)

    def remote_samples(self, query: ExpansionQuery) -> list[str]:
        return remote_expand(
            self.endpoint, self.spec, self.sampling, query, self.transport
        )
