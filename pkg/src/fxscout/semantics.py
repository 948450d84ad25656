"""Semantic descriptors and pluggable language/embedding providers.

The engine only ever talks to the two small interfaces below, so the whole
semantic pipeline runs offline and reproducibly with the bundled mock
providers; remote adapters speak a plain HTTP POST protocol and degrade to
the documented fallbacks on failure.
"""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass

import numpy as np


class EmbeddingError(ValueError):
    pass


class SemanticInputError(ValueError):
    pass


@dataclass(frozen=True)
class SemanticDescriptor:
    raw_text: str
    normalized_text: str
    embedding: np.ndarray

    def __post_init__(self):
        if not self.normalized_text:
            raise SemanticInputError("normalized text must be nonempty")
        emb = np.asarray(self.embedding, dtype=float)
        norm = np.linalg.norm(emb)
        if abs(norm - 1.0) > 1e-6:
            raise EmbeddingError("embedding must be unit norm")
        object.__setattr__(self, "embedding", emb)


class ProviderError(RuntimeError):
    """A provider call failed; callers fall back, never crash the pipeline."""


# --- mock providers ----------------------------------------------------------

_FILLER_TOKENS = frozenset({
    "a", "an", "the", "uh", "um", "like", "kind", "kinda", "sort", "sorta",
    "of", "thing", "things", "stuff", "really", "very", "just", "some",
    "basically", "pretty", "quite",
})

# Canonical spellings for tokens the filter alone cannot fix.
_ALIASES = {"firey": "fire", "fiery": "fire", "colour": "color"}

_EXPANSION_MODIFIERS = (
    "bright", "swirling", "gentle", "intense", "shimmering", "scattered",
    "dense", "faint", "radiant", "flickering",
)


def _tokenize(text: str) -> list[str]:
    return re.findall(r"[a-z0-9]+", text.lower())


class MockLlmProvider:
    """Deterministic token-filter stand-in for a language model."""

    capabilities = frozenset({"normalize", "expand"})

    def normalize(self, text: str) -> str:
        tokens = [_ALIASES.get(t, t) for t in _tokenize(text)
                  if t not in _FILLER_TOKENS]
        if not tokens:
            tokens = _tokenize(text)
        return " ".join(tokens)

    def expand(self, prev_text: str, curr_text: str, user_intent: str,
               count: int) -> list[str]:
        prev_tokens = self.normalize(prev_text).split()
        curr_tokens = self.normalize(curr_text).split()
        shared = [t for t in curr_tokens if t in set(prev_tokens)]
        differing = [t for t in curr_tokens if t not in set(prev_tokens)]
        differing += [t for t in prev_tokens
                      if t not in set(curr_tokens) and t not in differing]
        intent_tokens = [t for t in _tokenize(user_intent)
                         if t not in _FILLER_TOKENS]
        out = []
        for i in range(count):
            modifier = _EXPANSION_MODIFIERS[i % len(_EXPANSION_MODIFIERS)]
            variation = differing[i % len(differing)] if differing else ""
            tokens = shared + intent_tokens + [modifier]
            if variation:
                tokens.append(variation)
            out.append(" ".join(tokens))
        return out


class MockEmbeddingProvider:
    """Token-unigram hashing into a fixed number of buckets, l2-normalized.

    Deterministic and corpus-free; texts sharing more tokens embed closer,
    which is the only ordering property the engine relies on.
    """

    def __init__(self, dimension: int = 256):
        self._dimension = dimension

    @property
    def dimension(self) -> int:
        return self._dimension

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self._dimension)
        for token in _tokenize(text):
            digest = hashlib.md5(token.encode("utf-8")).digest()
            bucket = int.from_bytes(digest[:8], "big") % self._dimension
            vec[bucket] += 1.0
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise ProviderError("no tokens to embed")
        return vec / norm


# --- remote providers --------------------------------------------------------

class RemoteLlmProvider:
    """HTTP adapter: POST {model, task, input...} -> {text | texts}."""

    capabilities = frozenset({"normalize", "expand"})

    def __init__(self, endpoint: str | None = None, model: str = "default",
                 timeout: float = 10.0):
        self.endpoint = endpoint or os.environ.get("FXSCOUT_LLM_ENDPOINT")
        self.token = os.environ.get("FXSCOUT_LLM_TOKEN", "")
        self.model = model
        self.timeout = timeout
        if not self.endpoint:
            raise ProviderError("no LLM endpoint configured")

    def _post(self, payload: dict) -> dict:
        import requests

        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        try:
            resp = requests.post(self.endpoint, json=payload,
                                 headers=headers, timeout=self.timeout)
            resp.raise_for_status()
            return resp.json()
        except Exception as exc:  # noqa: BLE001 - any failure means fallback
            raise ProviderError(str(exc)) from exc

    def normalize(self, text: str) -> str:
        data = self._post({"model": self.model, "task": "normalize",
                           "input": text})
        return data["text"]

    def expand(self, prev_text: str, curr_text: str, user_intent: str,
               count: int) -> list[str]:
        data = self._post({"model": self.model, "task": "expand",
                           "previous": prev_text, "current": curr_text,
                           "intent": user_intent, "count": count})
        return list(data["texts"])


class RemoteEmbeddingProvider:
    """HTTP adapter: POST {model, input} -> {vector}."""

    def __init__(self, endpoint: str | None = None, model: str = "default",
                 dimension: int = 384, timeout: float = 10.0):
        self.endpoint = endpoint or os.environ.get(
            "FXSCOUT_EMBEDDING_ENDPOINT")
        self.token = os.environ.get("FXSCOUT_EMBEDDING_TOKEN", "")
        self.model = model
        self._dimension = dimension
        self.timeout = timeout
        if not self.endpoint:
            raise ProviderError("no embedding endpoint configured")

    @property
    def dimension(self) -> int:
        return self._dimension

    def embed(self, text: str) -> np.ndarray:
        import requests

        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        try:
            resp = requests.post(self.endpoint,
                                 json={"model": self.model, "input": text},
                                 headers=headers, timeout=self.timeout)
            resp.raise_for_status()
            vec = np.asarray(resp.json()["vector"], dtype=float)
        except Exception as exc:  # noqa: BLE001
            raise ProviderError(str(exc)) from exc
        if vec.size != self._dimension:
            raise ProviderError("unexpected embedding dimension")
        return vec


def make_providers(config) -> tuple:
    """Build (llm, embedding) providers from an EngineConfig."""
    if config.provider == "mock":
        return (MockLlmProvider(),
                MockEmbeddingProvider(config.embedding_dimension))
    return (RemoteLlmProvider(timeout=config.provider_timeout),
            RemoteEmbeddingProvider(timeout=config.provider_timeout))


# --- operations --------------------------------------------------------------

def normalize_description(text: str, llm) -> str:
    """Concise normalized description; never fails past a nonempty input."""
    if not text or not text.strip():
        raise SemanticInputError("description must be nonempty")
    try:
        normalized = llm.normalize(text)
        if normalized:
            return normalized
    except ProviderError:
        pass
    return " ".join(_tokenize(text))


def embed(text: str, provider) -> np.ndarray:
    if not text or not text.strip():
        raise SemanticInputError("text must be nonempty")
    vec = np.asarray(provider.embed(text), dtype=float)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise EmbeddingError("provider returned a zero vector")
    return vec / norm


def describe(text: str, llm, embedding_provider) -> SemanticDescriptor:
    """Normalize and embed free text into a SemanticDescriptor."""
    normalized = normalize_description(text, llm)
    try:
        vector = embed(normalized, embedding_provider)
    except ProviderError:
        # Embedding is load-bearing; hash-embed the normalized text locally
        # so kinematic-only exploration can proceed.
        fallback = MockEmbeddingProvider(
            getattr(embedding_provider, "dimension", 256))
        vector = embed(normalized, fallback)
    return SemanticDescriptor(raw_text=text, normalized_text=normalized,
                              embedding=vector)


def semantic_similarity(a: SemanticDescriptor,
                        b: SemanticDescriptor) -> float:
    """Cosine of the embeddings, clamped below at 0."""
    if a.embedding.shape != b.embedding.shape:
        raise EmbeddingError("descriptor dimensions differ")
    return float(max(0.0, np.dot(a.embedding, b.embedding)))


def expand_directionally(prev: SemanticDescriptor, curr: SemanticDescriptor,
                         user_intent: str, llm, count: int) -> list[str]:
    """Candidate descriptions sharing prev/curr's common features.

    Provider failure degrades to the current description so exploration can
    continue on kinematics alone.
    """
    if count < 1:
        raise SemanticInputError("count must be >= 1")
    try:
        candidates = llm.expand(prev.normalized_text, curr.normalized_text,
                                user_intent, count)
        if candidates:
            return candidates[:count]
    except ProviderError:
        pass
    return [curr.normalized_text]
