"""External-model adapters: MLM, sentence encoder, grammar checker, victim.

Wire protocols (JSON over HTTP POST, or one JSON object per line for the
subprocess variant):

    MLM       request  {"tokens": [str], "target": int, "masked": bool, "top_k": int}
              response {"candidates": [{"token": str, "score": float, "is_subword": bool}]}
    Encoder   request  {"texts": [str]}
              response {"embeddings": [[float]]}
    Grammar   request  {"text": str}
              response {"errors": [{"offset": int, "length": int, "rule": str}]}
    Victim    request  {"text": str}
              response {"label": int, "probs": [float]}

Adapters must answer identical requests identically. Mock adapters cover
fixture-driven runs via ``mock://`` URIs; optional wrappers over local
models hide behind lazy imports.
"""

from __future__ import annotations

import hashlib
import json
import math
import shlex
import struct
import subprocess
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence
from urllib.parse import parse_qs, urlparse

import numpy as np
import requests

from .errors import AdapterError


@dataclass(frozen=True)
class MlmCandidate:
    token: str
    score: float
    is_subword: bool = False


@dataclass(frozen=True)
class GrammarIssue:
    offset: int
    length: int
    rule: str


class MlmAdapter(Protocol):
    def predict(
        self, tokens: Sequence[str], target: int, masked: bool, top_k: int
    ) -> list[MlmCandidate]: ...


class SentenceEncoder(Protocol):
    def encode(self, texts: Sequence[str]) -> np.ndarray: ...


class GrammarChecker(Protocol):
    def check(self, text: str) -> list[GrammarIssue]: ...


class VictimClassifier(Protocol):
    def classify(self, text: str) -> tuple[int, list[float]]: ...


# -- HTTP ------------------------------------------------------------------


def _post_json(url: str, payload: dict, timeout: float) -> dict:
    try:
        resp = requests.post(url, json=payload, timeout=timeout)
    except requests.RequestException as exc:
        raise AdapterError(f"request to {url} failed: {exc}") from exc
    if resp.status_code != 200:
        raise AdapterError(f"{url} answered HTTP {resp.status_code}")
    try:
        return resp.json()
    except ValueError as exc:
        raise AdapterError(f"{url} answered non-JSON") from exc


class HttpMlmAdapter:
    def __init__(self, url: str, timeout: float = 60.0):
        self.url = url
        self.timeout = timeout

    def predict(self, tokens, target, masked, top_k):
        payload = {
            "tokens": list(tokens),
            "target": int(target),
            "masked": bool(masked),
            "top_k": int(top_k),
        }
        body = _post_json(self.url, payload, self.timeout)
        try:
            return [
                MlmCandidate(c["token"], float(c["score"]), bool(c.get("is_subword", False)))
                for c in body["candidates"]
            ]
        except (KeyError, TypeError) as exc:
            raise AdapterError(f"malformed MLM response: {exc}") from exc


class HttpSentenceEncoder:
    def __init__(self, url: str, timeout: float = 60.0):
        self.url = url
        self.timeout = timeout

    def encode(self, texts):
        body = _post_json(self.url, {"texts": list(texts)}, self.timeout)
        try:
            emb = np.asarray(body["embeddings"], dtype=np.float64)
        except (KeyError, ValueError) as exc:
            raise AdapterError(f"malformed encoder response: {exc}") from exc
        if emb.ndim != 2 or emb.shape[0] != len(texts):
            raise AdapterError("encoder returned a wrong-shaped embedding matrix")
        return emb


class HttpGrammarChecker:
    def __init__(self, url: str, timeout: float = 60.0):
        self.url = url
        self.timeout = timeout

    def check(self, text):
        body = _post_json(self.url, {"text": text}, self.timeout)
        try:
            return [
                GrammarIssue(int(e["offset"]), int(e["length"]), str(e["rule"]))
                for e in body["errors"]
            ]
        except (KeyError, TypeError) as exc:
            raise AdapterError(f"malformed grammar response: {exc}") from exc


class HttpVictimClassifier:
    def __init__(self, url: str, timeout: float = 60.0):
        self.url = url
        self.timeout = timeout

    def classify(self, text):
        body = _post_json(self.url, {"text": text}, self.timeout)
        try:
            return int(body["label"]), [float(p) for p in body["probs"]]
        except (KeyError, TypeError) as exc:
            raise AdapterError(f"malformed victim response: {exc}") from exc


class SubprocessMlmAdapter:
    """Line-protocol MLM: one JSON request in, one JSON response out."""

    def __init__(self, command: str):
        self.command = command
        self._proc: subprocess.Popen | None = None

    def _ensure(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    shlex.split(self.command),
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                )
            except OSError as exc:
                raise AdapterError(f"cannot start {self.command!r}: {exc}") from exc
        return self._proc

    def predict(self, tokens, target, masked, top_k):
        proc = self._ensure()
        request = {
            "tokens": list(tokens),
            "target": int(target),
            "masked": bool(masked),
            "top_k": int(top_k),
        }
        try:
            assert proc.stdin is not None and proc.stdout is not None
            proc.stdin.write(json.dumps(request) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except (OSError, ValueError) as exc:
            raise AdapterError(f"subprocess MLM failed: {exc}") from exc
        if not line:
            raise AdapterError("subprocess MLM closed its output")
        try:
            body = json.loads(line)
            return [
                MlmCandidate(c["token"], float(c["score"]), bool(c.get("is_subword", False)))
                for c in body["candidates"]
            ]
        except (ValueError, KeyError, TypeError) as exc:
            raise AdapterError(f"malformed subprocess MLM response: {exc}") from exc

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.terminate()


# -- mocks -----------------------------------------------------------------


class MockMlmAdapter:
    """Canned predictions keyed by the target token's lower-case surface."""

    def __init__(
        self,
        by_word: dict[str, list] | None = None,
        default: list | None = None,
    ):
        self.by_word = {k.casefold(): self._norm(v) for k, v in (by_word or {}).items()}
        self.default = self._norm(default or [])

    @staticmethod
    def _norm(items: list) -> list[MlmCandidate]:
        out = []
        for rank, item in enumerate(items):
            if isinstance(item, MlmCandidate):
                out.append(item)
            elif isinstance(item, str):
                out.append(
                    MlmCandidate(item, -float(rank), is_subword=item.startswith("##"))
                )
            else:
                token, score = item[0], float(item[1])
                sub = item[2] if len(item) > 2 else token.startswith("##")
                out.append(MlmCandidate(token, score, bool(sub)))
        return out

    def predict(self, tokens, target, masked, top_k):
        word = tokens[target].casefold()
        return list(self.by_word.get(word, self.default))[:top_k]


class HashEncoder:
    """Deterministic bag-of-words embedding, for fixture runs.

    Every token maps to a stable pseudo-random unit vector derived from its
    hash; a text embeds as the mean of its token vectors. Texts sharing
    most tokens land close in cosine, so constraint and curve code paths
    see realistic score structure without a real model.
    """

    def __init__(self, dim: int = 32):
        self.dim = dim
        self._cache: dict[str, np.ndarray] = {}

    def _token_vec(self, token: str) -> np.ndarray:
        vec = self._cache.get(token)
        if vec is None:
            values = []
            digest_input = token.encode("utf-8")
            counter = 0
            while len(values) < self.dim:
                digest = hashlib.md5(digest_input + counter.to_bytes(2, "big")).digest()
                for off in range(0, 16, 8):
                    if len(values) >= self.dim:
                        break
                    (raw,) = struct.unpack(">q", digest[off:off + 8])
                    values.append(raw / float(2**63))
                counter += 1
            vec = np.array(values, dtype=np.float64)
            vec /= np.linalg.norm(vec)
            self._cache[token] = vec
        return vec

    def encode(self, texts):
        rows = []
        for text in texts:
            tokens = text.split()
            if not tokens:
                rows.append(np.full(self.dim, 1e-8))
                continue
            rows.append(np.mean([self._token_vec(t) for t in tokens], axis=0))
        return np.asarray(rows)


class StaticGrammarChecker:
    """Reports a fixed issue for each occurrence of the given surface forms."""

    def __init__(self, flagged: Sequence[str] = (), rule: str = "MOCK_RULE"):
        self.flagged = {w.casefold() for w in flagged}
        self.rule = rule

    def check(self, text):
        issues = []
        offset = 0
        for token in text.split():
            if token.casefold() in self.flagged:
                issues.append(GrammarIssue(offset, len(token), self.rule))
            offset += len(token) + 1
        return issues


class CallableGrammarChecker:
    def __init__(self, fn: Callable[[str], list[GrammarIssue]]):
        self.fn = fn

    def check(self, text):
        return self.fn(text)


class KeywordVictim:
    """Two-or-more-class victim scored by keyword evidence.

    ``weights`` maps a token to per-class additive logits; unknown tokens
    contribute nothing. Deterministic, softmax-normalized.
    """

    def __init__(self, weights: dict[str, Sequence[float]], n_classes: int = 2):
        self.n_classes = n_classes
        self.weights = {}
        for word, ws in weights.items():
            if len(ws) != n_classes:
                raise ValueError(f"{word!r}: expected {n_classes} logits")
            self.weights[word.casefold()] = list(map(float, ws))
        self.calls = 0

    def classify(self, text):
        self.calls += 1
        logits = [0.0] * self.n_classes
        for token in text.split():
            for c, w in enumerate(self.weights.get(token.casefold(), ())):
                logits[c] += w
        peak = max(logits)
        exp = [math.exp(x - peak) for x in logits]
        total = sum(exp)
        probs = [x / total for x in exp]
        label = max(range(self.n_classes), key=lambda c: (probs[c], -c))
        return label, probs


class ConstantVictim:
    def __init__(self, label: int = 0, probs: Sequence[float] = (0.9, 0.1)):
        self.label = label
        self.probs = list(probs)
        self.calls = 0

    def classify(self, text):
        self.calls += 1
        return self.label, list(self.probs)


# -- URI factory -----------------------------------------------------------


def _mock_query(uri: str) -> tuple[str, dict[str, list[str]]]:
    parsed = urlparse(uri)
    return parsed.netloc or parsed.path.lstrip("/"), parse_qs(parsed.query)


def build_encoder(uri: str) -> SentenceEncoder:
    if uri.startswith(("http://", "https://")):
        return HttpSentenceEncoder(uri)
    if uri.startswith("mock://"):
        name, query = _mock_query(uri)
        if name == "bow":
            dim = int(query.get("dim", ["32"])[0])
            return HashEncoder(dim)
        raise AdapterError(f"unknown mock encoder {name!r}")
    if uri.startswith("st://"):
        return SentenceTransformerEncoder(uri[len("st://"):])
    raise AdapterError(f"cannot build an encoder from {uri!r}")


def build_grammar_checker(uri: str) -> GrammarChecker:
    if uri.startswith(("http://", "https://")):
        return HttpGrammarChecker(uri)
    if uri.startswith("mock://"):
        name, query = _mock_query(uri)
        if name == "none":
            return StaticGrammarChecker(())
        if name == "flag":
            words = query.get("words", [""])[0]
            return StaticGrammarChecker([w for w in words.split(",") if w])
        raise AdapterError(f"unknown mock grammar checker {name!r}")
    if uri.startswith("lt://"):
        return LanguageToolChecker(uri[len("lt://"):] or "en-US")
    raise AdapterError(f"cannot build a grammar checker from {uri!r}")


def build_mlm_adapter(uri: str) -> MlmAdapter:
    if uri.startswith(("http://", "https://")):
        return HttpMlmAdapter(uri)
    if uri.startswith("proc://"):
        return SubprocessMlmAdapter(uri[len("proc://"):])
    if uri.startswith("mock://"):
        name, query = _mock_query(uri)
        if name == "empty":
            return MockMlmAdapter({})
        if name == "file":
            path = query["path"][0]
            with open(path, "r", encoding="utf-8") as fh:
                return MockMlmAdapter(json.load(fh))
        raise AdapterError(f"unknown mock MLM {name!r}")
    if uri.startswith("hf-mlm://"):
        return HuggingFaceMlmAdapter(uri[len("hf-mlm://"):])
    raise AdapterError(f"cannot build an MLM adapter from {uri!r}")


def build_victim(uri: str) -> VictimClassifier:
    if uri.startswith(("http://", "https://")):
        return HttpVictimClassifier(uri)
    if uri.startswith("mock://"):
        name, query = _mock_query(uri)
        if name == "constant":
            label = int(query.get("label", ["0"])[0])
            return ConstantVictim(label)
        if name == "keyword":
            weights: dict[str, list[float]] = {}
            n_classes = 2
            for spec in query.get("w", []):
                word, _, logits = spec.partition(":")
                values = [float(x) for x in logits.split(",")]
                weights[word] = values
                n_classes = len(values)
            return KeywordVictim(weights, n_classes)
        raise AdapterError(f"unknown mock victim {name!r}")
    if uri.startswith("hf-clf://"):
        return HuggingFaceVictim(uri[len("hf-clf://"):])
    raise AdapterError(f"cannot build a victim from {uri!r}")


# -- optional local-model wrappers (lazy imports) ----------------------------


class SentenceTransformerEncoder:
    def __init__(self, model_name: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise AdapterError("sentence-transformers is not installed") from exc
        self.model = SentenceTransformer(model_name)

    def encode(self, texts):
        return np.asarray(self.model.encode(list(texts), show_progress_bar=False))


class HuggingFaceMlmAdapter:
    def __init__(self, model_name: str):
        try:
            import torch
            from transformers import AutoModelForMaskedLM, AutoTokenizer
        except ImportError as exc:
            raise AdapterError("transformers is not installed") from exc
        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModelForMaskedLM.from_pretrained(model_name)
        self.model.eval()

    def predict(self, tokens, target, masked, top_k):
        torch = self._torch
        words = list(tokens)
        if masked:
            words[target] = self.tokenizer.mask_token
        encoding = self.tokenizer(
            words, is_split_into_words=True, return_tensors="pt", truncation=True
        )
        word_ids = encoding.word_ids(0)
        try:
            pos = word_ids.index(target)
        except ValueError:
            raise AdapterError("target word was truncated away")
        with torch.no_grad():
            logits = self.model(**encoding).logits[0, pos]
        log_probs = torch.log_softmax(logits, dim=-1)
        scores, ids = torch.topk(log_probs, top_k)
        out = []
        for score, tok_id in zip(scores.tolist(), ids.tolist()):
            piece = self.tokenizer.convert_ids_to_tokens(tok_id)
            out.append(MlmCandidate(piece, float(score), piece.startswith("##")))
        return out


class HuggingFaceVictim:
    def __init__(self, model_name: str):
        try:
            import torch
            from transformers import AutoModelForSequenceClassification, AutoTokenizer
        except ImportError as exc:
            raise AdapterError("transformers is not installed") from exc
        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModelForSequenceClassification.from_pretrained(model_name)
        self.model.eval()

    def classify(self, text):
        torch = self._torch
        encoding = self.tokenizer(text, return_tensors="pt", truncation=True)
        with torch.no_grad():
            logits = self.model(**encoding).logits[0]
        probs = torch.softmax(logits, dim=-1).tolist()
        return int(max(range(len(probs)), key=probs.__getitem__)), probs


class LanguageToolChecker:
    def __init__(self, language: str = "en-US"):
        try:
            import language_tool_python
        except ImportError as exc:
            raise AdapterError("language-tool-python is not installed") from exc
        self.tool = language_tool_python.LanguageTool(language)

    def check(self, text):
        return [
            GrammarIssue(m.offset, m.errorLength, m.ruleId)
            for m in self.tool.check(text)
        ]
