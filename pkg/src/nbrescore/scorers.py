"""Pair scorers: the native MLP and the external child-process protocol client.

External protocol (JSON object per line over the child's stdin/stdout):

    handshake  -> {"op": "hello", "version": 1}
               <- {"ok": true, "version": 1}
    request    -> {"id": N, "op": "score_pair", "hyp_a": [...], "hyp_b": [...]}
    response   <- {"id": N, "v": 0.73}

Requests are serialized: one in flight per process.
"""

from __future__ import annotations

import json
import logging
import queue
import subprocess
import threading
from typing import Optional, Sequence

import numpy as np

from .features import FeatureConfig, FeatureContext
from .mlp import MlpParams, forward_batch
from .nbest import NBestList

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1
V_CLAMP = 1e-6


class ScorerError(Exception):
    """Base class for external-scorer failures."""


class ScorerProcessError(ScorerError):
    """Child process exited or its stream closed."""


class ScorerTimeoutError(ScorerError):
    pass


class ScorerProtocolError(ScorerError):
    """Malformed response or failed handshake."""


class ScorerIdMismatchError(ScorerError):
    pass


class NativeScorer:
    """Scores pairs with a trained MLP over locally built features."""

    def __init__(self, params: MlpParams, config: FeatureConfig):
        if params.spec.input_dim != config.length:
            raise ValueError(
                f"model input dim {params.spec.input_dim} != feature length {config.length}"
            )
        self.params = params
        self.config = config

    def score_pairs(self, nbest: NBestList, pairs, table) -> np.ndarray:
        ctx = FeatureContext(nbest, table, self.config)
        feats = np.array([ctx.features(i, j) for i, j in pairs])
        return forward_batch(self.params, feats)


class ConstantScorer:
    """Fixed-output scorer, mainly for tests and tie-rule checks."""

    def __init__(self, value: float = 0.5):
        self.value = value

    def score_pairs(self, nbest, pairs, table) -> np.ndarray:
        return np.full(len(pairs), self.value)


class ExternalScorer:
    """Client for a child process implementing the pair-scoring protocol."""

    def __init__(self, command: Sequence[str], timeout: float = 30.0):
        self.timeout = timeout
        try:
            self.proc = subprocess.Popen(
                list(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise ScorerProcessError(f"cannot start scorer: {exc}") from None
        self._next_id = 1
        self._lines: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()
        self._handshake()

    def _read_loop(self):
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)  # EOF marker

    def _send(self, obj):
        try:
            self.proc.stdin.write(json.dumps(obj) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ScorerProcessError(f"scorer process is gone: {exc}") from None

    def _recv(self) -> dict:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise ScorerTimeoutError(f"no response within {self.timeout}s") from None
        if line is None:
            code = self.proc.poll()
            raise ScorerProcessError(f"scorer closed its output (exit code {code})")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            raise ScorerProtocolError(f"malformed response line {line!r}") from None
        if not isinstance(obj, dict):
            raise ScorerProtocolError(f"malformed response line {line!r}")
        return obj

    def _handshake(self):
        self._send({"op": "hello", "version": PROTOCOL_VERSION})
        reply = self._recv()
        if reply.get("ok") is not True or reply.get("version") != PROTOCOL_VERSION:
            raise ScorerProtocolError(f"handshake rejected: {reply!r}")

    def score_pair(self, tokens_a, tokens_b) -> float:
        req_id = self._next_id
        self._next_id += 1
        self._send(
            {"id": req_id, "op": "score_pair", "hyp_a": list(tokens_a), "hyp_b": list(tokens_b)}
        )
        reply = self._recv()
        if "error" in reply:
            raise ScorerProtocolError(f"scorer error: {reply['error']}")
        if reply.get("id") != req_id:
            raise ScorerIdMismatchError(f"expected id {req_id}, got {reply.get('id')!r}")
        v = reply.get("v")
        if not isinstance(v, (int, float)):
            raise ScorerProtocolError(f"missing or non-numeric v in {reply!r}")
        if v < V_CLAMP or v > 1.0 - V_CLAMP:
            log.warning("scorer value %g outside (0,1), clamping", v)
            v = min(max(v, V_CLAMP), 1.0 - V_CLAMP)
        return float(v)

    def score_pairs(self, nbest: NBestList, pairs, table) -> np.ndarray:
        # serialized per process: the protocol is strict request/response
        return np.array(
            [
                self.score_pair(nbest.hypotheses[i].tokens, nbest.hypotheses[j].tokens)
                for i, j in pairs
            ]
        )

    def close(self):
        if self.proc.stdin and not self.proc.stdin.closed:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
        try:
            self.proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self.proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
