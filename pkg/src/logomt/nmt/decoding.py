"""Greedy and beam-search decoding.

Both searches are deterministic: score ties always fall to the lower
token id, and beam hypotheses with equal scores break by insertion
order. Hypothesis scores are raw summed log-probabilities with no
length normalization, so a width-1 beam must reproduce greedy output
exactly; the two are kept as independent code paths for that reason.
"""

from __future__ import annotations

import numpy as np

from .model import Seq2SeqModel, _sigmoid
from .vocab import BOS_ID, EOS_ID


def _cell(W, U, b, x, h, c):
    H = h.shape[0]
    z = W @ x + U @ h + b
    i = _sigmoid(z[:H])
    f = _sigmoid(z[H : 2 * H])
    g = np.tanh(z[2 * H : 3 * H])
    o = _sigmoid(z[3 * H :])
    c_new = f * c + i * g
    return o * np.tanh(c_new), c_new


class _Search:
    """Encoder output plus a single-step decoder for one source sentence."""

    def __init__(self, model: Seq2SeqModel, src_ids: list[int]):
        self.model = model
        p = model.params
        H, L = model.dims.d_hidden, model.dims.n_layers
        h = [np.zeros(H) for _ in range(L)]
        c = [np.zeros(H) for _ in range(L)]
        keys = np.empty((len(src_ids), H))
        for t, tok in enumerate(src_ids):
            x = model.src_emb[tok]
            for layer in range(L):
                h[layer], c[layer] = _cell(
                    p[f"enc{layer}_W"],
                    p[f"enc{layer}_U"],
                    p[f"enc{layer}_b"],
                    x,
                    h[layer],
                    c[layer],
                )
                x = h[layer]
            keys[t] = h[L - 1]
        self.keys = keys
        self.kp = keys @ p["att_Wk"].T
        self.v_eff = model.score_vector()
        self.init_h = h
        self.init_c = c

    def step(self, token_id: int, h: list[np.ndarray], c: list[np.ndarray]):
        """Advance one target position; returns (log_probs, new_h, new_c)."""
        p = self.model.params
        L = self.model.dims.n_layers
        x = self.model.tgt_emb[token_id]
        h = list(h)
        c = list(c)
        for layer in range(L):
            h[layer], c[layer] = _cell(
                p[f"dec{layer}_W"],
                p[f"dec{layer}_U"],
                p[f"dec{layer}_b"],
                x,
                h[layer],
                c[layer],
            )
            x = h[layer]
        d = h[L - 1]
        e = np.tanh(self.kp + d @ p["att_Wq"].T)
        scores = e @ self.v_eff
        scores -= scores.max()
        w = np.exp(scores)
        alpha = w / w.sum()
        ctx = alpha @ self.keys
        logits = p["out_W"] @ np.concatenate([d, ctx]) + p["out_b"]
        shifted = logits - logits.max()
        logp = shifted - np.log(np.exp(shifted).sum())
        return logp, h, c


def _default_max_len(src_ids: list[int]) -> int:
    return 2 * len(src_ids) + 10


def greedy_decode(
    model: Seq2SeqModel, src_ids: list[int], max_len: int | None = None
) -> list[int]:
    """Argmax decoding; the returned ids carry no end-of-sentence marker."""
    if not src_ids:
        return []
    limit = max_len if max_len is not None else _default_max_len(src_ids)
    search = _Search(model, src_ids)
    h, c = search.init_h, search.init_c
    out: list[int] = []
    tok = BOS_ID
    for _ in range(limit):
        logp, h, c = search.step(tok, h, c)
        tok = int(logp.argmax())  # first maximum, hence lowest id on ties
        if tok == EOS_ID:
            break
        out.append(tok)
    return out


def beam_decode(
    model: Seq2SeqModel,
    src_ids: list[int],
    beam_size: int = 5,
    max_len: int | None = None,
) -> list[int]:
    """Beam search over summed log-probabilities."""
    if beam_size < 1:
        raise ValueError("beam_size must be >= 1")
    if not src_ids:
        return []
    limit = max_len if max_len is not None else _default_max_len(src_ids)
    search = _Search(model, src_ids)

    # hypothesis: (score, tokens, h, c)
    live = [(0.0, [], search.init_h, search.init_c)]
    finished: list[tuple[float, list[int]]] = []
    for _ in range(limit):
        candidates = []  # (score, token, hyp_index)
        steps = []
        for i, (score, tokens, h, c) in enumerate(live):
            prev = tokens[-1] if tokens else BOS_ID
            logp, nh, nc = search.step(prev, h, c)
            steps.append((nh, nc))
            for tok in range(logp.shape[0]):
                candidates.append((score + logp[tok], tok, i))
        candidates.sort(key=lambda cand: (-cand[0], cand[1], cand[2]))
        next_live = []
        for score, tok, i in candidates:
            if len(next_live) == beam_size:
                break
            if tok == EOS_ID:
                finished.append((score, live[i][1]))
            else:
                nh, nc = steps[i]
                next_live.append((score, live[i][1] + [tok], nh, nc))
        live = next_live
        if not live:
            break
        if len(finished) >= beam_size:
            best_finished = max(s for s, _ in finished)
            if best_finished >= live[0][0]:
                break
    pool = finished + [(score, tokens) for score, tokens, _, _ in live]
    pool.sort(key=lambda item: (-item[0], item[1]))
    return pool[0][1]


def translate(
    model: Seq2SeqModel,
    src_ids: list[int],
    beam_size: int = 1,
    max_len: int | None = None,
) -> list[int]:
    """Decode one sentence of source ids into target ids."""
    if beam_size == 1:
        return greedy_decode(model, src_ids, max_len)
    return beam_decode(model, src_ids, beam_size, max_len)


def translate_corpus(
    model: Seq2SeqModel,
    corpus: list[list[int]],
    beam_size: int = 1,
    max_len: int | None = None,
) -> list[list[int]]:
    return [translate(model, ids, beam_size, max_len) for ids in corpus]
