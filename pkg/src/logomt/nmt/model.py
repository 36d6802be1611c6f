"""Encoder-decoder LSTM with additive attention, in plain float64 numpy.

Everything here is written for exactness rather than speed: hand-rolled
backpropagation through time that a finite-difference harness can verify
to high precision, and bitwise-reproducible runs under a fixed seed.

Layout conventions: batch-first arrays; LSTM gate blocks stacked in the
order input, forget, cell, output; decoder states start from the encoder's
final states layer by layer; attention reads the encoder's top layer. The
output projection consumes the decoder top state concatenated with the
attention context.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .vocab import PAD_ID

INIT_SCALE = 0.1
NEG_INF = -1e30


@dataclass(frozen=True)
class Dims:
    d_emb: int = 16
    d_hidden: int = 32
    n_layers: int = 2

    def __post_init__(self):
        if min(self.d_emb, self.d_hidden, self.n_layers) < 1:
            raise ValueError("dims must be positive")


class Seq2SeqModel:
    """Parameter container plus attention scoring.

    params maps name -> float64 array. With a shared vocabulary both sides
    read one embedding table under the key "emb"; otherwise "emb_src" and
    "emb_tgt" are separate.
    """

    def __init__(
        self,
        dims: Dims,
        src_vocab_size: int,
        tgt_vocab_size: int,
        shared: bool,
        normalized_attention: bool,
        params: dict[str, np.ndarray],
    ):
        self.dims = dims
        self.src_vocab_size = src_vocab_size
        self.tgt_vocab_size = tgt_vocab_size
        self.shared = shared
        self.normalized_attention = normalized_attention
        self.params = params

    @property
    def src_emb(self) -> np.ndarray:
        return self.params["emb" if self.shared else "emb_src"]

    @property
    def tgt_emb(self) -> np.ndarray:
        return self.params["emb" if self.shared else "emb_tgt"]

    def score_vector(self) -> np.ndarray:
        v = self.params["att_v"]
        if not self.normalized_attention:
            return v
        return self.params["att_g"] * v / np.linalg.norm(v)

    def attention_weights(self, query: np.ndarray, keys: np.ndarray) -> np.ndarray:
        """Additive attention for one query (d_hidden,) over keys (n, d_hidden)."""
        p = self.params
        e = np.tanh(query @ p["att_Wq"].T + keys @ p["att_Wk"].T)
        scores = e @ self.score_vector()
        scores = scores - scores.max()
        w = np.exp(scores)
        return w / w.sum()

    def param_names(self) -> list[str]:
        return list(self.params)

    def copy(self) -> "Seq2SeqModel":
        return Seq2SeqModel(
            self.dims,
            self.src_vocab_size,
            self.tgt_vocab_size,
            self.shared,
            self.normalized_attention,
            {k: v.copy() for k, v in self.params.items()},
        )


def init_model(
    dims: Dims,
    src_vocab_size: int,
    tgt_vocab_size: int,
    shared: bool = False,
    normalized_attention: bool = True,
    seed: int = 0,
) -> Seq2SeqModel:
    """All parameters uniform on [-0.1, 0.1], drawn in a fixed documented
    order: embeddings, encoder layers, decoder layers, attention, output."""
    if src_vocab_size < 1 or tgt_vocab_size < 1:
        raise ValueError("vocabularies must be non-empty")
    if shared and src_vocab_size != tgt_vocab_size:
        raise ValueError("shared embeddings need equal vocabulary sizes")
    rng = np.random.default_rng(seed)
    E, H, L = dims.d_emb, dims.d_hidden, dims.n_layers

    def u(*shape):
        return rng.uniform(-INIT_SCALE, INIT_SCALE, size=shape)

    params: dict[str, np.ndarray] = {}
    if shared:
        params["emb"] = u(src_vocab_size, E)
    else:
        params["emb_src"] = u(src_vocab_size, E)
        params["emb_tgt"] = u(tgt_vocab_size, E)
    for side in ("enc", "dec"):
        for layer in range(L):
            d_in = E if layer == 0 else H
            params[f"{side}{layer}_W"] = u(4 * H, d_in)
            params[f"{side}{layer}_U"] = u(4 * H, H)
            params[f"{side}{layer}_b"] = u(4 * H)
    params["att_Wq"] = u(H, H)
    params["att_Wk"] = u(H, H)
    params["att_v"] = u(H)
    if normalized_attention:
        params["att_g"] = u()
    params["out_W"] = u(tgt_vocab_size, 2 * H)
    params["out_b"] = u(tgt_vocab_size)
    return Seq2SeqModel(
        dims, src_vocab_size, tgt_vocab_size, shared, normalized_attention, params
    )


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _lstm_step(W, U, b, x, h_prev, c_prev, mask):
    """One masked cell update. mask (B, 1) keeps padded rows frozen."""
    H = h_prev.shape[1]
    z = x @ W.T + h_prev @ U.T + b
    i = _sigmoid(z[:, :H])
    f = _sigmoid(z[:, H : 2 * H])
    g = np.tanh(z[:, 2 * H : 3 * H])
    o = _sigmoid(z[:, 3 * H :])
    c_new = f * c_prev + i * g
    tc = np.tanh(c_new)
    h_new = o * tc
    c = mask * c_new + (1.0 - mask) * c_prev
    h = mask * h_new + (1.0 - mask) * h_prev
    cache = (x, h_prev, c_prev, i, f, g, o, c_new, tc, mask)
    return h, c, cache


def _lstm_step_back(W, U, dh, dc, cache, grads, prefix):
    x, h_prev, c_prev, i, f, g, o, c_new, tc, mask = cache
    dh_new = dh * mask
    dh_prev = dh * (1.0 - mask)
    dc_new = dc * mask
    dc_prev = dc * (1.0 - mask)

    do = dh_new * tc
    dc_new = dc_new + dh_new * o * (1.0 - tc * tc)
    df = dc_new * c_prev
    di = dc_new * g
    dg = dc_new * i
    dc_prev = dc_prev + dc_new * f

    dz = np.concatenate(
        [
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ],
        axis=1,
    )
    grads[prefix + "_W"] += dz.T @ x
    grads[prefix + "_U"] += dz.T @ h_prev
    grads[prefix + "_b"] += dz.sum(axis=0)
    dx = dz @ W
    dh_prev = dh_prev + dz @ U
    return dx, dh_prev, dc_prev


def _dropout_mask(rng, shape, rate):
    return (rng.random(shape) >= rate) / (1.0 - rate)


def _check_ids(ids: np.ndarray, size: int, side: str) -> np.ndarray:
    ids = np.asarray(ids, dtype=np.int64)
    if ids.ndim != 2:
        raise ValueError(f"{side} ids must be a 2-d batch")
    if ids.size and (ids.min() < 0 or ids.max() >= size):
        raise ValueError(f"{side} id outside vocabulary of {size}")
    return ids


def forward(
    model: Seq2SeqModel,
    src_ids: np.ndarray,
    tgt_in_ids: np.ndarray,
    tgt_out_ids: np.ndarray,
    dropout: float = 0.0,
    rng: np.random.Generator | None = None,
):
    """Teacher-forced pass.

    src_ids (B, S) and tgt_out_ids (B, T) end with the end-of-sentence id
    and are padded with pad; tgt_in_ids is the begin-shifted target. Returns
    (loss, attention (B, T, S), cache). Loss is the mean cross-entropy over
    non-pad target positions. Dropout hits embeddings and the connections
    between stacked layers, never the recurrence.
    """
    p = model.params
    dims = model.dims
    E, H, L = dims.d_emb, dims.d_hidden, dims.n_layers
    src_ids = _check_ids(src_ids, model.src_vocab_size, "source")
    tgt_in_ids = _check_ids(tgt_in_ids, model.tgt_vocab_size, "target")
    tgt_out_ids = _check_ids(tgt_out_ids, model.tgt_vocab_size, "target")
    if tgt_out_ids.shape[1] == 0 or not (tgt_out_ids != PAD_ID).any():
        raise ValueError("empty target batch")
    if dropout and rng is None:
        raise ValueError("dropout needs an rng")

    B, S = src_ids.shape
    T = tgt_in_ids.shape[1]
    src_mask = (src_ids != PAD_ID).astype(np.float64)  # (B, S)
    tgt_mask = (tgt_out_ids != PAD_ID).astype(np.float64)  # (B, T)

    def maybe_drop(x):
        if dropout:
            m = _dropout_mask(rng, x.shape, dropout)
            return x * m, m
        return x, None

    # encoder
    enc_inputs = model.src_emb[src_ids]  # (B, S, E)
    x, src_emb_mask = maybe_drop(enc_inputs)
    enc_caches: list[list[tuple]] = []
    enc_drop_masks: list[np.ndarray | None] = [src_emb_mask]
    enc_final_h: list[np.ndarray] = []
    enc_final_c: list[np.ndarray] = []
    for layer in range(L):
        W, U, b = p[f"enc{layer}_W"], p[f"enc{layer}_U"], p[f"enc{layer}_b"]
        h = np.zeros((B, H))
        c = np.zeros((B, H))
        outs = np.empty((B, S, H))
        caches = []
        for t in range(S):
            h, c, cache = _lstm_step(W, U, b, x[:, t], h, c, src_mask[:, t : t + 1])
            outs[:, t] = h
            caches.append(cache)
        enc_caches.append(caches)
        enc_final_h.append(h)
        enc_final_c.append(c)
        if layer + 1 < L:
            x, m = maybe_drop(outs)
            enc_drop_masks.append(m)
        else:
            x = outs
    keys = x  # (B, S, H), encoder top layer

    # attention precomputation
    kp = keys @ p["att_Wk"].T  # (B, S, H)
    v_eff = model.score_vector()

    # decoder
    dec_inputs = model.tgt_emb[tgt_in_ids]  # (B, T, E)
    dec_in, tgt_emb_mask = maybe_drop(dec_inputs)
    dec_h = [h.copy() for h in enc_final_h]
    dec_c = [c.copy() for c in enc_final_c]
    dec_caches: list[list[tuple]] = [[] for _ in range(L)]
    dec_drop_masks: list[list[np.ndarray | None]] = [[] for _ in range(max(L - 1, 0))]
    att = np.zeros((B, T, S))
    att_caches = []
    logits = np.empty((B, T, model.tgt_vocab_size))
    concat = np.empty((B, T, 2 * H))
    for t in range(T):
        x_t = dec_in[:, t]
        m_t = tgt_mask[:, t : t + 1]
        for layer in range(L):
            W, U, b = p[f"dec{layer}_W"], p[f"dec{layer}_U"], p[f"dec{layer}_b"]
            h, c, cache = _lstm_step(W, U, b, x_t, dec_h[layer], dec_c[layer], m_t)
            dec_h[layer], dec_c[layer] = h, c
            dec_caches[layer].append(cache)
            if layer + 1 < L:
                if dropout:
                    dm = _dropout_mask(rng, h.shape, dropout)
                    x_t = h * dm
                    dec_drop_masks[layer].append(dm)
                else:
                    x_t = h
                    dec_drop_masks[layer].append(None)
        d_t = dec_h[L - 1]  # (B, H)
        qp = d_t @ p["att_Wq"].T  # (B, H)
        e = np.tanh(kp + qp[:, None, :])  # (B, S, H)
        scores = e @ v_eff  # (B, S)
        scores = np.where(src_mask > 0, scores, NEG_INF)
        scores = scores - scores.max(axis=1, keepdims=True)
        expd = np.exp(scores)
        alpha = expd / expd.sum(axis=1, keepdims=True)  # (B, S)
        ctx = (alpha[:, :, None] * keys).sum(axis=1)  # (B, H)
        u_t = np.concatenate([d_t, ctx], axis=1)  # (B, 2H)
        att[:, t] = alpha
        concat[:, t] = u_t
        logits[:, t] = u_t @ p["out_W"].T + p["out_b"]
        att_caches.append((e, alpha, d_t, ctx))

    # softmax cross-entropy over non-pad positions
    shifted = logits - logits.max(axis=2, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=2, keepdims=True)
    idx_b, idx_t = np.indices(tgt_out_ids.shape)
    n_tokens = tgt_mask.sum()
    # log(0) = -inf is wanted here: a saturated wrong prediction shows up
    # as an infinite loss and trips the divergence guard upstream
    with np.errstate(divide="ignore", invalid="ignore"):
        token_logp = np.log(probs[idx_b, idx_t, tgt_out_ids])
        loss = -(token_logp * tgt_mask).sum() / n_tokens

    cache = {
        "src_ids": src_ids,
        "tgt_in_ids": tgt_in_ids,
        "tgt_out_ids": tgt_out_ids,
        "src_mask": src_mask,
        "tgt_mask": tgt_mask,
        "probs": probs,
        "concat": concat,
        "keys": keys,
        "kp": kp,
        "enc_caches": enc_caches,
        "dec_caches": dec_caches,
        "att_caches": att_caches,
        "enc_drop_masks": enc_drop_masks,
        "tgt_emb_mask": tgt_emb_mask,
        "dec_drop_masks": dec_drop_masks,
        "n_tokens": n_tokens,
        "dropout": dropout,
    }
    return loss, att, cache


def backward(model: Seq2SeqModel, cache: dict) -> dict[str, np.ndarray]:
    """Exact gradients of the forward loss for every parameter."""
    p = model.params
    dims = model.dims
    H, L = dims.d_hidden, dims.n_layers
    B, S = cache["src_ids"].shape
    T = cache["tgt_in_ids"].shape[1]

    grads = {k: np.zeros_like(v) for k, v in p.items()}
    v = p["att_v"]
    if model.normalized_attention:
        nv = np.linalg.norm(v)
        unit = v / nv
        v_eff = p["att_g"] * unit
    else:
        v_eff = v

    # cross-entropy
    dlogits = cache["probs"].copy()  # (B, T, V)
    idx_b, idx_t = np.indices(cache["tgt_out_ids"].shape)
    dlogits[idx_b, idx_t, cache["tgt_out_ids"]] -= 1.0
    dlogits *= cache["tgt_mask"][:, :, None] / cache["n_tokens"]

    grads["out_W"] += np.einsum("btv,bth->vh", dlogits, cache["concat"])
    grads["out_b"] += dlogits.sum(axis=(0, 1))
    du = dlogits @ p["out_W"]  # (B, T, 2H)

    keys = cache["keys"]
    dkeys = np.zeros_like(keys)
    dkp = np.zeros_like(cache["kp"])
    dv_eff = np.zeros(H)

    dh_carry = [np.zeros((B, H)) for _ in range(L)]
    dc_carry = [np.zeros((B, H)) for _ in range(L)]
    d_dec_emb = np.zeros((B, T, dims.d_emb))

    dropout = cache["dropout"]
    for t in range(T - 1, -1, -1):
        dd_t = du[:, t, :H].copy()
        dctx = du[:, t, H:]
        e, alpha, d_t, _ctx = cache["att_caches"][t]

        dalpha = (keys * dctx[:, None, :]).sum(axis=2)  # (B, S)
        dkeys += alpha[:, :, None] * dctx[:, None, :]
        dscores = alpha * (dalpha - (alpha * dalpha).sum(axis=1, keepdims=True))
        dv_eff += np.einsum("bs,bsh->h", dscores, e)
        dpre = dscores[:, :, None] * v_eff[None, None, :] * (1.0 - e * e)
        dqp = dpre.sum(axis=1)  # (B, H)
        dkp += dpre
        grads["att_Wq"] += dqp.T @ d_t
        dd_t += dqp @ p["att_Wq"]

        # decoder stack, top layer first
        dx = None
        for layer in range(L - 1, -1, -1):
            dh = dh_carry[layer]
            if layer == L - 1:
                dh = dh + dd_t
            else:
                dm = cache["dec_drop_masks"][layer][t]
                dh = dh + (dx * dm if dm is not None else dx)
            dx, dh_prev, dc_prev = _lstm_step_back(
                p[f"dec{layer}_W"],
                p[f"dec{layer}_U"],
                dh,
                dc_carry[layer],
                cache["dec_caches"][layer][t],
                grads,
                f"dec{layer}",
            )
            dh_carry[layer] = dh_prev
            dc_carry[layer] = dc_prev
        d_dec_emb[:, t] = dx

    # decoder embeddings
    if cache["tgt_emb_mask"] is not None:
        d_dec_emb *= cache["tgt_emb_mask"]
    tgt_emb_key = "emb" if model.shared else "emb_tgt"
    np.add.at(grads[tgt_emb_key], cache["tgt_in_ids"], d_dec_emb)

    # attention parameter grads
    grads["att_Wk"] += np.einsum("bsh,bsd->hd", dkp, keys)
    dkeys += dkp @ p["att_Wk"]
    if model.normalized_attention:
        grads["att_g"] += np.array(dv_eff @ unit)
        grads["att_v"] += (p["att_g"] / nv) * (dv_eff - unit * (unit @ dv_eff))
    else:
        grads["att_v"] += dv_eff

    # encoder, top layer down; decoder initial states came from final states
    d_layer_out = dkeys  # (B, S, H) gradient on current layer's outputs
    for layer in range(L - 1, -1, -1):
        dh_carry_e = dh_carry[layer]
        dc_carry_e = dc_carry[layer]
        dx_seq = np.empty((B, S, p[f"enc{layer}_W"].shape[1]))
        for t in range(S - 1, -1, -1):
            dh = dh_carry_e + d_layer_out[:, t]
            dx, dh_carry_e, dc_carry_e = _lstm_step_back(
                p[f"enc{layer}_W"],
                p[f"enc{layer}_U"],
                dh,
                dc_carry_e,
                cache["enc_caches"][layer][t],
                grads,
                f"enc{layer}",
            )
            dx_seq[:, t] = dx
        dm = cache["enc_drop_masks"][layer]
        if dm is not None:
            dx_seq = dx_seq * dm
        d_layer_out = dx_seq

    src_emb_key = "emb" if model.shared else "emb_src"
    np.add.at(grads[src_emb_key], cache["src_ids"], d_layer_out)
    return grads


def grad_check(
    dims: Dims = Dims(d_emb=4, d_hidden=4, n_layers=1),
    src_vocab_size: int = 7,
    tgt_vocab_size: int = 6,
    batch: int = 2,
    src_len: int = 3,
    tgt_len: int = 3,
    shared: bool = False,
    normalized_attention: bool = True,
    epsilon: float = 1e-4,
    seed: int = 0,
) -> float:
    """Max relative error between backward and central finite differences.

    Relative error uses |a - b| / max(|a| + |b|, 1e-4); the floor keeps
    round-off noise on near-zero gradients from dominating.
    """
    rng = np.random.default_rng(seed)
    if shared:
        tgt_vocab_size = src_vocab_size
    model = init_model(
        dims,
        src_vocab_size,
        tgt_vocab_size,
        shared=shared,
        normalized_attention=normalized_attention,
        seed=seed,
    )
    src = rng.integers(1, src_vocab_size, size=(batch, src_len))
    tgt_in = rng.integers(1, tgt_vocab_size, size=(batch, tgt_len))
    tgt_out = rng.integers(1, tgt_vocab_size, size=(batch, tgt_len))
    # one padded row exercises the masks
    if batch > 1 and src_len > 1 and tgt_len > 1:
        src[-1, -1] = PAD_ID
        tgt_out[-1, -1] = PAD_ID

    loss, _, cache = forward(model, src, tgt_in, tgt_out)
    assert np.isfinite(loss)
    grads = backward(model, cache)

    worst = 0.0
    for name, theta in model.params.items():
        flat = theta.reshape(-1)
        gflat = grads[name].reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + epsilon
            up, _, _ = forward(model, src, tgt_in, tgt_out)
            flat[j] = orig - epsilon
            down, _, _ = forward(model, src, tgt_in, tgt_out)
            flat[j] = orig
            fd = (up - down) / (2.0 * epsilon)
            err = abs(gflat[j] - fd) / max(abs(gflat[j]) + abs(fd), 1e-4)
            worst = max(worst, err)
    return worst


def iter_minibatches(
    n: int, batch_size: int, rng: np.random.Generator
) -> Iterator[np.ndarray]:
    """Endless stream of index batches, reshuffled each epoch."""
    while True:
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            yield order[start : start + batch_size]
