"""Vectorized exponential-sum tables for one field extension (internal).

Everything is indexed by the discrete log u of x = G^u for a pinned generator
G of F_{q^k}^*.  The tables give: element code -> log (INDEX), the Zech shift
log(G^u + 1) (ZECH), and Teichmueller trace rows TT_j[u] = Tr(Teich(G^u)) in
Z/p^j.  Packed Witt traces and tame discrete-log classes then reduce to a few
gathers per point, so a full F_{q^k} sweep is a handful of numpy passes.
"""

from __future__ import annotations

import random
from functools import lru_cache

import numpy as np

from .arith import (
    ArithError,
    FieldDesc,
    Fq,
    _prime_factors,
    galois_ring,
    galois_trace,
    make_extension,
    teichmuller_lift,
)
from .cyclotomic import canonical_generator

SENT = -1  # log of zero
GENERATOR_SEED = "artinl-generator-v1"
_BLOCK = 1 << 12


def _find_generator(field: FieldDesc) -> Fq:
    """Deterministic seeded search for a generator of F_Q^*."""
    order = field.q - 1
    factors = _prime_factors(order)
    rng = random.Random(f"{GENERATOR_SEED}:{field.p}:{field.m}")
    for _ in range(4096):
        coeffs = [rng.randrange(field.p) for _ in range(field.m)]
        cand = field.element(coeffs)
        if not cand:
            continue
        if all(cand ** (order // ell) != field.one() for ell in factors):
            return cand
    raise ArithError("generator search exhausted its attempts")


def _mult_matrix(field: FieldDesc, g: Fq, mod: int) -> np.ndarray:
    """Matrix of multiplication by g on the power basis, entries mod `mod`."""
    m = field.m
    cols = []
    theta = field.element([0, 1]) if m > 1 else field.one()
    basis = field.one()
    for _ in range(m):
        prod = g * basis
        cols.append([c % mod for c in prod.coeffs])
        basis = basis * theta
    return np.array(cols, dtype=np.int64).T % mod


def _gr_mult_matrix(ring, g, mod: int) -> np.ndarray:
    m = ring.m
    cols = []
    for l in range(m):
        e = [0] * m
        e[l] = 1
        prod = g * ring.element(e)
        cols.append(list(prod.coeffs))
    return np.array(cols, dtype=np.int64).T % mod


@lru_cache(maxsize=4)
def sum_tables(base: FieldDesc, k: int, n: int) -> SumTables:
    return SumTables(base, k, n)


class SumTables:
    """Log-space tables for F_{q^k} over a base F_q, plus Witt trace rows."""

    def __init__(self, base: FieldDesc, k: int, n: int):
        self.base = base
        self.k = k
        self.n = n
        self.ext = make_extension(base, k)
        self.field = self.ext.field
        self.Q = self.field.q
        self.M = self.Q - 1
        self.gen = _find_generator(self.field)
        self._build_logs()
        self._build_traces()
        self._build_norm_class()
        self.pinv = tuple(pow(base.p, -i, self.M) if i else 1 for i in range(n))

    # -- construction ---------------------------------------------------

    def _build_logs(self) -> None:
        field, Q, M = self.field, self.Q, self.M
        p, m = field.p, field.m
        ppow = np.array([p**j for j in range(m)], dtype=np.int64)
        B = min(_BLOCK, M)
        mg = _mult_matrix(field, self.gen, p)
        # first block: columns G^0 .. G^(B-1)
        X = np.zeros((m, B), dtype=np.int64)
        X[0, 0] = 1
        for j in range(1, B):
            X[:, j] = mg @ X[:, j - 1] % p
        gB = self.gen**B
        mgB = _mult_matrix(field, gB, p)
        codes = np.empty(M, dtype=np.int64)
        base_idx = 0
        while base_idx < M:
            width = min(B, M - base_idx)
            codes[base_idx : base_idx + width] = ppow @ X[:, :width]
            base_idx += width
            if base_idx < M:
                X = mgB @ X % p
        index = np.full(Q, SENT, dtype=np.int32)
        index[codes] = np.arange(M, dtype=np.int32)
        # a full enumeration certifies the generator's order
        assert int(np.count_nonzero(index == SENT)) == 1 and index[0] == SENT
        d0 = codes % p
        plus1 = codes - d0 + (d0 + 1) % p
        self.index = index
        self.zech = index[plus1]
        self.codes = codes.astype(np.int32)

    def _build_traces(self) -> None:
        field, M = self.field, self.M
        p, m = field.p, field.m
        B = min(_BLOCK, M)
        tt = []
        for j in range(1, self.n + 1):
            ring = galois_ring(field, j)
            pj = p**j
            xi = teichmuller_lift(self.gen, j)
            tau = np.array(
                [galois_trace(ring.element([0] * l + [1])) for l in range(m)],
                dtype=np.int64,
            )
            mxi = _gr_mult_matrix(ring, xi, pj)
            mxiB = _gr_mult_matrix(ring, xi**B, pj)
            Y = np.zeros((m, B), dtype=np.int64)
            Y[0, 0] = 1
            for col in range(1, B):
                Y[:, col] = mxi @ Y[:, col - 1] % pj
            row = np.empty(M, dtype=np.int32)
            base_idx = 0
            while base_idx < M:
                width = min(B, M - base_idx)
                row[base_idx : base_idx + width] = tau @ Y[:, :width] % pj
                base_idx += width
                if base_idx < M:
                    Y = mxiB @ Y % pj
            tt.append(row)
        self.tt = tuple(tt)

    def _build_norm_class(self) -> None:
        base, field = self.base, self.field
        norm_gen = self.gen ** ((self.Q - 1) // (base.q - 1))
        wbar = canonical_generator(base)
        img = self.ext.embed(wbar)
        acc = field.one()
        for c in range(base.q - 1):
            if acc == norm_gen:
                self.norm_dlog = c
                return
            acc = acc * img
        raise ArithError("norm of the generator is not in the base group")

    # -- log-space primitives --------------------------------------------

    def log_of(self, x: Fq) -> int:
        if x.desc != self.field:
            raise ArithError("element not in the table field")
        if not x:
            return SENT
        return int(self.index[x.to_int_code()])

    def log_add_scalar(self, A: np.ndarray, b: int) -> np.ndarray:
        """Pointwise log(G^A + G^b); SENT encodes zero on both sides."""
        if b == SENT:
            return A
        M = self.M
        empty = A == SENT
        diff = (A - b) % M
        # int64 keeps downstream products like log * p^{-k} from overflowing
        z = self.zech[np.where(empty, 0, diff)].astype(np.int64)
        out = np.where(z == SENT, SENT, (b + z) % M)
        return np.where(empty, b, out)

    def eval_poly_logs(self, coeff_logs: list[int]) -> np.ndarray:
        """Logs of poly(G^u) for u = 0..Q-2, Horner in log space."""
        M = self.M
        u = np.arange(M, dtype=np.int64)
        if not coeff_logs:
            return np.full(M, SENT, dtype=np.int64)
        acc = np.full(M, coeff_logs[-1], dtype=np.int64)
        for b in reversed(coeff_logs[:-1]):
            acc = np.where(acc == SENT, SENT, (acc + u) % M)
            acc = self.log_add_scalar(acc, b)
        return acc

    def trace_of_packed(self, coord_logs: list[np.ndarray]) -> np.ndarray:
        """Tr(pack(a_0..a_{n-1})) in Z/p^n from the coordinate logs."""
        p, n, M = self.base.p, self.n, self.M
        pn = p**n
        total = np.zeros(M, dtype=np.int64)
        for i, logs in enumerate(coord_logs):
            idx = logs.astype(np.int64) * self.pinv[i] % M
            vals = self.tt[n - 1 - i][np.where(logs == SENT, 0, idx)]
            vals = np.where(logs == SENT, 0, vals)
            total = (total + vals * p**i) % pn
        return total
