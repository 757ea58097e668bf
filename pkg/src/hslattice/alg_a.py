"""Classical end-to-end simulation of the infinite-index abelian HSP recovery.

The quantum Fourier stage is replaced by its exact sampling model: a uniform
dual-group point plus orthogonal Gaussian noise, rasterized to the 1/Q grid.
The classical stages are implemented in full: the flattened (k+1)-dimensional
lattice, LLL, short-prefix rank inference, echelonization against a
max-determinant row selection, continued-fraction denoising with denominator
cutoff R, and the rational Smith normal form that yields an integral basis of
the saturation H_1.  A final exact finite-group stage (the classical stand-in
for Shor--Kitaev on the finite-index preimage) recovers the hidden lattice
inside H_1.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Tuple

from .lattice import (
    Lattice,
    TorusVec,
    dual_sample_uniform,
    lattice_from_generators,
)
from .lll import lll
from .matrix import IntMatrix, RatMatrix, snf_rational
from .rationals import legendre_reconstruct


class ScheduleOverflow(ValueError):
    """Requested parameters exceed the configured bit-length ceiling."""


PARAM_BIT_CEILING = 1 << 20

# 2*sqrt(pi) to 17 significant digits; fixes the Gaussian width s/(2 sqrt(pi))
# as an exact rational.
_TWO_SQRT_PI = Fraction(35449077018110322, 10 ** 16)


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


@dataclass(frozen=True)
class AlgAParams:
    """Power-of-two parameter schedule for the recovery pipeline.

    Q is the measurement grid radix, R the denominator cutoff (r = 1/R the
    short-vector threshold), R1 and Lambda the collimation-free short-vector
    and multiplier bounds, T the flattening (t = 1/T), S the Gaussian
    sharpness (s = 1/S)."""

    n: int
    k: int
    Q: int
    R: int
    R1: int
    Lambda: int
    T: int
    S: int
    retries: int = 8
    c_exponent: int = 1

    def validate(self) -> None:
        n, k = self.n, self.k
        delta_bound = 1 << (2 * n)
        assert self.R >= 1 << (2 * n + 1)
        assert self.R >= k + 1
        assert self.R * self.R >= k + 1
        assert self.R1 >= delta_bound and self.R1 >= 1 << k
        assert self.R1 >= (1 << (k + 1)) * self.R
        assert self.Lambda == self.R1 ** (self.c_exponent * k)
        assert self.T >= self.Lambda * self.R1 and self.T > 1
        assert self.S >= delta_bound * delta_bound
        assert self.S * self.S >= self.Lambda * self.Lambda * k
        assert self.S * self.S > self.T * self.T * k
        assert self.S >= 2 * self.T * self.T
        assert self.S >= 4 * self.R * self.R * self.T ** 3
        assert self.Q >= self.S * self.S

    def escalated(self) -> "AlgAParams":
        """One doubling-on-failure step: T doubles, S and Q follow."""
        T = 2 * self.T
        S = max(16 * self.S, 4 * self.R * self.R * T ** 3)
        S = _next_pow2(S)
        p = replace(self, T=T, S=S, Q=S * S)
        p.validate()
        return p


def schedule(n: int, k: int, retries: int = 8, c_exponent: int = 1) -> AlgAParams:
    """Smallest power-of-two parameters satisfying the full constraint list."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    R = _next_pow2(max(1 << (2 * n + 1), k + 1))
    R1 = _next_pow2(max(1 << (2 * n), 1 << k, (1 << (k + 1)) * R))
    Lam = R1 ** (c_exponent * k)
    T = Lam * R1
    sqrt_k = math.isqrt(k) + 1  # integer upper bound on sqrt(k)
    S = _next_pow2(max(
        1 << (4 * n),
        Lam * sqrt_k,
        T * sqrt_k + 1,
        2 * T * T,
        4 * R * R * T ** 3,
    ))
    Q = S * S
    if Q.bit_length() > PARAM_BIT_CEILING:
        raise ScheduleOverflow(
            f"Q needs {Q.bit_length()} bits, ceiling is {PARAM_BIT_CEILING}"
        )
    p = AlgAParams(n=n, k=k, Q=Q, R=R, R1=R1, Lambda=Lam, T=T, S=S,
                   retries=retries, c_exponent=c_exponent)
    p.validate()
    return p


@dataclass(frozen=True)
class FourierSample:
    """One measured Fourier mode on the grid (1/Q)Z^k.

    true_y0 is the noiseless dual point, retained only in debug mode so the
    recovery path provably never reads the secret in production."""

    y1: TorusVec
    true_y0: Optional[TorusVec] = None


_FRAME_CACHE: dict = {}


def _orthogonal_frame(L: Lattice) -> List[Tuple[Tuple[Fraction, ...], Fraction]]:
    """Exact Gram-Schmidt vectors of the basis with float-exact inverse norms."""
    cached = _FRAME_CACHE.get(L)
    if cached is not None:
        return cached
    cols = [list(L.basis.to_rational().column(j)) for j in range(L.rank)]
    star: List[List[Fraction]] = []
    out = []
    for b in cols:
        v = list(b)
        for w in star:
            nsq = sum((x * x for x in w), Fraction(0))
            m = sum((x * y for x, y in zip(b, w)), Fraction(0)) / nsq
            v = [x - m * y for x, y in zip(v, w)]
        star.append(v)
        nsq = sum((x * x for x in v), Fraction(0))
        inv_norm = Fraction(1.0 / math.sqrt(float(nsq)))
        out.append((tuple(v), inv_norm))
    _FRAME_CACHE[L] = out
    return out


def sample_fourier_point(secret: Lattice, p: AlgAParams, rng: random.Random,
                         debug: bool = False, noise: str = "gaussian") -> FourierSample:
    """Draw y1 = grid-round(y0 + u2): y0 exactly uniform over H^# (on the 1/Q
    grid in the torus directions), u2 Gaussian in H_R with density
    exp(-2 pi S^2 ||u||^2), i.e. per-coordinate deviation 1/(2 sqrt(pi) S)."""
    if secret.k != p.k:
        raise ValueError("dimension mismatch")
    y0 = dual_sample_uniform(secret, p.Q, rng)
    coords = list(y0.coords)
    if secret.rank:
        sigma = 1 / (_TWO_SQRT_PI * p.S)
        for vec, inv_norm in _orthogonal_frame(secret):
            if noise == "gaussian":
                z = Fraction(rng.gauss(0.0, 1.0))
            elif noise == "uniform":
                # probing mode: flat window with unit deviation (+/- sqrt(3));
                # explores the constant-initial-state variant, no contract
                z = Fraction(rng.uniform(-1.7320508, 1.7320508))
            else:
                raise ValueError(f"unknown noise mode {noise!r}")
            t = z * sigma * inv_norm
            if t:
                coords = [c + t * g for c, g in zip(coords, vec)]
    q = p.Q
    y1 = TorusVec.make([Fraction((c * q + Fraction(1, 2)).__floor__(), q) for c in coords])
    return FourierSample(y1, y0 if debug else None)


@dataclass
class RecoveryTrace:
    """Intermediate matrices of the classical recovery, kept for inspection."""

    E: RatMatrix
    lll_basis: Optional[RatMatrix] = None
    B1: Optional[RatMatrix] = None
    ell_guess: Optional[int] = None
    B2: Optional[RatMatrix] = None
    B3: Optional[RatMatrix] = None
    A4: Optional[RatMatrix] = None
    A5: Optional[RatMatrix] = None
    A6: Optional[IntMatrix] = None
    failure: Optional[str] = None


def recover_colattice(y1: TorusVec, p: AlgAParams) -> Tuple[Optional[Lattice], RecoveryTrace]:
    """Recover H_1 = H_R intersect Z^k from a single Fourier sample.

    Returns (lattice, trace); the lattice is None when the sample is bad
    (no short LLL prefix, a singular row selection, or an unverified
    continued-fraction reconstruction), in which case the caller resamples."""
    k = y1.k
    t = Fraction(1, p.T)
    r_sq = Fraction(1, p.R * p.R)
    lift = y1.lift()
    cols = [[Fraction(int(i == j)) for i in range(k + 1)] for j in range(k)]
    cols.append(list(lift) + [t])
    E = RatMatrix.from_columns(cols)
    trace = RecoveryTrace(E=E)

    B = lll(E)
    trace.lll_basis = B
    kappa = 0
    for j in range(k + 1):
        if sum((x * x for x in B.column(j)), Fraction(0)) <= r_sq:
            kappa += 1
        else:
            break
    if kappa == 0:
        trace.failure = "no short vectors in the LLL prefix"
        return None, trace
    ell = k + 1 - kappa
    trace.ell_guess = ell
    B1 = RatMatrix.from_columns([B.column(j) for j in range(kappa)], rows=k + 1)
    trace.B1 = B1

    best_sel: Optional[List[int]] = None
    best_det = Fraction(0)
    for extra in combinations(range(k), kappa - 1):
        sel = list(extra) + [k]
        sub = RatMatrix.from_rows([B1.data[i] for i in sel])
        d = sub.det()
        if abs(d) > abs(best_det):
            best_det = d
            best_sel = sel
    if best_sel is None or best_det == 0:
        trace.failure = "every row selection containing the last row is singular"
        return None, trace
    sel = best_sel
    nonsel = [i for i in range(k) if i not in set(sel)]
    B2 = RatMatrix.from_rows([B1.data[i] for i in sel])
    trace.B2 = B2
    B3 = B1 @ B2.inverse()
    trace.B3 = B3

    # Columns of B3 carry the identity on the selected rows; the one whose
    # pivot sits on the last row is the flattening direction and is dropped.
    noisy = [[B3[i, c] for c in range(kappa - 1)] for i in nonsel]
    a4_rows: List[List[Fraction]] = []
    for row in noisy:
        out_row = []
        for x in row:
            rec = legendre_reconstruct(x, p.R)
            if not rec.verified:
                trace.A4 = None
                trace.failure = "unverified continued-fraction reconstruction"
                return None, trace
            out_row.append(rec.value)
        a4_rows.append(out_row)
    A4 = RatMatrix.from_rows(a4_rows) if ell and kappa > 1 else RatMatrix(ell, kappa - 1, tuple(() for _ in range(ell)))
    trace.A4 = A4

    a5 = [[Fraction(0)] * ell for _ in range(k)]
    for i, r in enumerate(nonsel):
        a5[r][i] = Fraction(1)
    for c in range(kappa - 1):
        for i in range(ell):
            a5[sel[c]][i] = -A4[i, c]
    A5 = RatMatrix(k, ell, tuple(tuple(row) for row in a5))
    trace.A5 = A5

    if ell == 0:
        h1 = Lattice.trivial(k)
        trace.A6 = h1.basis
        return h1, trace
    _, V, _ = snf_rational(A5)
    v_inv = V.inverse_unimodular()
    A6 = IntMatrix.from_columns([v_inv.column(j) for j in range(ell)], rows=k)
    trace.A6 = A6
    return lattice_from_generators(A6), trace


def finite_stage(secret: Lattice, h1: Lattice, p: AlgAParams,
                 rng: random.Random) -> Optional[Lattice]:
    """Exact finite-group stage: recover the secret inside H_1.

    Pulls the secret back through the H_1 basis to a full-rank sublattice of
    Z^ell, draws exact uniform dual samples of the finite dual group, grows
    the generated subgroup until it stabilizes for 2 ceil(log2 index) + 4
    consecutive draws, converts the dual generators to a primal basis via the
    rational SNF, and maps back.  Returns None if the draw budget runs out."""
    if secret.rank != h1.rank or not h1.contains_lattice(secret):
        raise ValueError("finite_stage needs secret <= H1 of equal rank")
    ell = h1.rank
    if ell == 0:
        return h1
    N = h1.basis.to_rational()
    P_rat = (N.transpose() @ N).inverse() @ N.transpose() @ secret.basis.to_rational()
    P = P_rat.to_integer()
    index = abs(P.det())
    if index == 1:
        return h1
    pinv_t = P.to_rational().inverse().transpose()
    window = 2 * (index - 1).bit_length() + 4
    budget = 64 * (index.bit_length() + 2)
    # Track the group <Z^ell, samples> as the integer lattice (index * group).
    gens = [[index if i == j else 0 for i in range(ell)] for j in range(ell)]
    group = lattice_from_generators(IntMatrix.from_columns(gens, rows=ell))
    stable = 0
    draws = 0
    while stable < window:
        if draws >= budget:
            return None
        draws += 1
        a = [rng.randrange(index) for _ in range(ell)]
        y = pinv_t.mul_vec(a)
        scaled = [int(index * c) % index for c in y]
        if group.contains(scaled):
            stable += 1
            continue
        stable = 0
        cols = [group.basis.column(j) for j in range(group.rank)] + [scaled]
        group = lattice_from_generators(IntMatrix.from_columns(cols, rows=ell))
    # Dual generators y_j = column_j / index; primal = W diag(denominators).
    B_dual = group.basis.to_rational().scale(Fraction(1, index))
    D, _, W = snf_rational(B_dual.transpose())
    qs = []
    for i in range(ell):
        d = D[i, i] if i < min(D.rows, D.cols) else Fraction(0)
        qs.append(d.denominator if d != 0 else 1)
    primal = IntMatrix.from_columns(
        [[W[i, j] * qs[j] for i in range(ell)] for j in range(ell)], rows=ell
    )
    rec_cols = [h1.basis.mul_vec(primal.column(j)) for j in range(ell)]
    return lattice_from_generators(IntMatrix.from_columns(rec_cols, rows=secret.k))


@dataclass
class AlgAStats:
    samples: int = 0
    escalations: int = 0
    last_failure: Optional[str] = None


def end_to_end(secret: Lattice, p: AlgAParams, rng: random.Random,
               debug: bool = False,
               stats: Optional[AlgAStats] = None) -> Optional[Lattice]:
    """Full pipeline: sample + recover H_1 (with retries and doubling-on-
    failure escalation), then the finite stage.  None when retries run out."""
    params = p
    for _ in range(p.retries):
        sample = sample_fourier_point(secret, params, rng, debug=debug)
        if stats is not None:
            stats.samples += 1
        h1, trace = recover_colattice(sample.y1, params)
        if (h1 is not None and h1.rank == secret.rank
                and h1.contains_lattice(secret)):
            rec = finite_stage(secret, h1, params, rng)
            if rec is not None:
                return rec
            if stats is not None:
                stats.last_failure = "finite stage draw budget"
        elif stats is not None:
            stats.last_failure = trace.failure or "wrong colattice candidate"
        params = params.escalated()
        if stats is not None:
            stats.escalations += 1
    return None
