"""Classical simulation of the collimation sieve for abelian hidden shifts.

Phase vectors store their multiplier lists as multiplier -> multiplicity
dictionaries (computational-basis measurements of equal-amplitude states
depend only on counts, so this is exact and collapses the bookkeeping when
the dual group is finite).  Phases are never materialized: the hidden shift
enters only in the final Fourier measurement, where the exact rational
multipliers determine the outcome distribution.

The three stages mirror the qubit-creation / recursive-collimation / final-
measurement split: create_qubit draws a dual point per qubit, sieve() runs
the depth-first recursion with tandem two-spot collimation windows, and
recover_shift assembles one cyclic factor of the target group at a time
before lifting the measured residues to an integer shift by solving the
congruence system (approximate CVP on the solution lattice).
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .lattice import (
    Lattice,
    TorusVec,
    dual_membership,
    dual_sample_uniform,
    integer_orthogonal,
    lattice_from_generators,
)
from .lll import babai_nearest_plane, lll
from .matrix import IntMatrix, snf
from .alg_a import _orthogonal_frame, _TWO_SQRT_PI


class SieveBudgetExceeded(RuntimeError):
    """A retry or qubit budget ran out; the caller records a failed trial."""


@dataclass(frozen=True)
class SieveConfig:
    k: int
    t: int
    n: int              # shift bit budget, k * t
    h: int              # basis bit size of the visible lattice
    m: int              # stage exponent; km collimation stages
    G: int              # Gaussian width for the noisy sampler (1/g)
    Q: int              # measurement/torus grid radix
    noise: str = "exact"            # "exact" | "gaussian"
    shift_bound: int = 0            # infinity-norm box for the lifted shift
    max_retries: int = 64           # per recursion node
    qubit_budget: int = 1 << 22
    check: bool = False             # assert window/length invariants as we go

    def stage_radius(self, j: int) -> Fraction:
        return Fraction(1, 2 ** (j * self.m + 1))

    @property
    def min_len(self) -> int:
        return 4 ** (self.k * self.m)

    @property
    def max_len(self) -> int:
        return 4 ** (self.k * self.m + 1)


def sieve_config(L: Lattice, t: int, *, m: Optional[int] = None,
                 noise: str = "exact", shift_bound: Optional[int] = None,
                 max_retries: int = 64, check: bool = False,
                 stage_ceiling: int = 12) -> SieveConfig:
    """Choose the stage exponent m and grids for a shift recovery over L.

    m is minimal (>= 2) with 2^(k m^2) > k (n + 2h) 2^t, which makes the
    final collimation radius 2^(-k m^2 - 1) fine enough for the target-group
    measurement to land within trace distance 1/2."""
    if t < 1:
        raise ValueError("t must be >= 1")
    k = L.k
    n = k * t
    from .lattice import basis_bit_complexity

    h = basis_bit_complexity(L)
    need = k * (n + 2 * h) * (2 ** t)
    if m is None:
        m = 2
        while 2 ** (k * m * m) <= need:
            m += 1
    if k * m > stage_ceiling:
        raise ValueError(f"km = {k * m} exceeds the desk-scale ceiling {stage_ceiling}")
    # Accuracy target: final radius 2^(-km^2-1) <= 1 / ((n+2h) k 2^(t+1)).
    if m >= 2 and 2 ** (k * m * m) > need:
        assert 2 ** (k * m * m + 1) >= k * (n + 2 * h) * 2 ** (t + 1)
    g_exp = k * m + t + 2
    q_exp = max(2 * g_exp, 2 * k * m * m + 2)
    return SieveConfig(
        k=k, t=t, n=n, h=h, m=m, G=2 ** g_exp, Q=2 ** q_exp, noise=noise,
        shift_bound=shift_bound if shift_bound is not None else 2 ** (t - 1),
        max_retries=max_retries, check=check,
    )


@dataclass(frozen=True)
class Window:
    center: TorusVec
    radius: Fraction

    def contains(self, y: TorusVec) -> bool:
        if 2 * self.radius >= 1:
            return True
        return all(abs(c) <= self.radius for c in (y - self.center).lift())


Counts = Dict[TorusVec, int]


@dataclass
class Spot:
    counts: Counts
    window: Window

    @property
    def length(self) -> int:
        return sum(self.counts.values())


@dataclass
class PhaseVector:
    """One- or two-spot phase vector; two-spot windows differ by the target."""

    spots: Tuple[Spot, ...]
    stage: int

    @property
    def spot_count(self) -> int:
        return len(self.spots)

    def total_length(self) -> int:
        return sum(s.length for s in self.spots)


@dataclass(frozen=True)
class PhaseQubit:
    """Length-2 phase vector: multipliers for the |0> and |1> branches."""

    zero_mult: TorusVec
    one_mult: TorusVec

    def delta(self) -> TorusVec:
        return self.one_mult - self.zero_mult


@dataclass
class SieveStats:
    qubits: int = 0
    collimations: int = 0
    rejections: Dict[int, int] = field(default_factory=dict)
    max_live_multipliers: int = 0
    postselect_attempts: int = 0
    postselect_successes: int = 0

    def note_live(self, n: int) -> None:
        if n > self.max_live_multipliers:
            self.max_live_multipliers = n

    def reject(self, stage: int) -> None:
        self.rejections[stage] = self.rejections.get(stage, 0) + 1


def create_qubit(shift: Sequence[int], L: Lattice, cfg: SieveConfig,
                 rng: random.Random, stats: Optional[SieveStats] = None) -> PhaseVector:
    """Sample one phase qubit: multipliers {0, y} with y uniform over H^#.

    The hidden shift is accepted for interface parity with the physical
    oracle call but never read: phases are implied, not stored."""
    del shift  # phases live only in measurement operations
    if stats is not None:
        stats.qubits += 1
        if stats.qubits > cfg.qubit_budget:
            raise SieveBudgetExceeded("qubit budget exhausted")
    y = dual_sample_uniform(L, cfg.Q, rng)
    if cfg.noise == "gaussian":
        y = _gaussian_grid_noise(L, y, cfg.G, cfg.Q, rng)
    elif cfg.noise != "exact":
        raise ValueError(f"unknown noise mode {cfg.noise!r}")
    counts: Counts = {}
    zero = TorusVec.zero(L.k)
    counts[zero] = counts.get(zero, 0) + 1
    counts[y] = counts.get(y, 0) + 1
    spot = Spot(counts, Window(TorusVec.zero(L.k), Fraction(1, 2)))
    return PhaseVector((spot,), stage=0)


def _gaussian_grid_noise(L: Lattice, y: TorusVec, G: int, Q: int,
                         rng: random.Random) -> TorusVec:
    """Add the Fourier-stage Gaussian (deviation 1/(2 sqrt(pi) G)) along H_R
    and rasterize to the 1/Q grid."""
    coords = list(y.coords)
    if L.rank:
        sigma = 1 / (_TWO_SQRT_PI * G)
        for vec, inv_norm in _orthogonal_frame(L):
            z = Fraction(rng.gauss(0.0, 1.0)) * sigma * inv_norm
            if z:
                coords = [c + z * g for c, g in zip(coords, vec)]
    return TorusVec.make([Fraction((c * Q + Fraction(1, 2)).__floor__(), Q) for c in coords])


def tensor(a: PhaseVector, b: PhaseVector) -> PhaseVector:
    """Tensor product: pairwise multiplier sums, windows add in tandem.

    Two-spot x one-spot keeps the two-spot structure; two-spot x two-spot is
    never needed by the sieve and is rejected."""
    if b.spot_count == 1 and a.spot_count in (1, 2):
        left, right = a, b
    elif a.spot_count == 1 and b.spot_count == 2:
        left, right = b, a
    else:
        raise ValueError("tensor of two two-spot phase vectors is not supported")
    rspot = right.spots[0]
    new_spots = []
    for spot in left.spots:
        counts: Counts = {}
        for u, cu in spot.counts.items():
            for v, cv in rspot.counts.items():
                w = u + v
                counts[w] = counts.get(w, 0) + cu * cv
        new_spots.append(Spot(
            counts,
            Window(spot.window.center + rspot.window.center,
                   spot.window.radius + rspot.window.radius),
        ))
    return PhaseVector(tuple(new_spots), stage=left.stage)


def _tile_index(y: TorusVec, window: Window, tiles_per_axis: int) -> Tuple[int, ...]:
    width = 2 * window.radius / tiles_per_axis
    idx = []
    for c in (y - window.center).lift():
        i = int((c + window.radius) / width)
        idx.append(min(max(i, 0), tiles_per_axis - 1))
    return tuple(idx)


def collimation_tally(pv: PhaseVector, m: int):
    """Tile assignment and joint tile occupancy for the collimation
    measurement; the outcome distribution is tally/total exactly."""
    tiles_per_axis = 2 ** (m + 1)
    per_spot_idx = []
    tally: Dict[Tuple[int, ...], int] = {}
    for spot in pv.spots:
        assignment: Dict[TorusVec, Tuple[int, ...]] = {}
        for y, c in spot.counts.items():
            ti = _tile_index(y, spot.window, tiles_per_axis)
            assignment[y] = ti
            tally[ti] = tally.get(ti, 0) + c
        per_spot_idx.append(assignment)
    return per_spot_idx, tally


def collimate(pv: PhaseVector, m: int, rng: random.Random,
              stats: Optional[SieveStats] = None) -> PhaseVector:
    """Collimation measurement: tile each window into 2^(k(m+1)) subcubes
    (paired in tandem across two-spot windows), sample a tile with
    probability proportional to its resident count, and restrict.

    Equal-magnitude amplitudes make the counting measure the exact Born
    rule for this measurement."""
    tiles_per_axis = 2 ** (m + 1)
    per_spot_idx, tally = collimation_tally(pv, m)
    total = sum(tally.values())
    if stats is not None:
        stats.collimations += 1
        stats.note_live(sum(len(s.counts) for s in pv.spots))
    r = rng.randrange(total)
    chosen: Tuple[int, ...] = ()
    acc = 0
    for ti in sorted(tally):
        acc += tally[ti]
        if r < acc:
            chosen = ti
            break
    new_spots = []
    for spot, assignment in zip(pv.spots, per_spot_idx):
        counts = {y: c for y, c in spot.counts.items() if assignment[y] == chosen}
        radius = spot.window.radius / tiles_per_axis
        width = 2 * spot.window.radius / tiles_per_axis
        offset = [(-spot.window.radius + (i + Fraction(1, 2)) * width) for i in chosen]
        center = TorusVec.make([a + b for a, b in zip(spot.window.center.coords, offset)])
        new_spots.append(Spot(counts, Window(center, radius)))
    return PhaseVector(tuple(new_spots), stage=pv.stage)


def _random_submultiset(counts: Counts, size: int, rng: random.Random) -> Counts:
    """Uniformly random sub-multiset of the given size."""
    total = sum(counts.values())
    if size <= 0:
        return {}
    if size >= total:
        return dict(counts)
    if total <= 4096:
        out: Counts = {}
        remaining = total
        take = size
        for y in sorted(counts):
            c = counts[y]
            got = 0
            for _ in range(c):
                if take and rng.randrange(remaining) < take:
                    got += 1
                    take -= 1
                remaining -= 1
            if got:
                out[y] = got
        return out
    # Large multiset: binomial split via random bits, then exact rebalance.
    out = {}
    for y in sorted(counts):
        c = counts[y]
        h = bin(rng.getrandbits(c)).count("1") if c else 0
        if h:
            out[y] = h
    picked = sum(out.values())
    while picked > size:
        r = rng.randrange(picked)
        acc = 0
        for y in sorted(out):
            acc += out[y]
            if r < acc:
                out[y] -= 1
                if not out[y]:
                    del out[y]
                break
        picked -= 1
    while picked < size:
        r = rng.randrange(total - picked)
        acc = 0
        for y in sorted(counts):
            avail = counts[y] - out.get(y, 0)
            acc += avail
            if r < acc:
                out[y] = out.get(y, 0) + 1
                break
        picked += 1
    return out


def shorten(pv: PhaseVector, cfg: SieveConfig, rng: random.Random) -> PhaseVector:
    """Measure oversized spots down into [4^km, 4^(km+1)).

    Each oversized spot is split into two near-equal random parts and one
    part is kept with probability proportional to its size, repeatedly;
    two-spot vectors shorten each summand separately."""
    new_spots = []
    for spot in pv.spots:
        counts = spot.counts
        length = sum(counts.values())
        while length >= cfg.max_len:
            take = length // 2
            sizes = (length - take, take)
            keep_first = rng.randrange(length) < sizes[0]
            part = _random_submultiset(counts, sizes[0], rng)
            if keep_first:
                counts = part
            else:
                counts = {y: c - part.get(y, 0) for y, c in counts.items()
                          if c - part.get(y, 0) > 0}
            length = sum(counts.values())
        new_spots.append(Spot(counts, spot.window))
    return PhaseVector(tuple(new_spots), stage=pv.stage)


def _balanced_split(counts: Counts, rng: random.Random) -> Tuple[Counts, Counts]:
    total = sum(counts.values())
    half = _random_submultiset(counts, total // 2, rng)
    rest = {y: c - half.get(y, 0) for y, c in counts.items() if c - half.get(y, 0) > 0}
    return rest, half


def _check_vector(pv: PhaseVector, cfg: SieveConfig, L: Lattice, j: int,
                  final: bool) -> None:
    radius = cfg.stage_radius(j)
    for spot in pv.spots:
        assert spot.window.radius == radius, "radius telescoping violated"
        for y in spot.counts:
            assert spot.window.contains(y), "multiplier escaped its window"
            if cfg.noise == "exact":
                assert dual_membership(L, y), "multiplier left the dual group"
        if final:
            assert cfg.min_len <= spot.length < cfg.max_len, "length discipline violated"


def sieve(j: int, p: int, target: TorusVec, cfg: SieveConfig, L: Lattice,
          rng: random.Random, stats: Optional[SieveStats] = None):
    """Depth-first collimation sieve.

    p=1 returns a single-spot vector at stage j; p=2 below the last stage
    returns a two-spot vector whose windows differ by the target; at the last
    stage j = km, p=2 performs the pairing measurement and returns a
    PhaseQubit whose multiplier difference is within 2^(1-km^2-1)-windows of
    the target."""
    if not (0 <= j <= cfg.k * cfg.m):
        raise ValueError("stage out of range")
    km = cfg.k * cfg.m
    shift_dummy = ()
    half = Fraction(1, 2)
    if j == 0:
        if p == 1:
            pv = create_qubit(shift_dummy, L, cfg, rng, stats)
            for _ in range(2 * km - 1):
                pv = tensor(pv, create_qubit(shift_dummy, L, cfg, rng, stats))
            # The base vector is unrestricted: trivial collimation window.
            pv = PhaseVector(
                (Spot(pv.spots[0].counts, Window(TorusVec.zero(cfg.k), half)),),
                stage=0,
            )
            if cfg.check:
                _check_vector(pv, cfg, L, 0, final=True)
            return pv
        pv = create_qubit(shift_dummy, L, cfg, rng, stats)
        for _ in range(2 * km):
            pv = tensor(pv, create_qubit(shift_dummy, L, cfg, rng, stats))
        a, b = _balanced_split(pv.spots[0].counts, rng)
        out = PhaseVector((
            Spot(a, Window(TorusVec.zero(cfg.k), half)),
            Spot(b, Window(target, half)),
        ), stage=0)
        if cfg.check:
            _check_vector(out, cfg, L, 0, final=True)
        return out

    for _ in range(cfg.max_retries):
        if p == 1:
            u = sieve(j - 1, 1, target, cfg, L, rng, stats)
            v = sieve(j - 1, 1, target, cfg, L, rng, stats)
            joined = tensor(u, v)
        else:
            uv = sieve(j - 1, 2, target, cfg, L, rng, stats)
            w = sieve(j - 1, 1, target, cfg, L, rng, stats)
            joined = tensor(uv, w)
        out = collimate(joined, cfg.m, rng, stats)
        out = PhaseVector(out.spots, stage=j)
        if any(s.length < cfg.min_len for s in out.spots):
            if stats is not None:
                stats.reject(j)
            continue
        out = shorten(out, cfg, rng)
        if p == 2 and j == km:
            result = _pairing_measurement(out, rng)
            if result is None:
                if stats is not None:
                    stats.reject(j)
                continue
            return result
        if cfg.check:
            _check_vector(out, cfg, L, j, final=True)
        return out
    raise SieveBudgetExceeded(f"stage {j} retry budget exhausted")


def _expand_sorted(counts: Counts) -> List[TorusVec]:
    out = []
    for y in sorted(counts, key=lambda v: v.coords):
        out.extend([y] * counts[y])
    return out


def _pairing_measurement(pv: PhaseVector, rng: random.Random) -> Optional[PhaseQubit]:
    """Pair up basis states across the two spots and measure the partition;
    a sampled pair becomes the output qubit, unpaired outcomes retry."""
    y_len = pv.spots[0].length
    z_len = pv.spots[1].length
    npairs = min(y_len, z_len)
    total = y_len + z_len
    if rng.randrange(total) >= 2 * npairs:
        return None
    i = rng.randrange(npairs)
    u = _expand_sorted(pv.spots[0].counts)[i]
    v = _expand_sorted(pv.spots[1].counts)[i]
    return PhaseQubit(u, v)


# ---------------------------------------------------------------------------
# Target group, final measurement, and the lift back to an integer shift.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CyclicFactor:
    order: int
    generator: TorusVec
    kind: str  # "finite" (complement of H_1^# in H^#) or "torsion" (2^t part)


@dataclass(frozen=True)
class TargetGroup:
    factors: Tuple[CyclicFactor, ...]

    def order(self) -> int:
        n = 1
        for f in self.factors:
            n *= f.order
        return n


def build_target_group(L: Lattice, t: int) -> TargetGroup:
    """A = A1 + A2: a complement of H_1^# in H^# (one cyclic factor per
    nontrivial invariant factor of the basis) plus the 2^t-torsion of H_1^#
    (integer-orthogonal columns scaled by 2^-t)."""
    factors: List[CyclicFactor] = []
    if L.rank:
        D, V, _ = snf(L.basis)
        for i in range(L.rank):
            d = D[i, i]
            if d > 1:
                gen = TorusVec.make([Fraction(V[i, j], d) for j in range(L.k)])
                factors.append(CyclicFactor(d, gen, "finite"))
    C = integer_orthogonal(L)
    for j in range(C.cols):
        col = C.column(j)
        gen = TorusVec.make([Fraction(c, 2 ** t) for c in col])
        factors.append(CyclicFactor(2 ** t, gen, "torsion"))
    for f in factors:
        assert dual_membership(L, f.generator)
    return TargetGroup(tuple(factors))


def assemble_cyclic(factor: CyclicFactor, cfg: SieveConfig, L: Lattice,
                    shift: Sequence[int], rng: random.Random,
                    stats: Optional[SieveStats] = None,
                    max_attempts: int = 64) -> int:
    """Produce the qubits for one cyclic factor, post-select onto indices
    below the order, and sample the Z/d Fourier measurement outcome.

    The outcome distribution is computed from the exact phase multipliers
    (the single place the hidden shift is consulted)."""
    d = factor.order
    e = max(1, (d - 1).bit_length())
    km = cfg.k * cfg.m
    for _ in range(max_attempts):
        deltas = []
        for level in range(e):
            target = factor.generator.scale(2 ** level)
            qubit = sieve(km, 2, target, cfg, L, rng, stats)
            deltas.append(qubit.delta())
        # Boolean post-selection onto b < d succeeds with probability d/2^e.
        if stats is not None:
            stats.postselect_attempts += 1
        if rng.randrange(2 ** e) >= d:
            continue
        if stats is not None:
            stats.postselect_successes += 1
        phases = []
        for b in range(d):
            acc = TorusVec.zero(cfg.k)
            for level in range(e):
                if (b >> level) & 1:
                    acc = acc + deltas[level]
            phases.append(float(acc.pairing(shift)))
        probs = []
        for c in range(d):
            amp = sum(cmath.exp(2j * cmath.pi * (theta - b * c / d))
                      for b, theta in enumerate(phases))
            probs.append(abs(amp) ** 2)
        total = sum(probs)
        r = rng.random() * total
        acc_p = 0.0
        for c, pr in enumerate(probs):
            acc_p += pr
            if r < acc_p:
                return c
        return d - 1
    raise SieveBudgetExceeded("post-selection retry budget exhausted")


class InfeasibleShift(ValueError):
    """No shift inside the norm box satisfies the measured congruences."""


def lift_shift(residues: Sequence[Tuple[CyclicFactor, int]], A: TargetGroup,
               L: Lattice, t: int, max_norm: Optional[int] = None) -> Tuple[int, ...]:
    """Solve gen.s = c/d (mod 1) for all measured factors with ||s||_inf
    bounded, via a particular solution of the congruence system plus Babai
    nearest-plane on the solution lattice A^#."""
    k = L.k
    bound = max_norm if max_norm is not None else 2 ** (t - 1)
    if not residues:
        return tuple([0] * k)
    rows: List[List[int]] = []
    mods: List[int] = []
    targets: List[int] = []
    for fac, c in residues:
        d = fac.order
        row = []
        for coord in fac.generator.coords:
            x = coord * d
            if x.denominator != 1:
                raise ValueError("generator order does not clear denominators")
            row.append(x.numerator)
        rows.append(row)
        mods.append(d)
        targets.append(int(c) % d)
    m = len(rows)
    sys_rows = [rows[i] + [mods[i] if j == i else 0 for j in range(m)] for i in range(m)]
    Asys = IntMatrix.from_rows(sys_rows)
    D, V, W = snf(Asys)
    vc = V.mul_vec(targets)
    y = [0] * (k + m)
    rank = 0
    for i in range(min(m, k + m)):
        if D[i, i] != 0:
            rank = i + 1
    for i in range(m):
        di = D[i, i] if i < rank else 0
        if di:
            q, r = divmod(vc[i], di)
            if r:
                raise InfeasibleShift("congruence system has no integer solution")
            y[i] = q
        elif vc[i]:
            raise InfeasibleShift("congruence system has no integer solution")
    x = W.mul_vec(y)
    s0 = list(x[:k])
    kernel_cols = [W.column(j)[:k] for j in range(rank, k + m)]
    sol_lattice = lattice_from_generators(IntMatrix.from_columns(kernel_cols, rows=k))
    assert sol_lattice.rank == k, "solution lattice must have full rank"
    reduced = lll(sol_lattice.basis.to_rational())
    point = babai_nearest_plane(reduced, [Fraction(c) for c in s0])
    best = None
    base = [Fraction(c) - pc for c, pc in zip(s0, point)]
    # Babai candidate first; a small coefficient enumeration catches near-ties.
    span = range(-2, 3)
    cols = [reduced.column(j) for j in range(k)]

    def consider(vec: List[Fraction]) -> None:
        nonlocal best
        ints = [int(c) for c in vec]
        norm = max(abs(c) for c in ints) if ints else 0
        if norm <= bound and (best is None or norm < best[0]):
            best = (norm, ints)

    consider(base)
    if best is None and k <= 4:
        for coeffs in _small_boxes(k, span):
            cand = list(base)
            for j, a in enumerate(coeffs):
                if a:
                    cand = [x - a * y for x, y in zip(cand, cols[j])]
            consider(cand)
    if best is None:
        raise InfeasibleShift(f"no solution with infinity norm <= {bound}")
    return tuple(best[1])


def _small_boxes(k: int, span) -> List[Tuple[int, ...]]:
    out: List[Tuple[int, ...]] = [()]
    for _ in range(k):
        out = [c + (a,) for c in out for a in span]
    return out


def recover_shift(shift: Sequence[int], L: Lattice, t: int, rng: random.Random,
                  cfg: Optional[SieveConfig] = None,
                  stats: Optional[SieveStats] = None) -> Optional[Tuple[int, ...]]:
    """Full shift recovery; returns a vector congruent to the planted shift
    mod L with probability >= 1/2 in exact mode, or None on failure."""
    cfg = cfg or sieve_config(L, t)
    stats = stats if stats is not None else SieveStats()
    group = build_target_group(L, t)
    residues: List[Tuple[CyclicFactor, int]] = []
    try:
        for fac in group.factors:
            c = assemble_cyclic(fac, cfg, L, shift, rng, stats)
            residues.append((fac, c))
        return lift_shift(residues, group, L, t, max_norm=cfg.shift_bound)
    except (SieveBudgetExceeded, InfeasibleShift):
        return None
