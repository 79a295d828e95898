"""Cover assignment between outsourcing and executing parties, and the
probability that a random cover is secure.

The constructive assignment follows the two-step algorithm: every
executor is first attached to a random outsourcer with spare step-1
capacity ceil(n_E/n_O), then every outsourcer pads its set with random
distinct executors until it serves exactly `fan_out` of them.  A concrete
cover is secure against given corrupt sets when some honest outsourcer
serves some honest executor.

The closed-form security probability tracks the h-1 designated honest
outsourcers (h honest in total) of the underlying analysis: each is dealt
a full block of ceil(n_E/n_O) executors from a uniform shuffle, then pads
independently to `fan_out` from the complement of its own block.  The
Monte-Carlo and exhaustive oracles sample exactly that experiment, so
they estimate the same quantity the formula computes.  With a single
honest outsourcer the formula degenerates and the probability is that of
its uniform `fan_out`-set hitting an honest executor, which reduces to
fan_out/n_E in the all-but-one-corrupt case.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class CoverError(Exception):
    pass


class IncompleteCoverError(CoverError):
    pass


class InfeasibleParametersError(CoverError):
    pass


@dataclass(frozen=True)
class Cover:
    n_executors: int
    n_outsourcers: int
    fan_out: int
    assignment: tuple[tuple[int, ...], ...]  # per outsourcer, executor ids

    def validate(self) -> None:
        c = math.ceil(self.n_executors / self.n_outsourcers)
        if self.fan_out < c:
            raise CoverError("fan-out below ceil(n_E/n_O)")
        served: set[int] = set()
        for o_idx, targets in enumerate(self.assignment):
            if len(targets) != self.fan_out or len(set(targets)) != len(targets):
                raise CoverError(
                    f"outsourcer {o_idx} must serve exactly {self.fan_out} "
                    "distinct executors")
            served.update(targets)
        if served != set(range(self.n_executors)):
            missing = sorted(set(range(self.n_executors)) - served)
            raise IncompleteCoverError(f"executors {missing} unserved")

    def export_adjacency(self) -> str:
        lines = [f"{o} " + " ".join(str(e) for e in targets)
                 for o, targets in enumerate(self.assignment)]
        return "\n".join(lines) + "\n"


def _check_params(n_e: int, n_o: int, fan_out: int) -> int:
    if n_e < 1 or n_o < 1:
        raise InfeasibleParametersError("need at least one party per set")
    c = math.ceil(n_e / n_o)
    if fan_out < c:
        raise InfeasibleParametersError(
            f"fan-out {fan_out} below ceil(n_E/n_O) = {c}")
    if fan_out > n_e:
        raise InfeasibleParametersError(
            f"fan-out {fan_out} exceeds executor count {n_e}")
    return c


def assign_cover(n_e: int, n_o: int, fan_out: int, seed: int) -> Cover:
    """Random cover: step 1 attaches each executor to an outsourcer with
    spare capacity, step 2 pads every outsourcer to the fan-out."""
    c = _check_params(n_e, n_o, fan_out)
    rng = random.Random(seed)
    sets: list[set[int]] = [set() for _ in range(n_o)]
    executors = list(range(n_e))
    rng.shuffle(executors)
    for e in executors:
        open_slots = [o for o in range(n_o) if len(sets[o]) < c]
        sets[rng.choice(open_slots)].add(e)
    for o in range(n_o):
        spare = [e for e in range(n_e) if e not in sets[o]]
        rng.shuffle(spare)
        while len(sets[o]) < fan_out:
            sets[o].add(spare.pop())
    return Cover(n_e, n_o, fan_out,
                 tuple(tuple(sorted(s)) for s in sets))


def cover_is_secure(cover: Cover, corrupt_executors: set[int],
                    corrupt_outsourcers: set[int]) -> bool:
    """At least one honest outsourcer serves at least one honest executor."""
    for o_idx, targets in enumerate(cover.assignment):
        if o_idx in corrupt_outsourcers:
            continue
        if any(e not in corrupt_executors for e in targets):
            return True
    return False


@dataclass(frozen=True)
class CoverProbability:
    value: float
    exact: Fraction | None
    used_fallback: bool = False
    warning: str | None = None


def _validate_corruptions(n_e, n_o, t_e, t_o, fan_out) -> int:
    c = _check_params(n_e, n_o, fan_out)
    if not (0 <= t_e < n_e) or not (0 <= t_o < n_o):
        raise InfeasibleParametersError(
            "corrupt counts must leave at least one honest party per set")
    return c


def cover_secure_probability(n_e: int, n_o: int, t_e: int, t_o: int,
                             fan_out: int) -> CoverProbability:
    """Closed-form secure-cover probability.

    Outside the formula's validity range (block dealing would need more
    executors than exist) the exhaustive oracle's value is returned with
    a warning flag.
    """
    c = _validate_corruptions(n_e, n_o, t_e, t_o, fan_out)
    honest = n_o - t_o
    k = honest - 1
    if k == 0:
        # Single honest outsourcer: its set is a uniform fan_out-subset;
        # for t_e = n_e - 1 this is the fan_out/n_e special case.
        p_all_corrupt = (Fraction(math.comb(t_e, fan_out),
                                  math.comb(n_e, fan_out))
                         if t_e >= fan_out else Fraction(0))
        exact = 1 - p_all_corrupt
        return CoverProbability(float(exact), exact)
    if n_e - k * c < 0:
        exact = enumerate_cover_probability(n_e, n_o, t_e, t_o, fan_out)
        return CoverProbability(
            float(exact), exact, used_fallback=True,
            warning="factorial arguments negative; exhaustive value returned")
    # falling factorial (t_e)_{kc} / (n_e)_{kc}
    blocks = Fraction(1)
    for i in range(k * c):
        blocks *= Fraction(t_e - i, n_e - i)
        if blocks == 0:
            break
    if blocks and fan_out > c:
        if t_e - c >= fan_out - c:
            pad = Fraction(math.comb(t_e - c, fan_out - c),
                           math.comb(n_e - c, fan_out - c))
        else:
            pad = Fraction(0)
        blocks *= pad ** k
    exact = 1 - blocks
    exact = min(max(exact, Fraction(0)), Fraction(1))
    return CoverProbability(float(exact), exact)


def _designated_blocks(n_e: int, c: int, k: int) -> list[int]:
    """Capped block sizes when the deck runs out mid-deal."""
    sizes = []
    left = n_e
    for _ in range(k):
        take = min(c, left)
        sizes.append(take)
        left -= take
    return sizes


def enumerate_cover_probability(n_e: int, n_o: int, t_e: int, t_o: int,
                                fan_out: int) -> Fraction:
    """Exhaustive enumeration of the designated-honest experiment.

    Iterates over every ordered deal of the designated parties' blocks,
    every padding choice, and every corruption placement, and returns the
    exact probability that some designated honest outsourcer serves an
    honest executor.
    """
    import itertools

    c = _validate_corruptions(n_e, n_o, t_e, t_o, fan_out)
    k = max(n_o - t_o - 1, 1)
    sizes = _designated_blocks(n_e, c, k)
    corrupt_sets = list(itertools.combinations(range(n_e), t_e))
    secure_weight = Fraction(0)
    total_weight = Fraction(0)

    def deals(prefix_pool, remaining_sizes):
        if not remaining_sizes:
            yield []
            return
        size = remaining_sizes[0]
        for block in itertools.combinations(prefix_pool, size):
            rest = [e for e in prefix_pool if e not in block]
            for tail in deals(rest, remaining_sizes[1:]):
                yield [block] + tail

    pool = list(range(n_e))
    for blocks in deals(pool, sizes):
        # uniform over unordered disjoint blocks; weight by multinomial
        deal_weight = Fraction(1)
        left = n_e
        for block in blocks:
            deal_weight /= math.comb(left, len(block))
            left -= len(block)
        pad_space = []
        for block in blocks:
            outside = [e for e in pool if e not in block]
            pad_space.append(
                list(itertools.combinations(outside, fan_out - len(block))))
        for pads in itertools.product(*pad_space):
            pad_weight = deal_weight
            for block, options in zip(blocks, pad_space):
                pad_weight /= len(options)
            for corrupt in corrupt_sets:
                corrupt_set = set(corrupt)
                w = pad_weight / len(corrupt_sets)
                total_weight += w
                sets = [set(b) | set(p) for b, p in zip(blocks, pads)]
                if any(s - corrupt_set for s in sets):
                    secure_weight += w
    assert total_weight == 1
    return secure_weight


def mc_cover_probability(n_e: int, n_o: int, t_e: int, t_o: int, fan_out: int,
                         trials: int, seed: int) -> tuple[float, float, float]:
    """Monte-Carlo estimate of the designated-honest experiment with a 95%
    Wilson interval: fraction of sampled (cover, corruption) pairs that
    contain an honest-outsourcer -> honest-executor edge."""
    if trials < 1:
        raise InfeasibleParametersError("trials must be positive")
    c = _validate_corruptions(n_e, n_o, t_e, t_o, fan_out)
    k = max(n_o - t_o - 1, 1)
    sizes = _designated_blocks(n_e, c, k)
    rng = np.random.default_rng(seed)
    # Corruption symmetric over relabeling: executors 0..t_e-1 corrupt,
    # the shuffle supplies the randomness of the placement.
    secure = np.zeros(trials, dtype=bool)
    perms = rng.permuted(
        np.tile(np.arange(n_e), (trials, 1)), axis=1)
    offset = 0
    block_list = []
    for size in sizes:
        block = perms[:, offset : offset + size]
        block_list.append(block)
        secure |= (block >= t_e).any(axis=1)
        offset += size
    for block, size in zip(block_list, sizes):
        pad_n = fan_out - size
        if pad_n <= 0:
            continue
        keys = rng.random((trials, n_e))
        rows = np.arange(trials)[:, None]
        keys[rows, block] = np.inf  # exclude own block from the pad pool
        pads = np.argpartition(keys, pad_n - 1, axis=1)[:, :pad_n]
        secure |= (pads >= t_e).any(axis=1)
    hits = int(secure.sum())
    p_hat = hits / trials
    z = 1.959963984540054
    denom = 1 + z * z / trials
    center = (p_hat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p_hat * (1 - p_hat) / trials
                         + z * z / (4 * trials * trials)) / denom
    return p_hat, max(0.0, center - half), min(1.0, center + half)
