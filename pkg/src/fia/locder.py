"""Local-derivation checks and the theorem harnesses.

A linear map is a local derivation when every element has a derivation
witness agreeing with the map there; witnesses are found by exact linear
solves against the derivation basis.  The exhaustive checker probes every
algebra element over a prime field, the spanning checker probes the
structured families (units, subset idempotents, the chain elements
e_xy + e_yz - e_xz - e_y, seeded random elements) and never certifies.

The theorem harnesses compare the set of local derivations with the set
of derivations, either by full enumeration over a prime field or by
seeded random campaigns.  Enumeration is chunked; chunk boundaries and
the merge are fixed, so FIA_THREADS changes the wall clock and never a
report byte.
"""

from __future__ import annotations

import multiprocessing
import os
import random
from dataclasses import dataclass
from itertools import combinations

from . import _linalg
from .deriv import (
    LinearEndo,
    decompose,
    derivation_basis,
    idempotent_identity_check,
    inner,
    is_cocycle,
    is_derivation,
)
from .fialg import FiElement, element, restrict, subset_idempotent, unit
from .poset import Poset, parse_poset
from .scalars import GF, CoeffRing, RingError, parse_ring

DEFAULT_PROBE_CAP = 1 << 20
DEFAULT_ENDO_CAP = 1 << 24

_PROBE_CHUNK = 4096
_ENDO_CHUNK = 512
_SAMPLE_CHUNK = 4

VERDICT_LOCAL = "local_derivation"
VERDICT_REJECTED = "rejected"
VERDICT_INCONCLUSIVE = "inconclusive"
VERDICT_CONFIRMED = "confirmed"
VERDICT_REFUTED = "REFUTED"


class CapExceededError(ValueError):
    """The requested enumeration is larger than the configured cap."""


@dataclass
class Witness:
    element: FiElement
    derivation: LinearEndo


@dataclass
class LocalCheckReport:
    mode: str
    verdict: str
    probes_checked: int
    ring: str
    failing_probe: FiElement | None = None
    seed: int | None = None

    def to_json(self) -> dict:
        out = {
            "mode": self.mode,
            "verdict": self.verdict,
            "probes_checked": self.probes_checked,
            "ring": self.ring,
        }
        if self.failing_probe is not None:
            out["failing_probe"] = self.failing_probe.to_json()
        if self.seed is not None:
            out["seed"] = self.seed
        return out


@dataclass
class LemmaReport:
    ring: str
    seed: int
    samples: int
    restriction: bool
    subset_rule: bool
    diagonal_sign: bool
    idempotent_identity: bool
    reduced_support: bool

    @property
    def all_pass(self) -> bool:
        return (
            self.restriction
            and self.subset_rule
            and self.diagonal_sign
            and self.idempotent_identity
            and self.reduced_support
        )

    def to_json(self) -> dict:
        return {
            "mode": "lemmas",
            "ring": self.ring,
            "seed": self.seed,
            "samples": self.samples,
            "checks": {
                "restriction": self.restriction,
                "subset_rule": self.subset_rule,
                "diagonal_sign": self.diagonal_sign,
                "idempotent_identity": self.idempotent_identity,
                "reduced_support": self.reduced_support,
            },
            "all_pass": self.all_pass,
        }


@dataclass
class TheoremReport:
    mode: str
    verdict: str
    ring: str
    s_der: int
    s_loc: int
    probes_checked: int
    seed: int | None = None
    trials: int | None = None

    def to_json(self) -> dict:
        out = {
            "mode": self.mode,
            "verdict": self.verdict,
            "ring": self.ring,
            "s_der": self.s_der,
            "s_loc": self.s_loc,
            "probes_checked": self.probes_checked,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.trials is not None:
            out["trials"] = self.trials
        return out


# -- worker plumbing -------------------------------------------------------


def _workers(explicit=None) -> int:
    if explicit is not None:
        return max(1, int(explicit))
    try:
        return max(1, int(os.environ.get("FIA_THREADS", "1")))
    except ValueError:
        return 1


def _chunk_ranges(total: int, size: int):
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def _map_ordered(fn, payloads, workers):
    """Apply fn to payloads, yielding results in payload order."""
    if workers <= 1 or len(payloads) <= 1:
        for p in payloads:
            yield fn(p)
        return
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(min(workers, len(payloads))) as pool:
        yield from pool.imap(fn, payloads)


# -- witnesses -------------------------------------------------------------


def _dense_vector(poset: Poset, a: FiElement):
    vec = [a.ring.zero] * poset.npairs
    pos = poset.pair_pos
    for pair, v in a.entries.items():
        vec[pos(*pair)] = v
    return vec


def _matvec(ring, cols, vec, n):
    out = [ring.zero] * n
    for c in range(n):
        v = vec[c]
        if v:
            col = cols[c]
            for r in range(n):
                w = col[r]
                if w:
                    out[r] = ring.add(out[r], ring.mul(v, w))
    return out


def _vec_has_witness(ring, basis_cols, d_cols, vec, n):
    images = [_matvec(ring, cols, vec, n) for cols in basis_cols]
    target = _matvec(ring, d_cols, vec, n)
    rows = [[img[t] for img in images] for t in range(n)]
    return _linalg.solve(rows, target, ring)


def witness_for(d: LinearEndo, a: FiElement, der_basis) -> Witness | None:
    """A derivation from the span of der_basis agreeing with d at a, if any."""
    ring = d.ring
    n = d.poset.npairs
    vec = _dense_vector(d.poset, a)
    basis_cols = [b.cols for b in der_basis]
    sol = _vec_has_witness(ring, basis_cols, d.cols, vec, n)
    if sol is None:
        return None
    witness = LinearEndo.zero(d.poset, ring)
    for coeff, b in zip(sol, der_basis):
        if coeff != ring.zero:
            witness = witness + b.scale(coeff)
    return Witness(a, witness)


# -- exhaustive probing ----------------------------------------------------


def _decode_digits(index: int, base: int, count: int):
    digits = []
    for _ in range(count):
        index, d = divmod(index, base)
        digits.append(d)
    return digits


def _increment(digits, base) -> None:
    for t in range(len(digits)):
        digits[t] += 1
        if digits[t] == base:
            digits[t] = 0
        else:
            return


def _probe_element(poset: Poset, ring: CoeffRing, index: int) -> FiElement:
    digits = _decode_digits(index, ring.p, poset.npairs)
    entries = {
        pair: digits[t] for t, pair in enumerate(poset.ipairs) if digits[t]
    }
    return FiElement(poset, ring, entries)


def _first_witnessless(poset, ring, d_cols, basis_cols, lo, hi):
    """Least probe index in [lo, hi) with no witness, or None.

    Probe i is the element whose coefficient on the t-th canonical pair is
    the t-th base-p digit of i, so probe 0 is zero and probing all
    p**npairs indices covers the whole algebra.
    """
    n = poset.npairs
    p = ring.p
    digits = _decode_digits(lo, p, n)
    for e in range(lo, hi):
        if _vec_has_witness(ring, basis_cols, d_cols, digits, n) is None:
            return e
        _increment(digits, p)
    return None


def _scan_probe_chunk(payload):
    poset_text, p, d_cols, basis_cols, lo, hi = payload
    poset = parse_poset(poset_text)
    return _first_witnessless(poset, GF(p), d_cols, basis_cols, lo, hi)


def check_local_exhaustive(
    d: LinearEndo,
    probe_cap: int | None = None,
    workers: int | None = None,
) -> LocalCheckReport:
    """Probe every algebra element over a prime field.

    The verdict is local_derivation iff every probe has a witness;
    otherwise the canonically first witness-less probe is attached and
    probes_checked counts up to and including it.
    """
    ring = d.ring
    if ring.kind != "zp":
        raise RingError("exhaustive probing needs a zp ring")
    cap = DEFAULT_PROBE_CAP if probe_cap is None else probe_cap
    poset = d.poset
    total = ring.p ** poset.npairs
    if total > cap:
        raise CapExceededError(
            f"{total} probes exceed the cap of {cap}; raise --probe-cap to allow"
        )
    basis_cols = [b.cols for b in derivation_basis(poset, ring)]
    nworkers = _workers(workers)
    fail = None
    if nworkers <= 1:
        fail = _first_witnessless(poset, ring, d.cols, basis_cols, 0, total)
    else:
        text = poset.serialize()
        payloads = [
            (text, ring.p, d.cols, basis_cols, lo, hi)
            for lo, hi in _chunk_ranges(total, _PROBE_CHUNK)
        ]
        for result in _map_ordered(_scan_probe_chunk, payloads, nworkers):
            if result is not None:
                fail = result
                break
    designator = ring.designator()
    if fail is None:
        return LocalCheckReport("exhaustive", VERDICT_LOCAL, total, designator)
    return LocalCheckReport(
        "exhaustive",
        VERDICT_REJECTED,
        fail + 1,
        designator,
        failing_probe=_probe_element(poset, ring, fail),
    )


# -- spanning probes -------------------------------------------------------


def _chain_probe(poset, ring, i, k, j) -> FiElement:
    one = ring.one
    entries = {(i, k): one, (k, j): one}
    for pair, delta_v in (((i, j), ring.neg(one)), ((k, k), ring.neg(one))):
        v = ring.add(entries.get(pair, ring.zero), delta_v)
        if v != ring.zero:
            entries[pair] = v
        else:
            entries.pop(pair, None)
    return FiElement(poset, ring, entries)


def _spanning_probes(poset, ring, seed, random_probes, subset_limit, cap):
    """Deterministic probe list: units, subsets, chain elements, random."""
    probes = []
    els = poset.elements
    for i, j in poset.ipairs:
        probes.append(unit(poset, ring, els[i], els[j]))
    n = len(els)
    for size in range(0, min(n, subset_limit) + 1):
        for combo in combinations(range(n), size):
            probes.append(subset_idempotent(poset, ring, [els[i] for i in combo]))
            if len(probes) >= cap:
                return probes[:cap]
    for i, j in poset.ipairs:
        if i == j:
            continue
        for k in poset.interval_idx(i, j):
            if k != i and k != j:
                probes.append(_chain_probe(poset, ring, i, k, j))
    rng = random.Random(seed)
    for _ in range(random_probes):
        entries = {}
        for pair in poset.ipairs:
            v = ring.sample(rng)
            if v != ring.zero:
                entries[pair] = v
        probes.append(FiElement(poset, ring, entries))
    return probes[:cap]


def check_local_spanning(
    d: LinearEndo,
    seed: int = 0,
    random_probes: int = 32,
    subset_limit: int = 12,
    probe_cap: int | None = None,
) -> LocalCheckReport:
    """Probe the structured families; verdicts are rejected or inconclusive.

    Passing every probe proves nothing, so the positive verdict is only
    inconclusive; a witness-less probe still rejects soundly.
    """
    ring = d.ring
    if not ring.is_field():
        raise RingError("witness solving needs a field")
    cap = DEFAULT_PROBE_CAP if probe_cap is None else probe_cap
    poset = d.poset
    basis_cols = [b.cols for b in derivation_basis(poset, ring)]
    n = poset.npairs
    checked = 0
    for probe in _spanning_probes(poset, ring, seed, random_probes, subset_limit, cap):
        vec = _dense_vector(poset, probe)
        checked += 1
        if _vec_has_witness(ring, basis_cols, d.cols, vec, n) is None:
            return LocalCheckReport(
                "spanning",
                VERDICT_REJECTED,
                checked,
                ring.designator(),
                failing_probe=probe,
                seed=seed,
            )
    return LocalCheckReport(
        "spanning", VERDICT_INCONCLUSIVE, checked, ring.designator(), seed=seed
    )


# -- lemma conformance -----------------------------------------------------


def lemma_conformance(d: LinearEndo, seed: int = 0, samples: int = 3) -> LemmaReport:
    """Check the structural facts every derivation satisfies, one by one.

    Probes restriction invariance of corner coefficients, the three-case
    rule for images of subset idempotents, the sign flip between the two
    diagonal units of a pair, the idempotent identity on e_x, e_X and the
    pair idempotents, and the one-pair support of the reduced map.
    """
    poset, ring = d.poset, d.ring
    els = poset.elements
    n = len(els)
    pos = poset.pair_pos
    zero_raw = ring.zero
    rng = random.Random(seed)

    ok_restriction = True
    for _ in range(samples):
        a = element(
            poset,
            ring,
            {
                (els[i], els[j]): ring.sample(rng)
                for i, j in poset.ipairs
            },
        )
        for i, j in poset.ipairs:
            x, y = els[i], els[j]
            left = d.apply_coeff(a, x, y)
            right = d.apply_coeff(restrict(a, x, y), x, y)
            if left != right:
                ok_restriction = False
                break
        if not ok_restriction:
            break

    masks = [rng.getrandbits(n) if n else 0 for _ in range(samples)]
    ok_subset = True
    for mask in masks:
        labels = [els[i] for i in range(n) if mask >> i & 1]
        image = d.apply(subset_idempotent(poset, ring, labels))
        for t, (u, v) in enumerate(poset.ipairs):
            got = image.entries.get((u, v), zero_raw)
            u_in = mask >> u & 1
            v_in = mask >> v & 1
            if u_in and not v_in:
                want = d.cols[pos(u, u)][t]
            elif v_in and not u_in:
                want = d.cols[pos(v, v)][t]
            else:
                want = zero_raw
            if got != want:
                ok_subset = False
                break
        if not ok_subset:
            break

    ok_sign = True
    for t, (x, y) in enumerate(poset.ipairs):
        if d.cols[pos(x, x)][t] != ring.neg(d.cols[pos(y, y)][t]):
            ok_sign = False
            break

    ok_idem = True
    for x in els:
        if not idempotent_identity_check(d, subset_idempotent(poset, ring, [x])):
            ok_idem = False
            break
    if ok_idem:
        for mask in masks:
            labels = [els[i] for i in range(n) if mask >> i & 1]
            if not idempotent_identity_check(
                d, subset_idempotent(poset, ring, labels)
            ):
                ok_idem = False
                break
    if ok_idem:
        for i, j in poset.ipairs:
            if i == j:
                continue
            x, y = els[i], els[j]
            e_pair = unit(poset, ring, x, y)
            for corner in (x, y):
                e = subset_idempotent(poset, ring, [corner]) + e_pair
                if not idempotent_identity_check(d, e):
                    ok_idem = False
                    break
            if not ok_idem:
                break

    alpha_entries = {}
    for t, (x, y) in enumerate(poset.ipairs):
        v = d.cols[pos(y, y)][t]
        if v != zero_raw:
            alpha_entries[(x, y)] = v
    reduced = d - inner(FiElement(poset, ring, alpha_entries))
    ok_support = all(
        reduced.cols[c][r] == zero_raw
        for c in range(poset.npairs)
        for r in range(poset.npairs)
        if r != c
    )

    return LemmaReport(
        ring=ring.designator(),
        seed=seed,
        samples=samples,
        restriction=ok_restriction,
        subset_rule=ok_subset,
        diagonal_sign=ok_sign,
        idempotent_identity=ok_idem,
        reduced_support=ok_support,
    )


# -- theorem harness: enumeration ------------------------------------------


def _decode_endo_cols(index: int, p: int, n: int):
    digits = _decode_digits(index, p, n * n)
    return [digits[c * n:(c + 1) * n] for c in range(n)]


def _scan_endo_range(poset, ring, basis_cols, lo, hi):
    n = poset.npairs
    p = ring.p
    probe_total = p ** n
    n_der = 0
    n_loc = 0
    mismatch = None
    digits = _decode_digits(lo, p, n * n)
    for e in range(lo, hi):
        cols = [digits[c * n:(c + 1) * n] for c in range(n)]
        d = LinearEndo(poset, ring, cols)
        der = is_derivation(d)
        loc = (
            _first_witnessless(poset, ring, cols, basis_cols, 0, probe_total)
            is None
        )
        if der:
            n_der += 1
        if loc:
            n_loc += 1
        if der != loc and mismatch is None:
            mismatch = e
        _increment(digits, p)
    return n_der, n_loc, mismatch


def _scan_endo_chunk(payload):
    poset_text, p, basis_cols, lo, hi = payload
    poset = parse_poset(poset_text)
    return _scan_endo_range(poset, GF(p), basis_cols, lo, hi)


def theorem_verify_enumerate(
    poset: Poset,
    prime: int,
    endo_cap: int | None = None,
    workers: int | None = None,
) -> TheoremReport:
    """Enumerate every linear endomorphism over GF(prime) and compare the
    set of derivations with the set of local derivations."""
    ring = GF(prime)
    cap = DEFAULT_ENDO_CAP if endo_cap is None else endo_cap
    n = poset.npairs
    total = prime ** (n * n)
    if total > cap:
        raise CapExceededError(
            f"{total} endomorphisms exceed the cap of {cap};"
            " raise --endo-cap to allow"
        )
    basis_cols = [b.cols for b in derivation_basis(poset, ring)]
    nworkers = _workers(workers)
    if nworkers <= 1:
        results = [_scan_endo_range(poset, ring, basis_cols, 0, total)]
    else:
        text = poset.serialize()
        payloads = [
            (text, prime, basis_cols, lo, hi)
            for lo, hi in _chunk_ranges(total, _ENDO_CHUNK)
        ]
        results = list(_map_ordered(_scan_endo_chunk, payloads, nworkers))
    s_der = sum(r[0] for r in results)
    s_loc = sum(r[1] for r in results)
    mismatched = any(r[2] is not None for r in results)
    verdict = VERDICT_REFUTED if (mismatched or s_der != s_loc) else VERDICT_CONFIRMED
    return TheoremReport(
        "enumerate", verdict, ring.designator(), s_der, s_loc, total
    )


# -- theorem harness: random campaigns --------------------------------------


def _random_endo_cols(poset, ring, rng):
    n = poset.npairs
    return [[ring.sample(rng) for _ in range(n)] for _ in range(n)]


def _check_der_sample(poset, ring, cols, use_exhaustive, span_seed, cap):
    d = LinearEndo(poset, ring, cols)
    if use_exhaustive:
        report = check_local_exhaustive(d, probe_cap=cap, workers=1)
        ok_local = report.verdict == VERDICT_LOCAL
    else:
        report = check_local_spanning(d, seed=span_seed, probe_cap=cap)
        ok_local = report.verdict == VERDICT_INCONCLUSIVE
    dec = decompose(d)
    ok_dec = dec.residual_norm == 0 and is_cocycle(dec.sigma)
    return ok_local, ok_dec, report.probes_checked


def _check_non_sample(poset, ring, cols, use_exhaustive, span_seed, cap):
    d = LinearEndo(poset, ring, cols)
    if use_exhaustive:
        report = check_local_exhaustive(d, probe_cap=cap, workers=1)
    else:
        report = check_local_spanning(d, seed=span_seed, probe_cap=cap)
    return report.verdict == VERDICT_REJECTED, report.probes_checked


def _scan_sample_chunk(payload):
    kind, poset_text, designator, items, use_exhaustive, cap = payload
    poset = parse_poset(poset_text)
    ring = parse_ring(designator)
    check = _check_der_sample if kind == "der" else _check_non_sample
    return [
        check(poset, ring, cols, use_exhaustive, span_seed, cap)
        for cols, span_seed in items
    ]


def theorem_verify_random(
    poset: Poset,
    ring: CoeffRing,
    trials: int = 50,
    seed: int = 0,
    probe_cap: int | None = None,
    workers: int | None = None,
) -> TheoremReport:
    """Seeded random campaigns for the theorem.

    Random derivations (combinations of the derivation basis) must pass
    the local checks and decompose exactly with a cocycle diagonal part;
    random non-derivations must be rejected.  Over a prime field within
    the probe cap the local check is exhaustive, otherwise spanning.
    """
    if not ring.is_field():
        raise RingError("theorem campaigns need a field")
    cap = DEFAULT_PROBE_CAP if probe_cap is None else probe_cap
    n = poset.npairs
    basis = derivation_basis(poset, ring)
    use_exhaustive = ring.kind == "zp" and ring.p ** n <= cap
    rng = random.Random(seed)

    der_samples = []
    for _ in range(trials):
        coeffs = [ring.sample(rng) for _ in basis]
        d = LinearEndo.zero(poset, ring)
        for c, b in zip(coeffs, basis):
            if c != ring.zero:
                d = d + b.scale(c)
        der_samples.append(d.cols)

    sample_non = len(basis) < n * n
    non_samples = []
    if sample_non:
        for _ in range(trials):
            for _ in range(64):
                cols = _random_endo_cols(poset, ring, rng)
                if not is_derivation(LinearEndo(poset, ring, cols)):
                    non_samples.append(cols)
                    break
            else:
                raise RingError("could not sample a non-derivation")
    der_seeds = [rng.randrange(1 << 32) for _ in range(trials)]
    non_seeds = [rng.randrange(1 << 32) for _ in range(len(non_samples))]

    nworkers = _workers(workers)
    text = poset.serialize()
    designator = ring.designator()

    def run(kind, samples, seeds):
        items = list(zip(samples, seeds))
        payloads = [
            (kind, text, designator, items[lo:hi], use_exhaustive, cap)
            for lo, hi in _chunk_ranges(len(items), _SAMPLE_CHUNK)
        ]
        results = []
        for chunk in _map_ordered(_scan_sample_chunk, payloads, nworkers):
            results.extend(chunk)
        return results

    der_results = run("der", der_samples, der_seeds)
    non_results = run("non", non_samples, non_seeds)

    probes = sum(r[-1] for r in der_results) + sum(r[-1] for r in non_results)
    der_ok = all(ok_local and ok_dec for ok_local, ok_dec, _ in der_results)
    non_ok = all(rejected for rejected, _ in non_results)
    verdict = VERDICT_CONFIRMED if (der_ok and non_ok) else VERDICT_REFUTED
    s_der = len(der_samples)
    s_loc = sum(1 for ok_local, _, _ in der_results if ok_local) + sum(
        0 if rejected else 1 for rejected, _ in non_results
    )
    return TheoremReport(
        "random",
        verdict,
        designator,
        s_der,
        s_loc,
        probes,
        seed=seed,
        trials=trials,
    )
