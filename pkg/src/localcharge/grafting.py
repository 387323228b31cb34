"""Open and closed grafting with exact charge bookkeeping."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .bundle import BundleSpec, ExtensionClass, format_term, split_off
from .invariants import LocalInvariants, TruncationPolicy, compute_charge, is_instanton_type

log = logging.getLogger(__name__)


class ParityViolation(ValueError):
    """Closed grafting Z_k -> Z_k' needs k' = k mod 2."""


@dataclass(frozen=True)
class LedgerEntry:
    operation: str
    spec: BundleSpec
    delta: int


@dataclass(frozen=True)
class GlobalLedger:
    """Second Chern class of a global bundle plus the patches applied to it.

    The gluing is never modelled: the resulting c2 depends only on the two
    bundles, not on how they are glued.
    """

    initial: int = 0
    log: Tuple[LedgerEntry, ...] = ()

    @property
    def c2_global(self) -> int:
        return self.initial + sum(e.delta for e in self.log)

    def to_json(self) -> dict:
        return {
            "c2_global": self.c2_global,
            "initial": self.initial,
            "log": [{"operation": e.operation, "spec": e.spec.to_json(), "delta": e.delta} for e in self.log],
        }


def open_graft(ledger: GlobalLedger, local: BundleSpec, policy: Optional[TruncationPolicy] = None) -> GlobalLedger:
    """Patch ``local`` in around a curve; c2 grows by its local charge."""
    delta = compute_charge(local, policy).charge
    return GlobalLedger(ledger.initial, ledger.log + (LedgerEntry("open_graft", local, delta),))


@dataclass(frozen=True)
class GraftResult:
    before_k: int
    before: LocalInvariants
    after_k: int
    after: LocalInvariants
    spec_before: BundleSpec
    spec_after: BundleSpec
    instanton_before: bool
    instanton_after: bool
    dropped_terms: ExtensionClass = field(default_factory=ExtensionClass)

    @property
    def charge_loss(self) -> int:
        return self.before.charge - self.after.charge

    @property
    def extrapolation(self) -> bool:
        """k' < k has no worked example behind it."""
        return self.after_k < self.before_k

    def summary(self) -> str:
        return f"charge {self.before.charge} -> {self.after.charge} (loss {self.charge_loss})"

    def to_json(self) -> dict:
        return {
            "before": {"k": self.before_k, **self.before.to_json()},
            "after": {"k": self.after_k, **self.after.to_json()},
            "spec_before": self.spec_before.to_json(),
            "spec_after": self.spec_after.to_json(),
            "charge_loss": self.charge_loss,
            "instanton_before": self.instanton_before,
            "instanton_after": self.instanton_after,
            "dropped_terms": self.dropped_terms.to_json(),
            "extrapolation": self.extrapolation,
        }


def closed_graft(spec: BundleSpec, k_new: int, policy: Optional[TruncationPolicy] = None) -> GraftResult:
    """Swap Z_k for Z_k' keeping the transition matrix.

    Terms of p that become coboundaries on Z_k' are dropped and reported.
    With ``policy=None`` each side gets its own default caps.
    """
    if k_new < 1:
        raise ParityViolation(f"k' must be positive, got {k_new}")
    if (k_new - spec.k) % 2:
        raise ParityViolation(f"cannot graft Z_{spec.k} to Z_{k_new}: k' must equal k mod 2")
    keep, dropped = split_off(k_new, spec.j, spec.p)
    after_spec = BundleSpec(k_new, spec.j, keep)
    if dropped:
        log.info("graft %s -> Z_%d drops %s", spec, k_new, ", ".join(format_term(t) for t in dropped))
    before = compute_charge(spec, policy)
    after = compute_charge(after_spec, policy)
    return GraftResult(
        before_k=spec.k,
        before=before,
        after_k=k_new,
        after=after,
        spec_before=spec,
        spec_after=after_spec,
        instanton_before=is_instanton_type(spec.k, spec.j),
        instanton_after=is_instanton_type(k_new, spec.j),
        dropped_terms=dropped,
    )


def _graft(args):
    return closed_graft(*args)


def decay_search(spec: BundleSpec, k_max: int, policy: Optional[TruncationPolicy] = None,
                 jobs: int = 1) -> List[GraftResult]:
    """Closed grafts to every admissible k' <= k_max, largest charge loss first."""
    targets = []
    for k_new in range(1, k_max + 1):
        if k_new == spec.k:
            continue
        if (k_new - spec.k) % 2:
            log.debug("skip Z_%d: parity differs from Z_%d", k_new, spec.k)
            continue
        targets.append(k_new)
    work = [(spec, k_new, policy) for k_new in targets]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_graft, work))
    else:
        results = [_graft(w) for w in work]
    results.sort(key=lambda r: (-r.charge_loss, r.after_k))
    return results
