from __future__ import annotations
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from .cones import ConeVerdict, ConeAnswer, MAX_COPOSITIVE_DIM, is_psd, is_copositive, is_completely_positive, find_positive_kernel
from .distribution import EllipticalDistribution, DimensionMismatch, check_comparable
from .utils.tolerance import EQUALITY_TOL, PSD_TOL, scale


class OrderRelation(Enum):
    ST = 'st'
    CX = 'cx'
    LCX = 'lcx'
    ICX = 'icx'
    SM = 'sm'
    ISM = 'ism'
    DCX = 'dcx'
    IDCX = 'idcx'
    UO = 'uo'
    CCX = 'ccx'
    ICCX = 'iccx'
    CP = 'cp'
    COP = 'cop'

    @classmethod
    def parse(cls, value: Union[str, OrderRelation]) -> OrderRelation:
        if isinstance(value, cls):
            return value
        if not isinstance(value, str):
            raise TypeError(f"the 'rel' specified was of wrong type {type(value)}, expected {str}.")
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"unknown order relation '{value}', expected one of {[r.value for r in cls]}.") from None


class Verdict(Enum):
    HOLDS = 'Holds'
    FAILS = 'Fails'
    UNDETERMINED = 'Undetermined'


@dataclass
class Witness:
    """Evidence against a condition. Entries and indices are 1-based."""
    kind: str
    description: str
    entry: Optional[Tuple[int, ...]] = None
    vector: Optional[List[float]] = None
    value: Optional[float] = None


@dataclass
class OrderReport:
    relation: OrderRelation
    verdict: Verdict
    basis: str
    witness: Optional[Witness] = None
    conditions: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)


CITATIONS = {
    OrderRelation.ST: "Theorem 3.1",
    OrderRelation.CX: "Theorem 3.2",
    OrderRelation.LCX: "Theorem 3.2",
    OrderRelation.ICX: "Theorem 3.3, Remark 3.1",
    OrderRelation.SM: "Theorem 3.4",
    OrderRelation.ISM: "Theorem 3.5, Corollary 3.1",
    OrderRelation.DCX: "Theorem 3.6",
    OrderRelation.IDCX: "Theorem 3.7",
    OrderRelation.UO: "Theorem 3.8, Corollary 3.2",
    OrderRelation.CCX: "Theorem 3.9",
    OrderRelation.ICCX: "Theorem 3.10",
    OrderRelation.CP: "Theorem 3.11",
    OrderRelation.COP: "Theorem 3.11"}
UNIVARIATE_CITATION = "Lemma 2.2"

CRITERIA = {
    OrderRelation.ST: "usual stochastic order: location dominance with equal dispersion",
    OrderRelation.CX: "convex order: equal location and positive semidefinite dispersion increase",
    OrderRelation.LCX: "linear convex order: same criterion as the convex order",
    OrderRelation.ICX: "increasing convex order: PSD increase is sufficient, copositive increase is necessary",
    OrderRelation.SM: "supermodular order: equal marginals and nondecreasing off-diagonal dispersion",
    OrderRelation.ISM: "increasing supermodular order: sufficient dispersion criterion, necessary product moment criterion",
    OrderRelation.DCX: "directionally convex order: equal location and entrywise nonnegative dispersion increase",
    OrderRelation.IDCX: "increasing directionally convex order: location dominance and entrywise nonnegative dispersion increase",
    OrderRelation.UO: "upper orthant order: sufficient dispersion criterion, necessary product moment criterion",
    OrderRelation.CCX: "componentwise convex order: equal location, nonnegative variance increase, equal covariances",
    OrderRelation.ICCX: "increasing componentwise convex order: location dominance, nonnegative variance increase, equal covariances",
    OrderRelation.CP: "order generated by functions with completely positive Hessian: copositive dispersion increase",
    OrderRelation.COP: "order generated by functions with copositive Hessian: completely positive dispersion increase"}

BASIS = {rel: f"{CITATIONS[rel]}: {CRITERIA[rel]}" for rel in OrderRelation}

SUPPORT_SENSITIVE = (OrderRelation.ST, OrderRelation.ISM, OrderRelation.UO)


def _cone_witness(name: str, verdict: ConeVerdict) -> Witness:
    vector = None if verdict.witness is None or verdict.witness.ndim != 1 else verdict.witness.tolist()
    return Witness(kind='cone', description=f"dispersion increase is not {name}: {verdict.note}", vector=vector, value=verdict.value)


class _Criteria(object):
    '''The elementary parameter conditions shared by the rows of the decision table.'''
    def __init__(self, dX: EllipticalDistribution, dY: EllipticalDistribution, equality_tol: float, psd_tol: float):
        self.dX = dX
        self.dY = dY
        self.n = dX.n
        self.delta = dY.mu - dX.mu
        self.D = dY.sigma - dX.sigma
        self.equality_tol = equality_tol
        self.psd_tol = psd_tol
        self.mean_slack = equality_tol * scale(dX.mu, dY.mu)
        self.dispersion_slack = equality_tol * scale(dX.sigma, dY.sigma)
        self.checked: List[str] = []

    def _log(self, condition: str, witness: Optional[Witness]) -> Optional[Witness]:
        self.checked.append(f"{condition}: {'no' if witness else 'yes'}")
        return witness

    def mean_equal(self) -> Optional[Witness]:
        bad = np.flatnonzero(np.abs(self.delta) > self.mean_slack)
        witness = None if bad.size == 0 else Witness(
            'index', f"mu differs at index {bad[0] + 1}", entry=(int(bad[0]) + 1,), value=float(self.delta[bad[0]]))
        return self._log("mu_y = mu_x", witness)

    def mean_dominates(self) -> Optional[Witness]:
        bad = np.flatnonzero(self.delta < -self.mean_slack)
        witness = None if bad.size == 0 else Witness(
            'index', f"mu decreases at index {bad[0] + 1}", entry=(int(bad[0]) + 1,), value=float(self.delta[bad[0]]))
        return self._log("mu_x <= mu_y", witness)

    def means_zero(self) -> bool:
        return bool(np.all(np.abs(self.dX.mu) <= self.mean_slack) and np.all(np.abs(self.dY.mu) <= self.mean_slack))

    def _entry_witness(self, mask: np.ndarray, description: str) -> Optional[Witness]:
        bad = np.argwhere(mask)
        if bad.size == 0:
            return None
        i, j = int(bad[0][0]), int(bad[0][1])
        return Witness('entry', f"{description} at entry ({i + 1}, {j + 1})", entry=(i + 1, j + 1), value=float(self.D[i, j]))

    def dispersion_equal(self) -> Optional[Witness]:
        return self._log("Sigma_y = Sigma_x", self._entry_witness(np.abs(self.D) > self.dispersion_slack, "dispersion differs"))

    def diagonal_equal(self) -> Optional[Witness]:
        mask = np.diag(np.abs(np.diag(self.D)) > self.dispersion_slack)
        return self._log("diag(Sigma_y) = diag(Sigma_x)", self._entry_witness(mask, "variance differs"))

    def diagonal_nondecreasing(self) -> Optional[Witness]:
        mask = np.diag(np.diag(self.D) < -self.dispersion_slack)
        return self._log("diag(Sigma_y - Sigma_x) >= 0", self._entry_witness(mask, "variance decreases"))

    def off_diagonal_nondecreasing(self) -> Optional[Witness]:
        mask = np.triu(self.D < -self.dispersion_slack, k=1)
        return self._log("off-diagonal of Sigma_y - Sigma_x >= 0", self._entry_witness(mask, "covariance decreases"))

    def off_diagonal_equal(self) -> Optional[Witness]:
        mask = np.triu(np.abs(self.D) > self.dispersion_slack, k=1)
        return self._log("off-diagonal of Sigma_y = off-diagonal of Sigma_x", self._entry_witness(mask, "covariance differs"))

    def entrywise_nonnegative(self) -> Optional[Witness]:
        mask = np.triu(self.D < -self.dispersion_slack)
        return self._log("Sigma_y - Sigma_x >= 0 entrywise", self._entry_witness(mask, "dispersion decreases"))

    def psd(self) -> Tuple[ConeVerdict, Optional[Witness]]:
        verdict = is_psd(self.D, self.psd_tol)
        return verdict, self._log("Sigma_y - Sigma_x positive semidefinite", None if verdict.yes else _cone_witness('positive semidefinite', verdict))

    def product_moments(self) -> Optional[Witness]:
        """E(X_i X_j) <= E(Y_i Y_j) for i < j, with E(X_i X_j) = mu_i mu_j + (-2 phi'(0)) sigma_ij."""
        factor = self.dX.gen.covariance_factor(self.n)
        moments_x = np.outer(self.dX.mu, self.dX.mu) + factor * self.dX.sigma
        moments_y = np.outer(self.dY.mu, self.dY.mu) + factor * self.dY.sigma
        slack = self.equality_tol * scale(moments_x, moments_y)
        bad = np.argwhere(np.triu(moments_x - moments_y > slack, k=1))
        witness = None
        if bad.size:
            i, j = int(bad[0][0]), int(bad[0][1])
            witness = Witness(
                'entry', f"E(X_{i + 1} X_{j + 1}) > E(Y_{i + 1} Y_{j + 1})", entry=(i + 1, j + 1),
                value=float(moments_y[i, j] - moments_x[i, j]))
        return self._log("E(X_i X_j) <= E(Y_i Y_j) for i < j", witness)


def _first(*conditions: Callable[[], Optional[Witness]]) -> Optional[Witness]:
    """Evaluates the conditions in order and returns the first violation."""
    for condition in conditions:
        witness = condition()
        if witness is not None:
            return witness
    return None

def _report(rel: OrderRelation, criteria: _Criteria, witness: Optional[Witness], notes: List[str] = None) -> OrderReport:
    verdict = Verdict.HOLDS if witness is None else Verdict.FAILS
    return OrderReport(rel, verdict, BASIS[rel], witness, list(criteria.checked), notes or [])

def _undetermined(rel: OrderRelation, criteria: _Criteria, note: str) -> OrderReport:
    return OrderReport(rel, Verdict.UNDETERMINED, BASIS[rel], None, list(criteria.checked), [note])

def _check_st(c: _Criteria) -> OrderReport:
    return _report(OrderRelation.ST, c, _first(c.mean_dominates, c.dispersion_equal))

def _check_cx(c: _Criteria, rel: OrderRelation = OrderRelation.CX) -> OrderReport:
    return _report(rel, c, _first(c.mean_equal, lambda: c.psd()[1]))

def _check_lcx(c: _Criteria) -> OrderReport:
    return _check_cx(c, OrderRelation.LCX)

def _check_icx(c: _Criteria) -> OrderReport:
    rel = OrderRelation.ICX
    mean_witness = c.mean_dominates()
    if mean_witness is not None:
        return _report(rel, c, mean_witness)
    psd, psd_witness = c.psd()
    if psd_witness is None:
        return _report(rel, c, None)
    if c.n > MAX_COPOSITIVE_DIM:
        return _undetermined(rel, c, f"copositivity is not decided for n > {MAX_COPOSITIVE_DIM}")
    copositive = is_copositive(c.D, c.psd_tol)
    if copositive.no:
        c.checked.append("Sigma_y - Sigma_x copositive: no")
        return _report(rel, c, _cone_witness('copositive', copositive))
    c.checked.append("Sigma_y - Sigma_x copositive: yes")
    kernel = find_positive_kernel(c.D)
    if kernel is not None:
        c.checked.append("Sigma_y - Sigma_x has a positive kernel vector: yes")
        return _report(rel, c, psd_witness, [
            f"Remark 3.1: positive kernel vector {kernel.tolist()} makes positive semidefiniteness necessary"])
    c.checked.append("Sigma_y - Sigma_x has a positive kernel vector: no")
    return _undetermined(rel, c, "Remark 3.1 gap: dispersion increase is copositive but not PSD and has no positive kernel vector")

def _check_sm(c: _Criteria) -> OrderReport:
    return _report(OrderRelation.SM, c, _first(c.mean_equal, c.diagonal_equal, c.off_diagonal_nondecreasing))

def _check_increasing_supermodular(c: _Criteria, rel: OrderRelation) -> OrderReport:
    sufficient = _first(c.mean_dominates, c.diagonal_equal, c.off_diagonal_nondecreasing)
    if sufficient is None:
        return _report(rel, c, None)
    if c.means_zero():
        return _report(rel, c, sufficient, ["zero locations make the dispersion criterion necessary and sufficient"])
    necessary = _first(c.mean_dominates, c.diagonal_equal, c.product_moments)
    if necessary is not None:
        return _report(rel, c, necessary)
    return _undetermined(rel, c, "necessary product moment conditions hold but the dispersion criterion fails for nonzero locations")

def _check_ism(c: _Criteria) -> OrderReport:
    return _check_increasing_supermodular(c, OrderRelation.ISM)

def _check_uo(c: _Criteria) -> OrderReport:
    return _check_increasing_supermodular(c, OrderRelation.UO)

def _check_dcx(c: _Criteria) -> OrderReport:
    return _report(OrderRelation.DCX, c, _first(c.mean_equal, c.entrywise_nonnegative))

def _check_idcx(c: _Criteria) -> OrderReport:
    return _report(OrderRelation.IDCX, c, _first(c.mean_dominates, c.entrywise_nonnegative))

def _check_ccx(c: _Criteria) -> OrderReport:
    return _report(OrderRelation.CCX, c, _first(c.mean_equal, c.diagonal_nondecreasing, c.off_diagonal_equal))

def _check_iccx(c: _Criteria) -> OrderReport:
    return _report(OrderRelation.ICCX, c, _first(c.mean_dominates, c.diagonal_nondecreasing, c.off_diagonal_equal))

def _check_cp(c: _Criteria) -> OrderReport:
    rel = OrderRelation.CP
    mean_witness = c.mean_equal()
    if mean_witness is not None:
        return _report(rel, c, mean_witness)
    if c.n > MAX_COPOSITIVE_DIM:
        return _undetermined(rel, c, f"copositivity is not decided for n > {MAX_COPOSITIVE_DIM}")
    copositive = is_copositive(c.D, c.psd_tol)
    c.checked.append(f"Sigma_y - Sigma_x copositive: {'yes' if copositive.yes else 'no'}")
    return _report(rel, c, None if copositive.yes else _cone_witness('copositive', copositive))

def _check_cop(c: _Criteria) -> OrderReport:
    rel = OrderRelation.COP
    mean_witness = c.mean_equal()
    if mean_witness is not None:
        return _report(rel, c, mean_witness)
    completely_positive = is_completely_positive(c.D, entry_tol=c.dispersion_slack / scale(c.D))
    c.checked.append(f"Sigma_y - Sigma_x completely positive: {completely_positive.verdict.value}")
    if completely_positive.verdict is ConeAnswer.UNDETERMINED:
        return _undetermined(rel, c, completely_positive.note)
    if completely_positive.yes:
        return _report(rel, c, None, [completely_positive.note])
    return _report(rel, c, _cone_witness('completely positive', completely_positive))

CHECKS: Dict[OrderRelation, Callable[[_Criteria], OrderReport]] = {
    OrderRelation.ST: _check_st,
    OrderRelation.CX: _check_cx,
    OrderRelation.LCX: _check_lcx,
    OrderRelation.ICX: _check_icx,
    OrderRelation.SM: _check_sm,
    OrderRelation.ISM: _check_ism,
    OrderRelation.DCX: _check_dcx,
    OrderRelation.IDCX: _check_idcx,
    OrderRelation.UO: _check_uo,
    OrderRelation.CCX: _check_ccx,
    OrderRelation.ICCX: _check_iccx,
    OrderRelation.CP: _check_cp,
    OrderRelation.COP: _check_cop}


def _unsupported_support(rel: OrderRelation, dX: EllipticalDistribution) -> Optional[OrderReport]:
    if rel in SUPPORT_SENSITIVE and not dX.gen.unbounded_support:
        note = f"the {rel.value} criterion assumes support on the whole space; {dX.gen.NAME} has bounded support"
        warnings.warn(note, RuntimeWarning)
        return OrderReport(rel, Verdict.UNDETERMINED, BASIS[rel], None, [], [note])
    return None

def check_order(dX: EllipticalDistribution, dY: EllipticalDistribution, rel: Union[str, OrderRelation],
                equality_tol: float = EQUALITY_TOL, psd_tol: float = PSD_TOL) -> OrderReport:
    """Decides X <=_rel Y from the parameters of two elliptical laws with a common generator."""
    rel = OrderRelation.parse(rel)
    check_comparable(dX, dY)
    if np.array_equal(dX.mu, dY.mu) and np.array_equal(dX.sigma, dY.sigma):
        return OrderReport(rel, Verdict.HOLDS, BASIS[rel], None, ["identical parameters"], ["every order is reflexive"])
    unsupported = _unsupported_support(rel, dX)
    if unsupported is not None:
        return unsupported
    return CHECKS[rel](_Criteria(dX, dY, equality_tol, psd_tol))

def check_univariate(dX: EllipticalDistribution, dY: EllipticalDistribution, rel: Union[str, OrderRelation],
                     equality_tol: float = EQUALITY_TOL) -> OrderReport:
    """Decides the st, cx and icx orders between two univariate elliptical laws from (mu, sigma)."""
    rel = OrderRelation.parse(rel)
    if rel not in (OrderRelation.ST, OrderRelation.CX, OrderRelation.ICX):
        raise ValueError(f"univariate comparison supports st, cx and icx, got {rel.value}.")
    check_comparable(dX, dY)
    if dX.n != 1:
        raise DimensionMismatch(f"univariate comparison needs n = 1, got n = {dX.n}.")
    unsupported = _unsupported_support(rel, dX) if rel is OrderRelation.ST else None
    if unsupported is not None:
        return unsupported
    mu_x, mu_y = float(dX.mu[0]), float(dY.mu[0])
    sigma_x, sigma_y = math.sqrt(dX.sigma[0, 0]), math.sqrt(dY.sigma[0, 0])
    mean_slack = equality_tol * (1.0 + max(abs(mu_x), abs(mu_y)))
    scale_slack = equality_tol * (1.0 + max(sigma_x, sigma_y))
    conditions = {
        'mu_x <= mu_y': (mu_x <= mu_y + mean_slack, Witness('index', "mu decreases", entry=(1,), value=mu_y - mu_x)),
        'mu_x = mu_y': (abs(mu_x - mu_y) <= mean_slack, Witness('index', "mu differs", entry=(1,), value=mu_y - mu_x)),
        'sigma_x = sigma_y': (abs(sigma_x - sigma_y) <= scale_slack, Witness('entry', "scale differs", entry=(1, 1), value=sigma_y - sigma_x)),
        'sigma_x <= sigma_y': (sigma_x <= sigma_y + scale_slack, Witness('entry', "scale decreases", entry=(1, 1), value=sigma_y - sigma_x))}
    required = {
        OrderRelation.ST: ('mu_x <= mu_y', 'sigma_x = sigma_y'),
        OrderRelation.CX: ('mu_x = mu_y', 'sigma_x <= sigma_y'),
        OrderRelation.ICX: ('mu_x <= mu_y', 'sigma_x <= sigma_y')}[rel]
    checked, witness = [], None
    for name in required:
        holds, violation = conditions[name]
        checked.append(f"{name}: {'yes' if holds else 'no'}")
        if not holds and witness is None:
            witness = violation
    verdict = Verdict.HOLDS if witness is None else Verdict.FAILS
    basis = f"{UNIVARIATE_CITATION}: univariate {CRITERIA[rel].split(':')[0]}: location and scale comparison"
    return OrderReport(rel, verdict, basis, witness, checked)

def explain(report: OrderReport) -> str:
    """Human-readable account of a report: the criterion, the tested conditions and the witness."""
    lines = [f"X <=_{report.relation.value} Y: {report.verdict.value}", f"criterion: {report.basis}"]
    if report.conditions:
        lines.append("tested conditions:")
        lines.extend(f"  - {condition}" for condition in report.conditions)
    if report.witness is not None:
        lines.append(f"witness: {report.witness.description}")
        if report.witness.entry is not None:
            lines.append(f"  entry {report.witness.entry}")
        if report.witness.vector is not None:
            lines.append(f"  vector {report.witness.vector}")
        if report.witness.value is not None:
            lines.append(f"  value {report.witness.value!r}")
    if report.verdict is Verdict.UNDETERMINED:
        lines.append("the sufficient and necessary conditions known for this order do not meet here")
    lines.extend(f"note: {note}" for note in report.notes)
    return "\n".join(lines)
