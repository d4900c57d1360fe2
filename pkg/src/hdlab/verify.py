"""Proposition-level verification: membership predicates, seeded generators and
one check battery per result, each producing a :class:`VerificationReport`.

Every randomized trial ``i`` draws from ``numpy.random.default_rng(seed + i)``,
so reports are deterministic functions of their configuration.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import dilation as dl
from . import hypercube as hc
from .config import SUPPORTED_DIMS, RunConfig
from .cpm import choi_from_transfer, double, min_eigenvalue, random_kraus
from .groupalg import (
    BASIS, ClassicalStructure, FiniteAbelianGroup, PhaseFunction,
    antipode, frobenius_product, hopf_check, spider,
)
from .tensor import Comparison, approx_eq

EXCLUSION_THRESHOLD = 1e-3

PROPOSITIONS = ("1", "2", "3", "4", "5", "6", "7", "8",
                "eq9", "dm-sub-dd", "hopf", "karoubi")


class InfeasibleConfig(ValueError):
    """The requested groups/dimensions cannot host the check."""


@dataclass
class Check:
    """One named quantity. ``bound`` checks pass when ``value <= threshold``;
    ``exclusion`` checks pass when the witness ``value >= threshold``."""

    name: str
    value: float
    threshold: float
    kind: str = "bound"

    @property
    def passed(self) -> bool:
        if self.kind == "exclusion":
            return self.value >= self.threshold
        return self.value <= self.threshold


@dataclass
class VerificationReport:
    proposition: str
    theory: str
    groups: list[str]
    trials: int
    seed: int
    tolerance: float
    checks: list[Check] = field(default_factory=list)
    fitted_scalars: dict[str, float] = field(default_factory=dict)
    statistics: dict[str, float] = field(default_factory=dict)
    elapsed: float | None = None

    @property
    def dims(self) -> list[int]:
        return [FiniteAbelianGroup.parse(g).order for g in self.groups]

    @property
    def max_violation(self) -> float:
        return max((c.value for c in self.checks if c.kind == "bound"), default=0.0)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def bound(self, name: str, value: float, threshold: float | None = None) -> None:
        self.checks.append(Check(name, float(value),
                                 self.tolerance if threshold is None else threshold))

    def exclusion(self, name: str, witness: float) -> None:
        self.checks.append(Check(name, float(witness), EXCLUSION_THRESHOLD,
                                 "exclusion"))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def trial_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng(seed + i)


# -- predicates ---------------------------------------------------------------

def check_quotient(u: hc.DHMap, q: hc.DHMap, tol: float = 1e-9) -> Comparison:
    """``q . u == q``: membership of ``u`` in the group quotiented by ``q``."""
    if (u.d_in, u.d_out) != (q.d_in, q.d_in):
        raise ValueError("dimension mismatch")
    return approx_eq(hc.compose(q, u).tensor, q.tensor, tol)


def check_idempotent(e: hc.DHMap, tol: float = 1e-9) -> Comparison:
    if e.d_in != e.d_out:
        raise ValueError("idempotence needs a square map")
    return approx_eq(hc.compose(e, e).tensor, e.tensor, tol)


def check_causal(f: hc.DHMap, tol: float = 1e-9) -> Comparison:
    r = hc.causality_residual(f)
    return Comparison(r <= tol, r)


def check_subnormalised(f: hc.DHMap, witness: hc.DHMap, tol: float = 1e-9) -> Comparison:
    return check_causal(hc.add(f, witness), tol)


# -- generators -----------------------------------------------------------------

def random_suite(kind: str, dim: int, seed: int):
    """Deterministic random object of the given kind."""
    if dim not in SUPPORTED_DIMS:
        raise ValueError(f"unsupported dimension {dim}")
    rng = np.random.default_rng(seed)
    if kind == "dh-state":
        return hc.random_state(rng, dim)
    if kind == "dd-state":
        return dl.random_dd_state(rng, dim)
    if kind == "cp-map":
        return random_kraus(rng, dim, dim, dim)
    if kind == "dh-map":
        return hc.random_map(rng, dim)
    raise ValueError(f"unknown kind {kind!r}")


def random_pure(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_symmetric_phase(rng: np.random.Generator,
                           group: FiniteAbelianGroup) -> PhaseFunction:
    raw = rng.uniform(-math.pi, math.pi, size=group.order)
    inv = group.inverse_permutation
    return PhaseFunction(group, tuple(raw[min(i, inv[i])] for i in range(group.order)))


def asymmetric_phase(group: FiniteAbelianGroup) -> PhaseFunction | None:
    """A phase function breaking theta_k = theta_(k^-1), if the group allows one."""
    for k, kbar in group.inverse_pairs():
        if k != kbar:
            angles = [0.0] * group.order
            angles[group.index(k)] = 0.7
            angles[group.index(kbar)] = 0.9
            return PhaseFunction(group, tuple(angles))
    return None


# -- Karoubi / quantum sector ---------------------------------------------------

def _karoubi_residuals(f: hc.DHMap, g: hc.DHMap) -> tuple[float, float, float]:
    d = f.d_in
    hyp = hc.hypdec_map(d)
    q_f, q_g = hc.quantum_action(f), hc.quantum_action(g)
    sandwiched = hc.compose(hyp, hc.compose(f, hyp))
    det = approx_eq(sandwiched.tensor, hc.lift_quantum(q_f, d, d).tensor).residual
    cp = max(0.0, -min_eigenvalue(choi_from_transfer(q_f, d, d)))
    comp = hc.quantum_action(hc.compose(f, hc.compose(hyp, g)))
    functor = approx_eq(comp, q_f @ q_g).residual
    return det, cp, functor


def karoubi_quantum_sector_check(dim: int, trials: int, seed: int,
                                 tol: float = 1e-9) -> VerificationReport:
    rep = VerificationReport("karoubi", "density-hypercubes", [f"Z{dim}"],
                             trials, seed, tol)
    det = cp = functor = roundtrip = uhfb = 0.0
    for i in range(trials):
        rng = trial_rng(seed, i)
        f, g = hc.random_map(rng, dim), hc.random_map(rng, dim)
        a, b, c = _karoubi_residuals(f, g)
        det, cp, functor = max(det, a), max(cp, b), max(functor, c)
        psi = random_pure(rng, dim)
        t = hc.embed_quantum(psi)
        roundtrip = max(roundtrip, approx_eq(hc.extract_quantum(t),
                                             np.outer(psi, psi.conj())).residual)
        uhfb = max(uhfb, abs(hc.uhfb_effect(dim)(t)))
    rep.bound("hypdec.F.hypdec determined by quantum action", det)
    rep.bound("quantum action completely positive", cp)
    rep.bound("quantum action functorial through hypdec", functor)
    rep.bound("embed/extract round trip", roundtrip)
    rep.bound("UHfB probability of embedded states", uhfb)

    rng = trial_rng(seed, trials)
    s = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rep.bound("fld(s) acts as doubled Schur square",
              approx_eq(hc.quantum_action(hc.fld(s)),
                        double(s * s).reshape(dim ** 2, dim ** 2)).residual)
    phases = rng.uniform(-math.pi, math.pi, size=dim)
    gate = np.diag(np.exp(2j * phases))
    rep.bound("doubled phase gate acts as phase gate with doubled angles",
              approx_eq(hc.quantum_action(hc.doubled_phase_gate(dim, phases)),
                        double(gate).reshape(dim ** 2, dim ** 2)).residual)
    if dim == 2:
        rep.bound("gadget acts as the identity",
                  approx_eq(hc.quantum_action(hc.phase_gadget(rng.uniform(0, 2 * math.pi))),
                            np.eye(4)).residual)
    return rep


# -- proposition runners ----------------------------------------------------------

def _require(groups: list[FiniteAbelianGroup], pred, what: str) -> list[FiniteAbelianGroup]:
    ok = [g for g in groups if pred(g)]
    if not ok:
        raise InfeasibleConfig(f"no configured group supports {what}")
    return ok


def _prop1(rep: VerificationReport, cfg: RunConfig) -> None:
    for g in cfg.parsed_groups():
        d, tag = g.order, g.spec
        hyp, comp = hc.hypdec_map(g), hc.hypdec_completion(g)
        rep.bound(f"{tag}: hypdec idempotent", check_idempotent(hyp, 0).residual)
        rep.bound(f"{tag}: hypdec certificate", hc.certificate_residual(hyp))
        rep.bound(f"{tag}: completion certificate", hc.certificate_residual(comp))
        rep.bound(f"{tag}: hypdec + completion causal",
                  check_subnormalised(hyp, comp).residual)
        rep.bound(f"{tag}: certified sum causal",
                  hc.causality_residual(hc.dh_denote(hyp.certificate + comp.certificate)))
        rep.exclusion(f"{tag}: hypdec alone not causal", hc.causality_residual(hyp))
        disc = hc.dh_discard(d)
        worst = 0.0
        for i in range(cfg.trials):
            t = hc.random_state(trial_rng(cfg.seed, i), d)
            total = disc(hyp(t)) + disc(comp(t))
            worst = max(worst, abs(total - disc(t)))
        rep.bound(f"{tag}: branch probabilities sum to discard", worst)


def _prop2(rep: VerificationReport, cfg: RunConfig) -> None:
    for g in cfg.parsed_groups():
        d, tag = g.order, g.spec
        dec = hc.dec_map(g)
        quot = causal = inv = 0.0
        for i in range(cfg.trials):
            phi = trial_rng(cfg.seed, i).uniform(-math.pi, math.pi, size=d)
            gate = hc.doubled_phase_gate(g, phi)
            quot = max(quot, check_quotient(gate, dec).residual)
            causal = max(causal, hc.causality_residual(gate))
            back = hc.compose(hc.doubled_phase_gate(g, -phi), gate)
            inv = max(inv, approx_eq(back.tensor, hc.identity(d).tensor).residual)
        rep.bound(f"{tag}: doubled phases erased by dec", quot)
        rep.bound(f"{tag}: doubled phases causal", causal)
        rep.bound(f"{tag}: doubled phases invertible", inv)


def _prop3(rep: VerificationReport, cfg: RunConfig) -> None:
    _require(cfg.parsed_groups(), lambda g: g.order == 2, "qubit gadgets")
    dec, hyp = hc.dec_map(2), hc.hypdec_map(2)
    quot = causal = addition = commute = 0.0
    for i in range(cfg.trials):
        rng = trial_rng(cfg.seed, i)
        a, b = rng.uniform(-math.pi, math.pi, size=2)
        ga = hc.phase_gadget(a)
        quot = max(quot, check_quotient(ga, dec).residual)
        causal = max(causal, hc.causality_residual(ga))
        addition = max(addition, approx_eq(hc.compose(ga, hc.phase_gadget(b)).tensor,
                                           hc.phase_gadget(a + b).tensor).residual)
        dp = hc.doubled_phase_gate(2, rng.uniform(-math.pi, math.pi, size=2))
        commute = max(commute, approx_eq(hc.compose(ga, dp).tensor,
                                         hc.compose(dp, ga).tensor).residual)
    rep.bound("gadgets erased by dec", quot)
    rep.bound("gadgets causal", causal)
    rep.bound("gadget addition law", addition)
    rep.bound("gadgets commute with doubled phases", commute)
    rep.bound("M(0) closed form",
              approx_eq(hc.m_matrix(0.0), np.full((2, 2), 2 ** -0.5)).residual)
    rep.bound("M(pi) closed form",
              approx_eq(hc.m_matrix(math.pi),
                        np.array([[1, -1], [-1, 1]]) * 2 ** -0.5).residual)
    expand = 0.0
    for alpha in (0.3, 1.0, 1.7, 2.5, 3.0):
        r = hc.symmetric_sqrt(hc.m_matrix(alpha))
        expand = max(expand, approx_eq(r, r.T).residual)
        cmp = approx_eq(hc.bridge_expand(r).tensor, hc.phase_gadget(alpha).tensor,
                        cfg.tol, mode="scalar")
        expand = max(expand, cmp.residual if cmp.scalar > 0 else math.inf)
        rep.fitted_scalars[f"bridge expansion scalar alpha={alpha}"] = cmp.scalar
    rep.bound("sqrt M(alpha) bridge expansion equals gadget (scalar mode)", expand)


def _prop4(rep: VerificationReport, cfg: RunConfig) -> None:
    for g in cfg.parsed_groups():
        d, tag = g.order, g.spec
        dec = hc.dec_map(g)
        quot = causal = cert = comp = inv = 0.0
        for i in range(cfg.trials):
            rng = trial_rng(cfg.seed, i)
            psi, phi = random_symmetric_phase(rng, g), random_symmetric_phase(rng, g)
            bp = hc.bridge_phase_map(g, psi)
            quot = max(quot, check_quotient(bp, dec).residual)
            causal = max(causal, hc.causality_residual(bp))
            cert = max(cert, hc.certificate_residual(bp))
            law = hc.compose(bp, hc.bridge_phase_map(g, phi))
            comp = max(comp, approx_eq(
                law.tensor, hc.bridge_phase_map(g, frobenius_product(psi, phi)).tensor
            ).residual)
            back = hc.compose(hc.bridge_phase_map(g, psi.conjugate()), bp)
            inv = max(inv, approx_eq(back.tensor, hc.identity(d).tensor).residual)
        rep.bound(f"{tag}: bridge phases erased by dec", quot)
        rep.bound(f"{tag}: bridge phases causal", causal)
        rep.bound(f"{tag}: bridge phases certified", cert)
        rep.bound(f"{tag}: composition is the Frobenius product", comp)
        rep.bound(f"{tag}: inverse is the conjugate phase", inv)
        bad = asymmetric_phase(g)
        if bad is not None:
            try:
                hc.bridge_phase_map(g, bad)
                witness = 0.0
            except hc.AsymmetricPhaseError as err:
                witness = err.witness
            rep.exclusion(f"{tag}: asymmetric phase rejected (Fourier witness)", witness)
        if d == 2:
            worst = 0.0
            for alpha in (0.3, 1.0, 2.5):
                psi = PhaseFunction(g, (0.0, alpha))
                worst = max(worst, approx_eq(hc.bridge_phase_map(g, psi).tensor,
                                             hc.phase_gadget(alpha).tensor).residual)
            rep.bound(f"{tag}: reduces to the phase gadget", worst)


def _prop5(rep: VerificationReport, cfg: RunConfig) -> None:
    _require(cfg.parsed_groups(), lambda g: g.order == 2, "the qubit hyper-phase group")
    hyp = hc.hypdec_map(2)
    quot = 0.0
    for i in range(cfg.trials):
        alpha = trial_rng(cfg.seed, i).uniform(-math.pi, math.pi)
        quot = max(quot, check_quotient(hc.phase_gadget(alpha), hyp).residual)
    rep.bound("gadgets erased by hypdec", quot)
    witness = check_quotient(hc.doubled_phase_gate(2, (0.0, math.pi / 2)), hyp).residual
    rep.exclusion("doubled phase (0, pi/2) not erased by hypdec", witness)
    grid = min(check_quotient(hc.doubled_phase_gate(2, (0.0, b)), hyp).residual
               for b in np.linspace(0.25, math.pi - 0.25, 12))
    rep.exclusion("doubled phases (0, beta) not erased by hypdec, beta grid", grid)


def _prop6(rep: VerificationReport, cfg: RunConfig) -> None:
    for g in cfg.parsed_groups():
        hyp = hc.hypdec_map(g)
        quot = 0.0
        for i in range(cfg.trials):
            psi = random_symmetric_phase(trial_rng(cfg.seed, i), g)
            quot = max(quot, check_quotient(hc.bridge_phase_map(g, psi), hyp).residual)
        rep.bound(f"{g.spec}: bridge phases erased by hypdec", quot)


def _prop7(rep: VerificationReport, cfg: RunConfig) -> None:
    worst_imag = 0.0
    for d in cfg.dims():
        imag = sym = purif = 0.0
        for i in range(cfg.trials):
            c = dl.random_tripartite(trial_rng(cfg.seed, i), (d, d, d))
            s = dl.dd_state_from_tripartite(c)
            out = dl.candidate_hypdec(s)
            imag = max(imag, float(np.max(np.abs(out.imag))))
            sym = max(sym, float(np.max(np.abs(out - out.T))))
            if i < 20:
                via = dl.dd_denote(dl.tripartite_realization(c)).reshape((d,) * 4)
                purif = max(purif, approx_eq(via, s).residual)
        worst_imag = max(worst_imag, imag)
        rep.bound(f"d={d}: candidate output imaginary part", imag)
        rep.bound(f"d={d}: candidate output symmetric", sym)
        rep.bound(f"d={d}: crosswise denotation reproduces tripartite formula", purif)
    psi = np.array([1, 1j]) / math.sqrt(2)
    out = dl.candidate_hypdec(dl.dd_state_from_tripartite(psi.reshape(2, 1, 1)))
    rho = np.outer(psi, psi.conj())
    rep.statistics["+y witness candidate[0,1] real"] = float(out[0, 1].real)
    rep.statistics["+y witness true rho[0,1] imag"] = float(rho[0, 1].imag)
    # any real candidate output is at least |Im rho[0,1]| away from |+y><+y|
    rep.exclusion("|+y> unreachable: distance from real outputs",
                  abs(rho[0, 1].imag) - worst_imag)


def _dd_cases(d: int) -> list[tuple[int, int]]:
    return [(2, 1), (1, 2), (2, 2)]


def _prop8(rep: VerificationReport, cfg: RunConfig) -> None:
    for d in cfg.dims():
        if d > 3:
            continue
        worst_witness, smin, theory_inv = math.inf, math.inf, 0
        cases = _dd_cases(d)
        for i in range(cfg.trials):
            rng = trial_rng(cfg.seed, i)
            n_kraus, env = cases[i % len(cases)]
            for mixing in (False, True):
                r = dl.random_env_realization(rng, d, n_kraus, env, mixing)
                n = dl.dm_denote(r) if mixing else dl.dd_denote(r)
                probe = dl.invertibility_probe(n)
                worst_witness = min(worst_witness, probe.rank_witness)
                smin = min(smin, probe.smallest_singular_value)
                theory_inv += probe.invertible_in_theory
        rep.exclusion(f"d={d}: nontrivial environments leave the theory "
                      "(Kraus-rank witness)", worst_witness)
        rep.bound(f"d={d}: nontrivial maps invertible in theory (count)", theory_inv, 0)
        rep.statistics[f"d={d}: min smallest singular value, nontrivial maps"] = smin
        cond = 0.0
        for i in range(min(cfg.trials, 50)):
            rng = trial_rng(cfg.seed, i)
            z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            u, _ = np.linalg.qr(z)
            probe = dl.invertibility_probe(dl.folded_unitary(u))
            cond = max(cond, probe.condition_number - 1.0,
                       0.0 if probe.invertible_in_theory else math.inf)
        rep.bound(f"d={d}: folded unitaries invertible, condition number - 1", cond)
    if not rep.checks:
        raise InfeasibleConfig("invertibility probes run for d <= 3")


def _eq9(rep: VerificationReport, cfg: RunConfig) -> None:
    for d in cfg.dims():
        hyp, disc = hc.hypdec_map(d), hc.dh_discard(d)
        viol, gaps = 0.0, []
        for i in range(cfg.trials):
            t = hc.random_state(trial_rng(cfg.seed, i), d)
            h, full = disc(hyp(t)), disc(t)
            viol = max(viol, abs(h.imag), -h.real, h.real - full.real)
            gaps.append(full.real - h.real)
        rep.bound(f"d={d}: 0 <= discard.hypdec <= discard", max(viol, 0.0))
        rep.statistics[f"d={d}: min gap"] = float(min(gaps))
        rep.statistics[f"d={d}: mean gap"] = float(np.mean(gaps))
        plus = hc.uniform_plus(d)
        rep.exclusion(f"d={d}: strict on the uniform plus",
                      (disc(plus) - disc(hyp(plus))).real)


def _dm_sub_dd(rep: VerificationReport, cfg: RunConfig) -> None:
    for d in cfg.dims():
        if d > 3:
            continue
        worst = 0.0
        for i in range(cfg.trials):
            rng = trial_rng(cfg.seed, i)
            env = 2 + i % 2
            r = dl.random_env_realization(rng, d, 1 + i % 2, env, mixing=True)
            worst = max(worst, approx_eq(dl.dm_denote(r),
                                         dl.dd_denote(r.dephased())).residual)
        rep.bound(f"d={d}: DM equals DD after dephasing", worst)
    if not rep.checks:
        raise InfeasibleConfig("the inclusion oracle runs for d <= 3")


def substrate_residuals(g: FiniteAbelianGroup) -> dict[str, float]:
    """Hopf law, spider fusion, Fourier unitarity and character orthogonality."""
    white = ClassicalStructure(g, BASIS)
    out = {}
    hopf = hopf_check(white, tol=1e-12)
    out["hopf"] = hopf.residual if hopf.scalar > 0 else math.inf
    out["hopf scalar"] = hopf.scalar
    fusion = 0.0
    for s in (white, white.dual()):
        for m in range(1, 4):
            for n in range(1, 4):
                if g.order ** (m + n) > 5000:
                    continue
                lhs = np.tensordot(spider(s, 1, n), spider(s, m, 1), axes=([n], [0]))
                fusion = max(fusion, approx_eq(lhs, spider(s, m, n)).residual)
    out["spider fusion"] = fusion
    f = g.fourier_matrix
    out["fourier unitary"] = approx_eq(f @ f.conj().T, np.eye(g.order)).residual
    table = g.character_table
    out["character orthogonality"] = approx_eq(
        table @ table.conj().T, g.order * np.eye(g.order)).residual
    s = antipode(white)
    out["antipode involution"] = approx_eq(s @ s, np.eye(g.order)).residual
    return out


def _hopf(rep: VerificationReport, cfg: RunConfig) -> None:
    for g in cfg.parsed_groups():
        res = substrate_residuals(g)
        rep.fitted_scalars[f"{g.spec}: hopf scalar"] = res.pop("hopf scalar")
        for name, value in res.items():
            rep.bound(f"{g.spec}: {name}", value, min(cfg.tol, 1e-12))


def _karoubi(rep: VerificationReport, cfg: RunConfig) -> None:
    for d in cfg.dims():
        sub = karoubi_quantum_sector_check(d, cfg.trials, cfg.seed, cfg.tol)
        for c in sub.checks:
            rep.checks.append(Check(f"d={d}: {c.name}", c.value, c.threshold, c.kind))


_RUNNERS: dict[str, tuple[str, Callable[[VerificationReport, RunConfig], None]]] = {
    "1": ("density-hypercubes", _prop1),
    "2": ("density-hypercubes", _prop2),
    "3": ("density-hypercubes", _prop3),
    "4": ("density-hypercubes", _prop4),
    "5": ("density-hypercubes", _prop5),
    "6": ("density-hypercubes", _prop6),
    "7": ("double-dilation", _prop7),
    "8": ("double-dilation/double-mixing", _prop8),
    "eq9": ("density-hypercubes", _eq9),
    "dm-sub-dd": ("double-mixing", _dm_sub_dd),
    "hopf": ("group-algebra", _hopf),
    "karoubi": ("density-hypercubes", _karoubi),
}


def run_proposition(prop, config: RunConfig | None = None) -> VerificationReport:
    """Run the check battery for one proposition id (see ``PROPOSITIONS``)."""
    cfg = config or RunConfig()
    key = str(prop)
    if key not in _RUNNERS:
        raise ValueError(f"unknown proposition {prop!r}")
    theory, runner = _RUNNERS[key]
    rep = VerificationReport(key, theory, list(cfg.groups), cfg.trials, cfg.seed, cfg.tol)
    start = time.perf_counter()
    runner(rep, cfg)
    rep.elapsed = time.perf_counter() - start
    return rep
