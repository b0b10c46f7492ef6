"""Run the requested checks of a scenario in dependency order."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..errors import (
    EvaluationFailure,
    SectorialError,
    UniformBoundUnverified,
)
from ..holo import eval_family, perturbation_radius, resolvent_holomorphy_check, shift_family
from ..laxmilgram import (
    accretivity_margin,
    associated_operator,
    canonical_injection,
    coercivity_constant,
    laxmilgram_inverse_norm,
    laxmilgram_solve,
)
from ..sector import (
    max_vertex,
    min_semiangle,
    norm_equivalence_check,
    random_vectors,
    sampled_sector_excess,
    sector_check,
)
from ..semigroup import (
    exponential_formula_convergence,
    resolvent_power_bound_check,
    sector_semigroup_check,
    semigroup_holomorphy_check,
)
from .config import CHECK_ORDER, Scenario, _to_complex

PREREQUISITES = {
    "laxmilgram": (),
    "sector": (),
    "uniform_sector": (),
    "norm_equiv": ("uniform_sector",),
    "resolvent_holo": ("uniform_sector",),
    "eq5": ("laxmilgram",),
    "eq6": ("laxmilgram",),
    "thm4a": ("uniform_sector", "resolvent_holo"),
    "thm4b": ("uniform_sector", "resolvent_holo"),
    "remark_a": ("uniform_sector", "resolvent_holo"),
}


class CheckFailed(Exception):
    def __init__(self, reason: str, witness=None):
        self.reason = reason
        self.witness = witness
        super().__init__(reason)


@dataclass
class CheckResult:
    name: str
    status: str
    reason: str = ""
    constants: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    witness: dict | None = None
    wall_clock_s: float = 0.0


@dataclass
class Report:
    scenario: str
    seed: int
    normalization: dict
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def statuses(self) -> dict:
        return {c.name: c.status for c in self.checks}


def _table(columns, rows) -> dict:
    return {"columns": list(columns), "rows": [list(r) for r in rows]}


def _witness_from(exc: Exception) -> dict | None:
    out = {}
    for attr in ("node", "z", "t", "value", "bound", "eigenvalue", "witness"):
        if hasattr(exc, attr) and getattr(exc, attr) is not None:
            out[attr] = getattr(exc, attr)
    return out or None


class _Run:
    def __init__(self, scenario: Scenario):
        self.sc = scenario
        self.tol = scenario.tolerances
        self.results: dict[str, CheckResult] = {}
        self.cache: dict = {}
        fam = scenario.build_family()
        self.vertex_before = max_vertex(eval_family(fam, 0), fam.embedding)
        self.shift = scenario.shift if scenario.shift is not None else 1.0 - self.vertex_before
        self.family = shift_family(fam, self.shift) if self.shift else fam
        self.emb = self.family.embedding
        self.space_v = self.emb.domain
        self.space_h = self.emb.codomain
        self.a0 = eval_family(self.family, 0)

    def rng(self, name: str) -> np.random.Generator:
        return np.random.default_rng([self.sc.seed, CHECK_ORDER.index(name)])

    def run(self, name: str) -> CheckResult:
        if name in self.results:
            return self.results[name]
        for pre in PREREQUISITES[name]:
            if self.run(pre).status != "pass":
                res = CheckResult(name, "skip", f"prerequisite failed: {pre}")
                self.results[name] = res
                return res
        start = time.perf_counter()
        res = CheckResult(name, "pass")
        try:
            getattr(self, "check_" + name)(res)
        except CheckFailed as exc:
            res.status, res.reason, res.witness = "fail", exc.reason, exc.witness
        except SectorialError as exc:
            res.status, res.reason, res.witness = "fail", f"{type(exc).__name__}: {exc}", _witness_from(exc)
        res.wall_clock_s = time.perf_counter() - start
        self.results[name] = res
        return res

    # -- checks ------------------------------------------------------------

    def operator(self):
        if "A0" not in self.cache:
            self.cache["A0"] = associated_operator(self.a0, self.emb)
        return self.cache["A0"]

    def check_laxmilgram(self, res: CheckResult):
        tol = self.tol
        cert = coercivity_constant(self.a0, self.space_v)
        inv_norm = laxmilgram_inverse_norm(self.a0, self.space_v)
        op = self.operator()
        J = self.emb.mat
        cols = []
        for i in range(self.space_h.dim):
            e = np.zeros(self.space_h.dim, complex)
            e[i] = 1.0
            cols.append(J @ laxmilgram_solve(self.a0, self.space_v, canonical_injection(self.emb, e)))
        oracle = np.column_stack(cols)
        composition_err = float(np.linalg.norm(op.inv_mat - oracle) / np.linalg.norm(oracle))
        margin = accretivity_margin(op)
        c = self.emb.bound
        floor = cert.alpha / c**2
        bound = 1.0 / cert.alpha
        res.constants.update(alpha=cert.alpha, c=c, inverse_norm=inv_norm, inverse_bound=bound,
                             composition_rel_error=composition_err, accretivity_margin=margin, accretivity_floor=floor)
        rows = [
            ("inverse_norm", inv_norm, bound, bound - inv_norm),
            ("composition_rel_error", composition_err, tol["composition_rtol"], tol["composition_rtol"] - composition_err),
            ("accretivity_margin", margin, floor, margin - floor),
        ]
        hermitian = np.linalg.norm(self.a0.im_part) <= tol["hermitian_rtol"] * np.linalg.norm(self.a0.mat)
        if hermitian:
            gap = abs(inv_norm - bound) / bound
            res.constants["tightness_gap"] = gap
            rows.append(("tightness_gap", gap, tol["tightness_rtol"], tol["tightness_rtol"] - gap))
        res.tables["bounds"] = _table(["quantity", "value", "bound", "margin"], rows)
        if composition_err > tol["composition_rtol"]:
            raise CheckFailed(f"inverse composition differs from the column-wise oracle by {composition_err:.3e}",
                              {"rel_error": composition_err})
        if hermitian and res.constants["tightness_gap"] > tol["tightness_rtol"]:
            raise CheckFailed("Lax-Milgram bound not tight on a Hermitian form", {"witness": cert.witness})

    def check_sector(self, res: CheckResult):
        tol = self.tol
        est = min_semiangle(self.a0, self.emb, 0.0, tol["psd_rtol"])
        chk = sector_check(self.a0, self.emb, 0.0, est.slope, tol["psd_rtol"])
        count = self.sc.holo["range_samples"]
        seed = int(self.rng("sector").integers(2**31))
        excess = sampled_sector_excess(self.a0, self.emb, 0.0, est.slope, count, seed)
        res.constants.update(vertex=max_vertex(self.a0, self.emb), C0=est.slope,
                             semi_angle=est.semi_angle, pencil_margin=chk.margin,
                             sampled_excess=excess)
        res.tables["sector"] = _table(
            ["quantity", "value", "bound", "margin"],
            [("pencil_margin", chk.margin, 0.0, chk.margin),
             ("sampled_excess", excess, tol["sampling_slack"], tol["sampling_slack"] - excess)])
        if not chk.ok:
            raise CheckFailed("minimal sector does not certify", {"witness": est.tight_witness})
        scale = max(1.0, abs(self.a0.mat).max())
        if excess > tol["sampling_slack"] * scale:
            raise CheckFailed(f"sampled numerical range leaves the certified sector by {excess:.3e}",
                              {"excess": excess})

    def certificate(self):
        if "cert" not in self.cache:
            self.cache["cert"] = perturbation_radius(
                self.family, self.tol["normalization_tol"], self.sc.holo["boundary_samples"])
        return self.cache["cert"]

    def check_uniform_sector(self, res: CheckResult):
        tol = self.tol
        slack = tol["bound_slack"]
        cert = self.certificate()
        budget = cert.budget
        res.constants.update(radius=cert.radius, C_big=cert.C_big, C0=cert.C0,
                             slope_bound=cert.slope_bound, budget=budget,
                             degenerate=cert.degenerate)
        rng = self.rng("uniform_sector")
        U = random_vectors(rng, self.sc.holo["random_u"], self.space_v.dim)
        U /= self.space_v.vector_norms(U)[:, None]
        a0_vals = _kernels.quad_forms(self.a0.mat, U)
        re0 = a0_vals.real
        pert_rows, slope_rows, ineq_rows = [], [], []
        worst = np.inf
        for i, z in enumerate(cert.sample_z):
            az = eval_family(self.family, z)
            az_vals = _kernels.quad_forms(az.mat, U)
            diff = np.abs(az_vals - a0_vals)
            checks = {
                "eq2_budget": budget - diff,
                "eq2_half": 0.5 * re0 - diff,
                "eq3_lower": az_vals.real - 0.5 * re0,
                "eq3_coercive": 0.5 * re0 - budget,
                "chain_first": (cert.C0 + 0.5) * re0 - np.abs(az_vals.imag),
                "chain_second": cert.slope_bound * az_vals.real - (cert.C0 + 0.5) * re0,
            }
            for key, margins in checks.items():
                k = int(np.argmin(margins))
                worst = min(worst, margins[k])
                if margins[k] < -slack:
                    raise CheckFailed(f"{key} violated by {-margins[k]:.3e} at z = {z:.6g}",
                                      {"z": z, "u": U[k]})
            ineq_rows.append((i, min(float(m.min()) for m in checks.values())))
            pert_rows.append((i, z.real, z.imag, cert.sample_perturbation[i], budget,
                              budget - cert.sample_perturbation[i]))
            slope = cert.sample_slopes[i]
            slope_rows.append((i, slope, cert.slope_bound, cert.slope_bound - slope))
            if slope > cert.slope_bound + tol["semiangle_slack"]:
                raise CheckFailed(f"slope {slope:.6g} exceeds 2*C0 + 1 at z = {z:.6g}", {"z": z})
        res.constants["worst_inequality_margin"] = float(worst)
        res.tables["perturbation"] = _table(
            ["sample", "z_re", "z_im", "perturbation_norm", "bound", "margin"], pert_rows)
        res.tables["slopes"] = _table(["sample", "slope", "bound", "margin"], slope_rows)
        res.tables["inequalities"] = _table(["sample", "worst_margin"], ineq_rows)

    def check_norm_equiv(self, res: CheckResult):
        tol = self.tol
        cert = self.certificate()
        lower, upper = tol["norm_equiv_lower"], tol["norm_equiv_upper"]
        rows = []
        for i, z in enumerate(cert.sample_z):
            ne = norm_equivalence_check(self.a0, eval_family(self.family, z), self.emb,
                                        lower, upper, tol["psd_rtol"])
            rows.append((i, ne.lower, ne.upper, min(ne.lower - lower, upper - ne.upper)))
            if not ne.ok:
                res.tables["ratios"] = _table(["sample", "lower_ratio", "upper_ratio", "margin"], rows)
                raise CheckFailed(f"norm ratios [{ne.lower:.6g}, {ne.upper:.6g}] leave [{lower}, {upper}]",
                                  {"z": z})
        res.tables["ratios"] = _table(["sample", "lower_ratio", "upper_ratio", "margin"], rows)
        res.constants.update(min_ratio=min(r[1] for r in rows), max_ratio=max(r[2] for r in rows))

    def holo_radius(self) -> float:
        fixed = self.sc.holo.get("radius")
        return float(fixed) if fixed else self.sc.holo["radius_factor"] * self.certificate().radius

    def check_resolvent_holo(self, res: CheckResult):
        r = self.holo_radius()
        lam = _to_complex(self.sc.holo["lambda"])
        res.constants.update(radius=r, **{"lambda": lam})
        rep = resolvent_holomorphy_check(self.family, 0.0, lam, r, self.sc.holo["node_count"],
                                         self.tol["holo_residual"], self.tol["derivative_gap"])
        res.constants.update(residual=rep.mean_value_residual, derivative_gap=rep.derivative_fd_gap,
                             node_count=rep.node_count)
        res.tables["nodes"] = _table(["node", "condition"], list(enumerate(rep.node_conditions)))
        if not rep.passed:
            raise CheckFailed(f"Cauchy residual {rep.mean_value_residual:.3e}, derivative gap "
                              f"{rep.derivative_fd_gap:.3e}",
                              {"residual": rep.mean_value_residual, "gap": rep.derivative_fd_gap})

    def check_eq5(self, res: CheckResult):
        sg = self.sc.semigroup
        out = resolvent_power_bound_check(self.operator().op_mat, sg["M"], sg["omega"], sg["lambdas"],
                                          sg["n_max"], self.space_h, self.tol["bound_slack"])
        res.constants["worst_margin"] = out.worst_margin
        res.tables["powers"] = _table(["lambda", "n", "norm", "bound", "margin"], out.table)
        if not out.ok:
            row = min(out.table, key=lambda r: r[4])
            raise CheckFailed(f"resolvent power bound violated at lambda = {row[0]}, n = {row[1]}",
                              {"lambda": row[0], "n": row[1]})

    def check_eq6(self, res: CheckResult):
        sg = self.sc.semigroup
        tol = self.tol
        table = exponential_formula_convergence(self.operator().op_mat, sg["t1"], sg["n_list"],
                                                sg["t_grid"], self.space_h, tol["monotone_noise"])
        rows = []
        prev = None
        for n, err in table.rows:
            rows.append((n, err, prev if prev is not None else "", (prev - err) if prev is not None else ""))
            prev = err
        res.tables["convergence"] = _table(["n", "sup_error", "bound", "margin"], rows)
        ratios = table.ratios
        res.constants.update(ratios=ratios, sup_errors=[e for _, e in table.rows])
        if not table.monotone:
            raise CheckFailed("sup-grid error is not nonincreasing in n", {"sup_errors": table.rows})
        lo, hi = tol["eq6_ratio_min"], tol["eq6_ratio_max"]
        bad = [q for q in ratios if not lo <= q <= hi]
        if bad:
            raise CheckFailed(f"error ratios {bad} outside [{lo}, {hi}]", {"ratios": bad})

    def semigroup_reports(self):
        if "thm4" not in self.cache:
            sg = self.sc.semigroup
            x = None if sg["x"] is None else np.array([_to_complex(v) for v in sg["x"]])
            kw = dict(z0=0.0, r=self.holo_radius(), t1=sg["t1"], x=x, t_grid=sg["t_grid"], M=sg["M"],
                      omega=sg["omega"], tol=self.tol["semigroup_residual"],
                      bound_tol=self.tol["bound_slack"])
            try:
                full = semigroup_holomorphy_check(self.family, node_count=self.sc.holo["node_count"],
                                                  iterate_n=sg["iterate_n"], **kw)
                coarse = semigroup_holomorphy_check(self.family,
                                                    node_count=self.sc.holo["compare_node_count"], **kw)
            except (UniformBoundUnverified, EvaluationFailure) as exc:
                self.cache["thm4"] = exc
            else:
                self.cache["thm4"] = (full, coarse)
        out = self.cache["thm4"]
        if isinstance(out, Exception):
            raise out
        return out

    def _thm4(self, res: CheckResult, idx: int):
        full, coarse = self.semigroup_reports()
        rep, cmp_rep = full[idx], coarse[idx]
        noise = self.tol["monotone_noise"]
        res.constants.update(radius=rep.radius, residual=rep.mean_value_residual,
                             residual_coarse=cmp_rep.mean_value_residual,
                             node_count=rep.node_count, coarse_node_count=cmp_rep.node_count,
                             **rep.extra)
        res.tables["residuals"] = _table(["t", "residual", "bound", "margin"], rep.table)
        if not rep.passed:
            worst = max(rep.table, key=lambda row: row[1])
            raise CheckFailed(f"holomorphy residual {rep.mean_value_residual:.3e} above {rep.tolerance:.1e}",
                              {"t": worst[0], "residual": worst[1]})
        if rep.mean_value_residual > cmp_rep.mean_value_residual + noise:
            raise CheckFailed("residual does not decrease with the node count",
                              {"residual": rep.mean_value_residual, "coarse": cmp_rep.mean_value_residual})

    def check_thm4a(self, res: CheckResult):
        self._thm4(res, 0)

    def check_thm4b(self, res: CheckResult):
        self._thm4(res, 1)

    def check_remark_a(self, res: CheckResult):
        sg = self.sc.semigroup
        rep = sector_semigroup_check(
            self.family, self.certificate(), 0.0, self.holo_radius(), sg["theta_prime"],
            sg["radius_tau"], tuple(sg["tau_grid"]), sg["M"], sg["omega"], self.sc.holo["node_count"],
            self.tol["semigroup_residual"], self.tol["bound_slack"], sg["enforce_sector"])
        res.constants.update(theta=rep.theta, theta_prime=rep.theta_prime, residual=rep.residual,
                             max_norm_ratio=rep.max_norm_ratio)
        res.tables["residuals"] = _table(["tau_re", "tau_im", "residual", "bound", "margin"], rep.table)
        if not rep.passed:
            worst = max(rep.table, key=lambda row: row[2])
            raise CheckFailed(f"sector holomorphy residual {rep.residual:.3e} above tolerance",
                              {"tau": complex(worst[0], worst[1]), "residual": worst[2]})


def run_scenario(scenario: Scenario) -> Report:
    """Execute the requested checks; failures are report content, never exceptions."""
    run = _Run(scenario)
    for name in scenario.ordered_checks():
        run.run(name)
    checks = [run.results[name] for name in scenario.ordered_checks()]
    norm = {"shift": float(run.shift), "vertex_before": float(run.vertex_before),
            "vertex_after": float(max_vertex(run.a0, run.emb))}
    return Report(scenario.name, scenario.seed, norm, checks)
