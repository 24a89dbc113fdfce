"""Canned sweeps and fits for each figure, with comparisons to reference constants.

Two profiles: ``desk`` (N = 8192) and ``full`` (N = 2e4, finer noncritical
lattices, more separations). Each ``figN`` function runs its sweeps and
returns a :class:`FigureReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import analysis
from . import experiments as ex
from .chain import DESK_N_SITES, FULL_N_SITES


@dataclass(frozen=True)
class Profile:
    name: str
    n_sites: int
    noncritical_xi: float
    transition_xi: float
    block_size_separations: tuple[int, ...]
    block_size_l_max: int


PROFILES = {
    "desk": Profile("desk", DESK_N_SITES, 20.0, 50.0, (100,), 2000),
    "full": Profile("full", FULL_N_SITES, 40.0, 100.0, (20, 100, 200), 4000),
}

#: reference constants: (value, tolerance, relative?)
REFERENCE = {
    "beta_c": (2.0 * math.sqrt(2.0), 0.05, True),
    "alpha": (1.0 / 3.0, 0.10, True),
    "overall_a": (4.0 / 3.0, 0.20, True),
    "overall_gamma": (1.5, 0.20, True),
    "I_exponent": (-0.05, 0.03, False),
    "saddle_L_over_D0": (math.sqrt(2.0), 0.10, True),
    "asymptotic_slope": (1.0 / 3.0, 0.20, True),
    "l_s_slope": (0.75, 0.15, True),
    "l_s_intercept": (1.0, 0.15, True),
    "E_at_l_eq_d0_log_slope": (-2.1, 0.10, True),
    "saturation_decay": (2.25, 0.10, True),
}


@dataclass
class Comparison:
    name: str
    fitted: float | None
    reference: float
    tolerance: float
    relative: bool

    @property
    def error(self) -> float:
        if self.fitted is None or not math.isfinite(self.fitted):
            return math.inf
        diff = abs(self.fitted - self.reference)
        return diff / abs(self.reference) if self.relative else diff

    @property
    def passed(self) -> bool:
        return self.error <= self.tolerance

    def line(self) -> str:
        kind = "rel.err" if self.relative else "abs.err"
        fitted = "n/a" if self.fitted is None else f"{self.fitted:.4g}"
        return (
            f"{self.name}: fitted {fitted}, reference {self.reference:.4g}, "
            f"{kind} {self.error:.3g} (tol {self.tolerance:g}) "
            f"{'PASS' if self.passed else 'FAIL'}"
        )

    def as_dict(self) -> dict:
        return {"name": self.name, "fitted": self.fitted, "reference": self.reference,
                "error": self.error, "tolerance": self.tolerance,
                "relative": self.relative, "passed": self.passed}


def compare(name: str, fitted: float | None, key: str | None = None) -> Comparison:
    value, tol, rel = REFERENCE[key or name]
    return Comparison(name, None if fitted is None else float(fitted), value, tol, rel)


@dataclass
class FigureReport:
    figure: str
    profile: str
    results: dict[str, ex.SweepResult]
    fits: dict = field(default_factory=dict)
    comparisons: list[Comparison] = field(default_factory=list)
    curves: list[tuple[str, str, str]] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "figure": self.figure,
            "profile": self.profile,
            "fits": self.fits,
            "comparisons": [c.as_dict() for c in self.comparisons],
            "sweeps": {k: v.summary for k, v in self.results.items()},
        }


# ---------------------------------------------------------------------------
# analysis of individual sweeps (reused by the acceptance tests)


def analyze_critical_r(result: ex.SweepResult, beta_window=(0.5, 2.5), alpha_max=0.25,
                       overall_window=(0.1, 2.5)) -> dict:
    """beta_c, short-distance power, overall model and the mutual-information fits."""
    curve = result.curve("r", "E_LN_bits")
    beta = analysis.fit_exponential(curve, beta_window)
    short = analysis.residual_power(curve, beta["rate"], (0.0, alpha_max))
    overall = analysis.fit_overall_model(curve, overall_window)
    mi = result.curve("r", "I_nats")
    mi_power = analysis.fit_power(mi)
    ratio = [(r, e / i) for (r, e), (_, i) in zip(curve, mi)]
    ratio_lin = analysis.fit_exponential(ratio, beta_window)
    ratio_pow = analysis.fit_power(ratio, beta_window)
    return {
        "beta": beta,
        "alpha": short,
        "overall": overall,
        "I_power": mi_power,
        "E_over_I_exp": ratio_lin,
        "E_over_I_power": ratio_pow,
    }


def analyze_block_size(result: ex.SweepResult, separation: float) -> dict:
    slopes = result.summary["loglog_slope"][str(float(separation))]
    crossings = result.summary["slope_two_crossings"][str(float(separation))]
    return {
        "saddle_L": crossings[0] if crossings else None,
        "saddle_L_over_D0": crossings[0] / separation if crossings else None,
        "largest_L": slopes[-1][0],
        "slope_at_largest_L": slopes[-1][1],
        "min_slope": min(s for _, s in slopes),
    }


def analyze_noncritical_l(result: ex.SweepResult) -> dict:
    per = result.summary["per_d0"]
    d0s = [float(k) for k in per if "l_s" in per[k]]
    out: dict = {"per_d0": per}
    if len(d0s) >= 3:
        ls = analysis.fit_linear([(d, per[str(d)]["l_s"]) for d in d0s])
        out["l_s_fit"] = ls
        plateau = analysis.fit_exponential([(d, per[str(d)]["plateau"]) for d in d0s])
        out["plateau_fit"] = plateau
    at = [(float(k), v["E_at_l_eq_d0"]) for k, v in per.items() if "E_at_l_eq_d0" in v]
    if len(at) >= 3:
        out["E_at_l_eq_d0_fit"] = analysis.fit_exponential(at)
    return out


# ---------------------------------------------------------------------------
# figures


def fig1(profile: Profile, workers=None) -> FigureReport:
    crit = ex.run(ex.critical_r_config(n_sites=profile.n_sites), workers)
    scale = ex.run(ex.scale_invariance_config(n_sites=profile.n_sites,
                                              block_lens=(128, 256, 512)), workers)
    fits = analyze_critical_r(crit)
    comps = [
        compare("beta_c", fits["beta"]["rate"]),
        compare("alpha", -fits["alpha"]["exponent"]),
        compare("overall_a", fits["overall"]["a"]),
        compare("overall_gamma", fits["overall"]["gamma"]),
        compare("I_exponent", fits["I_power"]["exponent"]),
    ]
    return FigureReport(
        "fig1", profile.name, {"critical_r": crit, "scale_invariance": scale},
        {k: v.as_dict() for k, v in fits.items()}, comps,
        [("critical_r", "r", "E_LN_bits"), ("critical_r", "r", "I_nats"),
         ("scale_invariance", "L", "E_LN_bits")],
    )


def fig2(profile: Profile, workers=None) -> FigureReport:
    res = ex.run(ex.block_size_config(n_sites=profile.n_sites,
                                      separations=profile.block_size_separations,
                                      l_max=profile.block_size_l_max), workers)
    fits, comps = {}, []
    for d0 in profile.block_size_separations:
        f = analyze_block_size(res, d0)
        fits[str(d0)] = f
        comps.append(compare(f"saddle_L_over_D0[D0={d0}]", f["saddle_L_over_D0"], "saddle_L_over_D0"))
        comps.append(compare(f"asymptotic_slope[D0={d0}]", f["slope_at_largest_L"], "asymptotic_slope"))
    return FigureReport("fig2", profile.name, {"block_size": res}, fits, comps,
                        [("block_size", "L", "E_LN_bits")])


def fig3(profile: Profile, workers=None) -> FigureReport:
    res = ex.run(ex.noncritical_l_config(n_sites=profile.n_sites, xi=profile.noncritical_xi), workers)
    fits = analyze_noncritical_l(res)
    comps = []
    if "l_s_fit" in fits:
        comps += [compare("l_s_slope", fits["l_s_fit"]["slope"]),
                  compare("l_s_intercept", fits["l_s_fit"]["intercept"]),
                  compare("saturation_decay", fits["plateau_fit"]["rate"])]
    if "E_at_l_eq_d0_fit" in fits:
        comps.append(compare("E_at_l_eq_d0_log_slope", -fits["E_at_l_eq_d0_fit"]["rate"]))
    as_dicts = {k: (v.as_dict() if isinstance(v, analysis.FitResult) else v) for k, v in fits.items()}
    return FigureReport("fig3", profile.name, {"noncritical_l": res}, as_dicts, comps,
                        [("noncritical_l", "l", "E_LN_bits")])


def fig4(profile: Profile, workers=None) -> FigureReport:
    res = ex.run(ex.noncritical_d_config(n_sites=profile.n_sites, xi=profile.noncritical_xi), workers)
    return FigureReport("fig4", profile.name, {"noncritical_d": res},
                        dict(res.summary["per_l0"]), [],
                        [("noncritical_d", "d", "E_LN_bits")])


def fig5(profile: Profile, workers=None) -> FigureReport:
    res = ex.run(ex.transition_config(n_sites=profile.n_sites, xi=profile.transition_xi), workers)
    return FigureReport("fig5", profile.name, {"transition": res}, dict(res.summary), [],
                        [("transition", "d", "E_LN_bits")])


FIGURES = {"fig1": fig1, "fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5}


def reproduce(figure: str, profile: str = "desk", workers=None) -> FigureReport:
    return FIGURES[figure](PROFILES[profile], workers)

