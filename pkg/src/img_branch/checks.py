"""Registry of named checks and the runner producing the JSON run report."""

from __future__ import annotations

import multiprocessing
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Sequence

from . import __version__, branch, img, levels, mealy, presentation, structure
from .report import Report

SCHEMA_VERSION = "1.0"
MAX_LEVEL_CAP = 10
PHI_DEPTH_CAP = 8


class ConfigError(ValueError):
    pass


class UnknownCheck(KeyError):
    pass


@dataclass(frozen=True)
class Config:
    max_level: int = 8
    phi_depth: int = 6
    state_budget: int = mealy.DEFAULT_STATE_BUDGET
    enum_budget: int = levels.DEFAULT_ENUM_BUDGET
    seed: int = 0

    def validate(self) -> "Config":
        if not 6 <= self.max_level <= MAX_LEVEL_CAP:
            raise ConfigError(f"max-level must be in 6..{MAX_LEVEL_CAP}")
        if not 0 <= self.phi_depth <= PHI_DEPTH_CAP:
            raise ConfigError(f"phi-depth must be in 0..{PHI_DEPTH_CAP}")
        if self.state_budget <= 0 or self.enum_budget <= 0:
            raise ConfigError("budgets must be positive")
        return self


@dataclass(frozen=True)
class Anchor:
    topic: str
    statement: str


@dataclass(frozen=True)
class CheckDescriptor:
    id: str
    anchor: Anchor
    operations: tuple[str, ...]
    defaults: dict[str, Any]
    runner: Callable[[Config], Report] = field(repr=False, compare=False)


def _levels_from(start: int, config: Config, stop: int | None = None) -> list[int]:
    top = config.max_level if stop is None else min(stop, config.max_level)
    return list(range(start, top + 1))


def _combine(name: str, *reports: Report) -> Report:
    out = Report(name)
    for r in reports:
        out.merge(r, r.name)
        out.summary.update(r.summary)
    return out


def _orders(c: Config) -> Report:
    return structure.verify_orders(128)


def _not_torsion(c: Config) -> Report:
    return structure.verify_not_torsion(128)


def _k_generator_sections(c: Config) -> Report:
    return _combine("k-generator-sections", branch.verify_section_identities(), branch.verify_generator_orders())


def _k_contains_st3(c: Config) -> Report:
    return structure.verify_k_contains_st3(c.max_level, c.enum_budget)


def _k_is_xyztw(c: Config) -> Report:
    return _combine(
        "k-is-xyztw",
        presentation.verify_schreier_table(),
        structure.verify_k_seed(_levels_from(3, c)),
    )


def _stalpha(c: Config) -> Report:
    return _combine("stalpha", presentation.verify_transversal(), presentation.verify_representatives())


def _relators(c: Config) -> Report:
    return presentation.verify_relators(c.phi_depth)


def _e_descends(c: Config) -> Report:
    return presentation.verify_e_descends(c.phi_depth)


def _formula(c: Config) -> Report:
    return presentation.verify_conjugation_formula(100, 12, c.seed)


def _squared(c: Config) -> Report:
    return presentation.verify_squared_words(200, 10, c.seed)


def _phi_duality(c: Config) -> Report:
    return presentation.verify_phi_duality(500, 20, c.seed)


def _ell_beta_descend(c: Config) -> Report:
    return presentation.verify_ell_beta_descend(100, 12, c.seed)


def _e_ell(c: Config) -> Report:
    return presentation.verify_e_ell_link()


def _conjugation(c: Config) -> Report:
    return branch.verify_conjugation_table()


def _kprime_even(c: Config) -> Report:
    return branch.verify_commutator_parities()


def _pin_k_ab(c: Config) -> Report:
    return structure.verify_pin_k_ab(_levels_from(5, c), c.enum_budget)


def _absorption(c: Config) -> Report:
    return structure.verify_stabilizer_absorption(5)


def _st_product(c: Config) -> Report:
    return structure.verify_st_product()


def _kk_c45(c: Config) -> Report:
    return branch.verify_kk_c45(c.phi_depth)


def _no_csp(c: Config) -> Report:
    return branch.no_csp_obstruction(_levels_from(5, c), c.phi_depth)


def _k_mod_scriptk(c: Config) -> Report:
    return branch.verify_K_mod_scriptK()


def _sigma(c: Config) -> Report:
    parts = [branch.verify_sigma_chain()]
    parts += [branch.verify_sigma_images_at_level(n) for n in _levels_from(5, c, stop=8)]
    return _combine("branch-kernel-sigma", *parts)


def _rigid(c: Config) -> Report:
    return branch.verify_rigid_kernel_witness((1, 2), 4, c.max_level)


def _regular_branch(c: Config) -> Report:
    rep = Report("regular-branch")
    kg = branch.k_generators()
    x_parts = branch.geometric_product_generators([kg["x"]], 1)
    rep.add("(x,1) = y", mealy.equal(x_parts[0], kg["y"]))
    rep.add("(1,x) = z", mealy.equal(x_parts[1], kg["z"]))
    rep.merge(branch.verify_regular_branch((3, 5, c.max_level)))
    return rep


def _d(id_, topic, statement, operations, defaults, runner) -> CheckDescriptor:
    return CheckDescriptor(id_, Anchor(topic, statement), tuple(operations), dict(defaults), runner)


REGISTRY: dict[str, CheckDescriptor] = {
    d.id: d
    for d in (
        _d("lemma-orders", "generators",
           "a, b, c have order 2; ac has order 4; <a,c> is dihedral of order 8",
           ["structure.verify_orders"], {"torsion_bound": 128}, _orders),
        _d("lemma-not-torsion", "generators", "the group is not torsion",
           ["structure.verify_not_torsion"], {"torsion_bound": 128}, _not_torsion),
        _d("k-generator-sections", "branching subgroup",
           "y = (x,1), z = (1,x), t = (y,1), w = (1,y)",
           ["branch.verify_section_identities", "branch.verify_generator_orders"], {}, _k_generator_sections),
        _d("lemma-k-contains-st3", "branching subgroup",
           "[pi_3(G):pi_3(K)] = 16 and K contains St_G(3)",
           ["structure.verify_k_contains_st3"], {"levels": lambda c: _levels_from(3, c)}, _k_contains_st3),
        _d("lemma-k-is-xyztw", "presentation of K", "K = <x,y,z,t,w>",
           ["presentation.verify_schreier_table", "structure.verify_k_seed"],
           {"levels": lambda c: _levels_from(3, c)}, _k_is_xyztw),
        _d("lemma-stalpha", "presentation of K",
           "s_{t,a} = s_{t,c} = 1 and s_{bu,b} = (s_{u,b})^-1",
           ["presentation.verify_transversal", "presentation.verify_representatives"], {}, _stalpha),
        _d("relators-identity", "presentation of G", "phi^n(R')^2 = 1 for every root R'",
           ["presentation.verify_relators"], {"phi_depth": lambda c: c.phi_depth}, _relators),
        _d("lemma-e-descends", "parity", "e descends to a well-defined function on K",
           ["presentation.verify_e_descends"], {"phi_depth": lambda c: c.phi_depth}, _e_descends),
        _d("lemma-formula-e-tau", "parity",
           "e(tau(tRt^-1)) = beta(R)ell(t) + e(tau(R)) + beta(t)ell(R)",
           ["presentation.verify_conjugation_formula"],
           {"samples": 100, "max_len": 12, "seed": lambda c: c.seed}, _formula),
        _d("lemma-squared-words", "parity", "e(tau(tR'^2t^-1)) = e(tau(R'^2)) = ell(R')beta(R')",
           ["presentation.verify_squared_words"],
           {"samples": 200, "max_len": 10, "seed": lambda c: c.seed}, _squared),
        _d("lemma-ell-beta-phi", "parity", "ell(phi(R)) = beta(R) and beta(phi(R)) = ell(R)",
           ["presentation.verify_phi_duality"],
           {"samples": 500, "max_len": 20, "seed": lambda c: c.seed}, _phi_duality),
        _d("lemma-ell-beta-descend", "parity", "ell and beta descend to G/K",
           ["presentation.verify_ell_beta_descend"],
           {"samples": 100, "max_len": 12, "seed": lambda c: c.seed}, _ell_beta_descend),
        _d("lemma-relation-e-ell", "parity", "e(s_{t,b}) = ell(t)",
           ["presentation.verify_e_ell_link"], {}, _e_ell),
        _d("lemma-conjugation-table", "abelianization",
           "axa = x^-1, ..., cwc = w; e(alpha beta alpha) = 1",
           ["branch.verify_conjugation_table"], {}, _conjugation),
        _d("prop-kprime-even-parity", "abelianization", "K' <= scriptK",
           ["branch.verify_commutator_parities"], {}, _kprime_even),
        _d("lemma-pin-k-ab", "abelianization",
           "pi_n(K)^ab = C_4^3 with [t] = [y]^2 and [w] = [z]^2",
           ["structure.verify_pin_k_ab"], {"levels": lambda c: _levels_from(5, c)}, _pin_k_ab),
        _d("lemma-stabilizer-absorption", "abelianization", "pi_6(St_G(5)) <= pi_6(K')",
           ["structure.verify_stabilizer_absorption"], {"n0": 5}, _absorption),
        _d("lemma-st-product", "stabilizers", "St_G(n) = product of 2^(n-m) copies of St_G(m)",
           ["structure.verify_st_product"], {"pairs": [[4, 3], [5, 3], [6, 4]]}, _st_product),
        _d("theorem-kk-c45", "abelianization", "K/K' is isomorphic to C_4^5",
           ["branch.verify_kk_c45"], {"phi_depth": lambda c: c.phi_depth}, _kk_c45),
        _d("theorem-no-csp", "congruence subgroup property",
           "IMG(z^2+i) does not have the congruence subgroup property",
           ["branch.no_csp_obstruction"], {"levels": lambda c: _levels_from(5, c), "phi_depth": lambda c: c.phi_depth}, _no_csp),
        _d("prop-k-mod-scriptk", "abelianization",
           "K/scriptK = C_4 x C_2 x C_2 and [scriptK:K'] = 64",
           ["branch.verify_K_mod_scriptK"], {}, _k_mod_scriptk),
        _d("branch-kernel-sigma", "branch kernel", "A = ⟨2z+w⟩ ≃ C₄",
           ["branch.verify_sigma_chain", "branch.verify_sigma_images_at_level"],
           {"levels": lambda c: _levels_from(5, c, stop=8)}, _sigma),
        _d("rigid-kernel-witness", "rigid kernel", "RiSt_G(n) >= K_n >= (St_G(3))_n",
           ["branch.verify_rigid_kernel_witness"], {"n": [1, 2], "depth": 4}, _rigid),
        _d("regular-branch-witness", "branching subgroup", "K_1 <= K: G is regular branch over K",
           ["branch.geometric_product_generators", "branch.verify_regular_branch"], {}, _regular_branch),
    )
}


def effective_params(desc: CheckDescriptor, config: Config) -> dict[str, Any]:
    """Defaults with config-driven entries evaluated."""
    return {k: v(config) if callable(v) else v for k, v in desc.defaults.items()}


def resolve(selection: Sequence[str] | None) -> list[str]:
    if not selection or list(selection) == ["all"]:
        return list(REGISTRY)
    unknown = [s for s in selection if s not in REGISTRY]
    if unknown:
        raise UnknownCheck(", ".join(unknown))
    return list(dict.fromkeys(selection))


def _reproduce(check_id: str, config: Config) -> str:
    return (
        f"img-branch verify --check {check_id} --max-level {config.max_level} "
        f"--phi-depth {config.phi_depth} --state-budget {config.state_budget} "
        f"--enum-budget {config.enum_budget} --seed {config.seed}"
    )


def warm_up() -> None:
    """Shared read-only resources, built once before any fan-out."""
    img.base_automaton()
    img.k_generators()
    presentation.schreier_table()
    presentation.coset_index(presentation.gword(""))


def _apply_budgets(config: Config) -> None:
    mealy.set_state_budget(config.state_budget)


def run_one(check_id: str, config: Config, full: bool = False) -> dict[str, Any]:
    _apply_budgets(config)
    desc = REGISTRY[check_id]
    start = time.perf_counter()
    error = None
    try:
        rep = desc.runner(config)
        status = "pass" if rep.ok else "fail"
    except Exception as exc:  # reported, not raised: one check must not sink the run
        rep = Report(check_id)
        status = "error"
        error = "".join(traceback.format_exception_only(type(exc), exc)).strip()
    result = {
        "id": check_id,
        "anchor": asdict(desc.anchor),
        "operations": list(desc.operations),
        "params": effective_params(desc, config),
        "status": status,
        "checks": len(rep.items),
        "summary": rep.summary,
        "failures": rep.failures(),
        "error": error,
        "seconds": round(time.perf_counter() - start, 4),
    }
    if status != "pass":
        result["reproduce"] = _reproduce(check_id, config)
    if full:
        result["items"] = rep.items
    return result


def _worker_init(config: Config) -> None:
    _apply_budgets(config)
    warm_up()


def run(selection: Sequence[str] | None, config: Config | None = None, jobs: int = 1, full: bool = False) -> dict[str, Any]:
    config = (config or Config()).validate()
    ids = resolve(selection)
    if jobs < 1:
        raise ConfigError("jobs must be >= 1")
    _apply_budgets(config)
    warm_up()
    if jobs == 1 or len(ids) == 1:
        results = [run_one(i, config, full) for i in ids]
    else:
        methods = multiprocessing.get_all_start_methods()
        ctx = multiprocessing.get_context("fork" if "fork" in methods else None)
        with ProcessPoolExecutor(jobs, mp_context=ctx, initializer=_worker_init, initargs=(config,)) as pool:
            results = list(pool.map(run_one, ids, [config] * len(ids), [full] * len(ids)))
    counts = {s: sum(r["status"] == s for r in results) for s in ("pass", "fail", "error")}
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "img-branch", "version": __version__},
        "config": asdict(config),
        "selection": ids,
        "checks": results,
        "counts": counts,
        "verdict": "pass" if counts["pass"] == len(results) else "fail",
    }


def strip_timings(report: dict[str, Any]) -> dict[str, Any]:
    out = dict(report)
    out["checks"] = [{k: v for k, v in c.items() if k != "seconds"} for c in report["checks"]]
    return out


def list_table() -> str:
    rows = [("id", "topic", "statement", "defaults")]
    config = Config()
    for d in REGISTRY.values():
        params = effective_params(d, config)
        defaults = ", ".join(f"{k}={v}" for k, v in params.items()) or "-"
        rows.append((d.id, d.anchor.topic, d.anchor.statement, defaults))
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    lines = []
    for r in rows:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(3)) + "  " + r[3])
    return "\n".join(lines) + "\n"
