import pytest

from iacopt.doml import parse_document
from iacopt.doml.emit import format_optimization
from iacopt.doml.model import ObjectiveSpec, OptimizationSpec
from iacopt.errors import IacOptError, InfeasibleError
from iacopt.moea import AlgoParams, Algorithm
from iacopt.oracle import brute_force_pareto
from iacopt.orchestrator import optimize, rank_and_select, select_algorithm
from iacopt.problem import build_problem, evaluate

from conftest import OPT_LAYER, INFRA_LAYER
from factories import catalogue, grid_problem, spec, storage, vm


def test_select_algorithm():
    use_case = parse_document(OPT_LAYER).optimization
    assert select_algorithm(use_case) is Algorithm.NSGA3
    two = OptimizationSpec("o", use_case.objectives[:2], use_case.requirements)
    assert select_algorithm(two) is Algorithm.NSGA2
    assert select_algorithm(two, "nsga3") is Algorithm.NSGA3
    assert select_algorithm(use_case, "auto") is Algorithm.NSGA3
    with pytest.raises(IacOptError):
        select_algorithm(OptimizationSpec("o", (), ()))


def test_rank_keeps_five_by_priority():
    prob = build_problem(
        spec([("cost", "min"), ("performance", "max")], slots="VM"),
        catalogue(*[vm(f"v{i}", 100.0 + 10 * i, performance=1.0 + i) for i in range(7)]),
    )
    sols = [evaluate((i,), prob) for i in (6, 2, 0, 4, 1, 5, 3)]
    ranked = rank_and_select(sols, spec([("cost", "min"), ("performance", "max")], slots="VM"))
    assert [r.name for r in ranked] == ["sol1", "sol2", "sol3", "sol4", "sol5"]
    assert [r.solution.objective_values[0] for r in ranked] == [100, 110, 120, 130, 140]
    assert [r.active for r in ranked] == [True, False, False, False, False]


def test_rank_orders_maximized_priority_descending():
    s = spec([("availability", "max"), ("cost", "min")], slots="VM")
    prob = build_problem(s, catalogue(*[vm(f"v{i}", 230.0 - 20 * i, availability=90.0 + i) for i in range(3)]))
    ranked = rank_and_select([evaluate((i,), prob) for i in range(3)], s, k=5)
    assert [r.solution.objective_values[1] for r in ranked] == [190.0, 210.0, 230.0]


def test_rank_errors():
    s = spec([("cost", "min")])
    with pytest.raises(InfeasibleError):
        rank_and_select([], s)
    with pytest.raises(ValueError):
        rank_and_select([], s, k=0)


def test_use_case_end_to_end(use_case_text, ref_catalogue):
    res = optimize(use_case_text, ref_catalogue)
    assert res.report.algorithm == "NSGA3"
    assert res.report.population_size == 92
    assert res.report.search_space_size == 1
    assert [r.name for r in res.ranked] == ["sol1"]
    doc = parse_document(res.text)
    assert doc.solutions == tuple(res.records)
    assert len(doc.concretes) == 1
    assert doc.infrastructure == parse_document(INFRA_LAYER).infrastructure


def test_no_optimization_layer(ref_catalogue):
    with pytest.raises(IacOptError, match="no optimization layer"):
        optimize(INFRA_LAYER, ref_catalogue)


def test_infeasible_carries_best(ref_catalogue):
    text = OPT_LAYER.replace("max 300.0", "max 100.0")
    with pytest.raises(InfeasibleError) as info:
        optimize(text, ref_catalogue)
    err = info.value
    assert err.best is not None and err.report is not None
    assert err.best.constraints.total_violation == pytest.approx((230.53 - 100) / 100)
    assert "t2.nano" in str(err)


def _grid_text_and_catalogue(cost_scale=1.0, cost_shift=0.0):
    prob = grid_problem()
    els = [
        type(e)(e.id, e.element_type, e.provider, e.region, e.cost * cost_scale + cost_shift,
                e.availability, e.performance, e.memory_gb)
        for slot in prob.candidates for e in slot
    ]
    s = spec([("cost", "min"), ("availability", "max"), ("performance", "max")])
    return format_optimization(s), catalogue(*els), prob


def test_grid_output_is_subset_of_oracle():
    text, cat, prob = _grid_text_and_catalogue()
    res = optimize(text, cat, AlgoParams(population_size=20, generations=30))
    oracle = {s.genotype for s in brute_force_pareto(prob)}
    assert 1 <= len(res.ranked) <= 5
    assert {r.solution.genotype for r in res.ranked} <= oracle
    assert len(parse_document(res.text).solutions) == len(res.ranked)
    brute = optimize(text, cat, brute_force=True)
    assert brute.report.algorithm == "BRUTE_FORCE"
    assert [r.solution.genotype for r in brute.ranked] == [r.solution.genotype for r in res.ranked]


def test_active_choice_survives_affine_cost_rescaling():
    base_text, base_cat, _ = _grid_text_and_catalogue()
    text, cat, _ = _grid_text_and_catalogue(cost_scale=3.5, cost_shift=2.0)
    params = AlgoParams(population_size=20, generations=30)
    a = optimize(base_text, base_cat, params).ranked[0].solution.genotype
    b = optimize(text, cat, params).ranked[0].solution.genotype
    assert a == b


def test_without_infrastructure_layer_warns(ref_catalogue):
    res = optimize(OPT_LAYER, ref_catalogue)
    assert parse_document(res.text).concretes == ()
    assert any("concretization skipped" in w for w in res.report.warnings)


def test_more_solutions_than_needed(ref_catalogue):
    s = spec([("cost", "min"), ("performance", "max")], slots="VM")
    cat = catalogue(*[vm(f"v{i}", 100.0 + 10 * i, performance=1.0 + i) for i in range(7)], storage("s", 1.0))
    res = optimize(format_optimization(s), cat, max_solutions=3)
    assert [r.name for r in res.ranked] == ["sol1", "sol2", "sol3"]
