import numpy as np
import pytest

from myceliumsim import (
    ConfigError,
    DimensionError,
    GrowthParams,
    MyceliumNetwork,
    NotFoundError,
    SimConfig,
    SpikeSimulation,
    SubstrateField,
    dump_network,
    electrical_prune,
    grow,
    grow_step,
)
from conftest import make_y


def single_tip_net(pos=(10.0, 10.0), direction=(1.0, 0.0)):
    net = MyceliumNetwork()
    net.add_node(pos, "tip", direction=direction)
    return net


def test_zero_nutrient_never_branches():
    field = SubstrateField.uniform((40, 40), nutrient=0.0)
    params = GrowthParams(branching_coeff=1.0, max_steps=10, noise_sigma_rad=0.2)
    result = grow(single_tip_net(), field, params, np.random.default_rng(0))
    assert result.network.branch_count() == 0
    assert len(result.network.nodes_of_kind("tip")) == 1


def test_saturated_branching_doubles_tips():
    # p = min(1, k_b * c) = 1 every step: tips 1 -> 2 -> 4 -> 8
    field = SubstrateField.uniform((200, 200), nutrient=1.0)
    params = GrowthParams(branching_coeff=1.0, max_steps=3, noise_sigma_rad=0.1)
    net = single_tip_net(pos=(100.0, 100.0))
    result = grow(net, field, params, np.random.default_rng(3))
    assert len(result.network.nodes_of_kind("tip")) == 8
    assert len(result.network.nodes) == 15
    assert result.steps_run == 3
    result.network.validate(field)


def test_zero_step_budget_returns_input_unchanged():
    field = SubstrateField.uniform((10, 10))
    params = GrowthParams(max_steps=0)
    net = single_tip_net(pos=(5.0, 5.0))
    result = grow(net, field, params, np.random.default_rng(0))
    assert result.network == net
    assert result.steps_run == 0
    assert result.reason == "max-steps"


def test_node_budget_respected():
    field = SubstrateField.uniform((200, 200), nutrient=1.0)
    params = GrowthParams(branching_coeff=1.0, max_steps=50, max_nodes=10)
    result = grow(single_tip_net(pos=(100.0, 100.0)), field, params, np.random.default_rng(1))
    assert len(result.network.nodes) <= 10
    assert result.reason == "max-nodes"


def test_branch_downgraded_when_one_slot_left():
    field = SubstrateField.uniform((20, 20), nutrient=1.0)
    params = GrowthParams(branching_coeff=1.0, max_steps=1, max_nodes=2)
    out = grow_step(single_tip_net(pos=(10.0, 10.0)), field, params, np.random.default_rng(0))
    assert len(out.nodes) == 2  # advance happened, branch did not


def test_same_seed_reproduces_bytes():
    field = SubstrateField.uniform((100, 100), nutrient=0.6)
    params = GrowthParams(branching_coeff=0.5, max_steps=8, noise_sigma_rad=0.3)
    runs = [
        grow(single_tip_net(pos=(50.0, 50.0)), field, params, np.random.default_rng(11))
        for _ in range(2)
    ]
    assert dump_network(runs[0].network) == dump_network(runs[1].network)


def test_different_seeds_diverge():
    field = SubstrateField.uniform((100, 100), nutrient=0.6)
    params = GrowthParams(branching_coeff=0.5, max_steps=8, noise_sigma_rad=0.3)
    a = grow(single_tip_net(pos=(50.0, 50.0)), field, params, np.random.default_rng(1))
    b = grow(single_tip_net(pos=(50.0, 50.0)), field, params, np.random.default_rng(2))
    assert dump_network(a.network) != dump_network(b.network)


def test_growth_stays_out_of_masked_cells():
    field = SubstrateField.uniform((10, 10), nutrient=0.3)
    field.mask[5:, :] = False  # forbidden half-plane x >= 5 mm
    field.attractant[:, :] = np.tile(np.linspace(0.0, 1.0, 10)[:, None], (1, 10))
    params = GrowthParams(attractant_weight=5.0, noise_sigma_rad=0.05, max_steps=30)
    result = grow(single_tip_net(pos=(2.5, 5.0)), field, params, np.random.default_rng(4))
    result.network.validate(field)  # would raise if any node sat in a masked cell
    assert result.reason == "all-tips-blocked"
    assert max(n.position[0] for n in result.network.nodes.values()) < 5.0


def test_blocked_after_three_rejections():
    field = SubstrateField.uniform((4, 4))
    params = GrowthParams(step_mm=10.0, noise_sigma_rad=0.0, max_steps=50)
    result = grow(single_tip_net(pos=(2.0, 2.0)), field, params, np.random.default_rng(0))
    assert result.reason == "all-tips-blocked"
    assert result.steps_run == 3
    assert len(result.network.nodes) == 1


def test_no_live_tips_warns():
    net = MyceliumNetwork()
    a = net.add_node((0.0, 0.0), "fruit-body")
    b = net.add_node((1.0, 0.0), "junction")
    net.add_strand(a.id, b.id)
    field = SubstrateField.uniform((5, 5))
    with pytest.warns(UserWarning):
        result = grow(net, field, GrowthParams(max_steps=5), np.random.default_rng(0))
    assert result.reason == "no-live-tips"
    with pytest.warns(UserWarning):
        out = grow_step(net, field, GrowthParams(), np.random.default_rng(0))
    assert out == net


def test_dimension_mismatch_rejected():
    field = SubstrateField.uniform((4, 4, 4))
    with pytest.raises(DimensionError):
        grow_step(single_tip_net(), field, GrowthParams(), np.random.default_rng(0))


def test_3d_growth_smoke():
    field = SubstrateField.uniform((20, 20, 20), nutrient=0.8)
    net = MyceliumNetwork()
    net.add_node((10.0, 10.0, 10.0), "tip", direction=(1.0, 0.0, 0.0))
    params = GrowthParams(branching_coeff=0.6, max_steps=5, noise_sigma_rad=0.3)
    result = grow(net, field, params, np.random.default_rng(9))
    assert result.network.ndim == 3
    result.network.validate(field)
    assert len(result.network.nodes) > 5


def test_boost_window_saturates_branching():
    # k_b * c = 0.5, boosted x2 -> p = 1 during the window, so tips double
    field = SubstrateField.uniform((200, 200), nutrient=1.0)
    params = GrowthParams(
        branching_coeff=0.5,
        max_steps=2,
        branch_boost=2.0,
        boost_start_step=0,
        boost_stop_step=2,
    )
    assert params.boost_factor(0) == 2.0
    assert params.boost_factor(2) == 1.0
    result = grow(single_tip_net(pos=(100.0, 100.0)), field, params, np.random.default_rng(2))
    assert len(result.network.nodes_of_kind("tip")) == 4


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(step_mm=0.0),
        dict(branching_coeff=-0.1),
        dict(attractant_weight=-1.0),
        dict(noise_sigma_rad=-0.5),
        dict(branch_angle_rad=0.0),
        dict(max_steps=-1),
        dict(max_nodes=0),
        dict(branch_boost=-2.0),
    ],
)
def test_invalid_growth_params(kwargs):
    with pytest.raises(ConfigError):
        GrowthParams(**kwargs)


def test_abandon_empty_set_is_identity():
    net, _ = make_y()
    assert electrical_prune(net, [], "abandon") == net


def test_enhance_abandons_neighbours():
    net, ids = make_y()
    out = electrical_prune(net, [ids["sa"]], "enhance")
    assert out.strands[ids["sa"]].state == "enhanced"
    assert out.strands[ids["sb"]].state == "abandoned"
    assert out.strands[ids["sc"]].state == "abandoned"
    assert net.strands[ids["sa"]].state == "active"  # input untouched


def test_abandon_all_silences_network():
    net, ids = make_y()
    out = electrical_prune(net, list(net.strands), "abandon")
    sim = SpikeSimulation(out, SimConfig())
    assert sim.inject_spike(ids["a"], 0.0, 1.0) == []
    assert len(sim.run()) == 0


def test_abandon_idempotent():
    net, ids = make_y()
    once = electrical_prune(net, [ids["sa"], ids["sc"]], "abandon")
    twice = electrical_prune(once, [ids["sa"], ids["sc"]], "abandon")
    assert once == twice


def test_prune_unknown_strand():
    net, _ = make_y()
    with pytest.raises(NotFoundError):
        electrical_prune(net, [0, 77], "abandon")
    with pytest.raises(ConfigError):
        electrical_prune(net, [0], "ignite")
