import json

import pytest

from mcnn_phase.config import (
    ConfigError,
    apply_overrides,
    build_cell_params,
    build_grid,
    build_seeds,
    build_solver,
    canonical_json,
    config_hash,
    default_config,
    parse_override,
    resolve_config,
)

# sha256 of the canonical default configuration; a change here means the
# shipped defaults (or the canonical serialization) moved, which is a
# compatibility break and must be deliberate
DEFAULT_HASH = "764266ee103105ce3e8cd5a32a156f965c70b7bca51af57de456ec6200c22421"


def test_default_hash_is_pinned():
    assert config_hash(resolve_config({})) == DEFAULT_HASH


def test_defaults_shape():
    cfg = default_config()
    assert cfg["cell"]["r_ohms"] == 1000.0
    assert cfg["cell"]["a_template"][4] == 2.0
    assert cfg["cell"]["b_template"] == [0.0] * 9
    assert cfg["memristor"]["polarity"] == -1
    assert cfg["memristor"]["n_d_min"] == 1e25
    assert cfg["memristor"]["n_d_max"] == 2e27
    assert cfg["grid"]["v_c_samples"] == 21
    assert cfg["solver"]["horizon"] == 1e-3
    assert cfg["trajectories"] == [{"v_c0": 1.25, "n_d0": 1e27}]


def test_grid_inherits_memristor_bounds():
    cfg = resolve_config({})
    assert cfg["grid"]["n_d_min"] == cfg["memristor"]["n_d_min"]
    assert cfg["grid"]["n_d_max"] == cfg["memristor"]["n_d_max"]
    cfg2 = resolve_config({"memristor": {"n_d_min": 5e25}})
    assert cfg2["grid"]["n_d_min"] == 5e25


def test_resolution_is_idempotent():
    c1 = resolve_config({"cell": {"r_ohms": 3000.0}})
    assert resolve_config(c1) == c1


@pytest.mark.parametrize(
    "user,path",
    [
        ({"cell": {"bogus": 1}}, "cell.bogus"),
        ({"nonsense": {}}, "nonsense"),
        ({"grid": {"n_d_axis_scale": "cubic"}}, "grid.n_d_axis_scale"),
        ({"memristor": {"polarity": 2}}, "memristor.polarity"),
        ({"solver": {"report_points": 1}}, "solver.report_points"),
        ({"grid": {"v_c_samples": 2.5}}, "grid.v_c_samples"),
        ({"cell": {"r_ohms": "fast"}}, "cell.r_ohms"),
        ({"cell": {"r_ohms": True}}, "cell.r_ohms"),
        ({"cell": {"a_template": [1, 2]}}, "cell.a_template"),
        ({"trajectories": [{"v_c0": 0.0}]}, "trajectories[0].n_d0"),
        ({"trajectories": [{"v_c0": 0, "n_d0": 1e27, "x": 1}]},
         "trajectories[0].x"),
        ({"trajectories": [{"v_c0": 0.0, "n_d0": 1e24}]},
         "trajectories[0].n_d0"),
        ({"grid": {"n_d_min": 1e20}}, "grid.n_d_min"),
        ({"memristor": {"n_d_min": 3e27}}, "memristor.n_d_min"),
    ],
)
def test_rejections_carry_dotted_path(user, path):
    with pytest.raises(ConfigError) as err:
        resolve_config(user)
    assert err.value.path == path


def test_merge_preserves_unrelated_defaults():
    cfg = resolve_config({"cell": {"r_ohms": 3000.0}})
    assert cfg["cell"]["c_farads"] == 1e-9
    assert cfg["memristor"]["r_m_min"] == 2000.0


def test_hash_changes_with_any_value():
    base = config_hash(resolve_config({}))
    assert config_hash(resolve_config({"cell": {"z_bias": 0.1}})) != base
    assert config_hash(resolve_config({"solver": {"rel_tol": 2e-6}})) != base


def test_canonical_json_is_key_sorted_and_compact():
    blob = canonical_json({"b": 1, "a": [1.5, 2]})
    assert blob == b'{"a":[1.5,2],"b":1}'


def test_parse_override_forms():
    assert parse_override("cell.r_ohms=3000") == (["cell", "r_ohms"], 3000)
    assert parse_override("grid.n_d_axis_scale=linear") == (
        ["grid", "n_d_axis_scale"], "linear")
    assert parse_override('cell.b_template=[0,0,0,0,1,0,0,0,0]')[1][4] == 1
    with pytest.raises(ConfigError):
        parse_override("no-equals-sign")


def test_apply_overrides_nested():
    user = apply_overrides({}, ["cell.r_ohms=3000", "memristor.i_s=1e-12"])
    assert user == {"cell": {"r_ohms": 3000}, "memristor": {"i_s": 1e-12}}
    # original dict untouched
    base = {"cell": {"r_ohms": 500}}
    out = apply_overrides(base, ["cell.r_ohms=900"])
    assert base["cell"]["r_ohms"] == 500 and out["cell"]["r_ohms"] == 900


def test_builders_round_trip():
    cfg = resolve_config({"cell": {"r_ohms": 3000.0},
                          "solver": {"max_step": 1e-6},
                          "grid": {"n_d_samples": 31}})
    p = build_cell_params(cfg)
    assert p.r == 3000.0
    assert p.memristor.n_d_max == 2e27
    g = build_grid(cfg)
    assert g.n_d_samples == 31
    assert g.n_d_range == (1e25, 2e27)
    s = build_solver(cfg)
    assert s.max_step == 1e-6
    seeds = build_seeds(cfg)
    assert seeds[0].v_c == 1.25 and seeds[0].n_d == 1e27


def test_resolved_config_survives_json_round_trip():
    cfg = resolve_config({"cell": {"r_ohms": 2500.0}})
    again = json.loads(canonical_json(cfg))
    assert again == cfg
    assert config_hash(again) == config_hash(cfg)
