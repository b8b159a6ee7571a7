import pytest

from src.core import config


def test_defaults_validate():
    assert config.validate_config() is True


def test_typed_views_follow_module_settings():
    session = config.get_session_config()
    assert session.round_cap == config.ROUND_CAP
    assert session.eval.mode == config.MODE
    assert session.eval.fold.layer_cap == config.LAYER_CAP


def test_dataclass_defaults():
    cfg = config.SessionConfig()
    assert (cfg.b_success, cfg.p_fail, cfg.c_step, cfg.round_cap) == (0.05, 0.10, 0.01, 10)
    assert cfg.eval.k == 5.0
    assert cfg.eval.fold.layer_cap == 64


def test_every_problem_is_reported(monkeypatch):
    monkeypatch.setattr(config, 'MODE', 'bogus')
    monkeypatch.setattr(config, 'K_SENSITIVITY', 0.0)
    monkeypatch.setattr(config, 'C_STEP', -1.0)
    with pytest.raises(ValueError) as excinfo:
        config.validate_config()
    message = str(excinfo.value)
    assert 'CPFORGE_MODE' in message
    assert 'CPFORGE_K' in message
    assert 'CPFORGE_C_STEP' in message


@pytest.mark.parametrize('store_type', ['jsonl', 'sqlite'])
def test_store_config(monkeypatch, store_type):
    monkeypatch.setattr(config, 'STORE_TYPE', store_type)
    monkeypatch.setattr(config, 'STORE_PATH', 'somewhere')
    assert config.get_store_config() == {'type': store_type, 'path': 'somewhere'}


def test_unknown_store_type(monkeypatch):
    monkeypatch.setattr(config, 'STORE_TYPE', 'dynamodb')
    with pytest.raises(ValueError):
        config.get_store_config()
