"""
Configuration management for CPForge.

Supports both local (.env file) and CI/batch (environment variables) configuration.
Typed views (FoldConfig, EvalConfig, SessionConfig) are built from the
module-level settings; the CLI overrides single fields with dataclasses.replace.
"""

import os
from dataclasses import dataclass
from typing import List
from dotenv import load_dotenv

# Load .env file if it exists (for local development)
load_dotenv()


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ('1', 'true', 'yes', 'on')


# Evaluator configuration
# Options: 'full' or 'paper-faithful'
MODE = os.getenv('CPFORGE_MODE', 'full')
K_SENSITIVITY = float(os.getenv('CPFORGE_K', '5.0'))
# Options: 'geometry' or 'index'
CONSTRAINT_KEYS = os.getenv('CPFORGE_CONSTRAINT_KEYS', 'geometry')

# Folding configuration
LAYER_CAP = int(os.getenv('CPFORGE_LAYER_CAP', '64'))
AUTO_COMPLETE = _env_bool('CPFORGE_AUTO_COMPLETE', 'false')

# Session / reward configuration
ROUND_CAP = int(os.getenv('CPFORGE_ROUNDS', '10'))
B_SUCCESS = float(os.getenv('CPFORGE_B_SUCCESS', '0.05'))
P_FAIL = float(os.getenv('CPFORGE_P_FAIL', '0.10'))
C_STEP = float(os.getenv('CPFORGE_C_STEP', '0.01'))

# Batch configuration
JOBS = int(os.getenv('CPFORGE_JOBS', '1'))

# Transcript storage
# Options: 'jsonl' or 'sqlite'
STORE_TYPE = os.getenv('CPFORGE_STORE', 'jsonl')
STORE_PATH = os.getenv('CPFORGE_STORE_PATH', 'transcripts.jsonl')

LOG_LEVEL = os.getenv('CPFORGE_LOG_LEVEL', 'WARNING')

MODES = ('full', 'paper-faithful')
CONSTRAINT_KEY_MODES = ('geometry', 'index')


@dataclass(frozen=True)
class FoldConfig:
    """Settings for the folding engine."""
    layer_cap: int = 64
    auto_complete: bool = False


@dataclass(frozen=True)
class EvalConfig:
    """Settings for the scoring pipeline."""
    mode: str = 'full'
    k: float = 5.0
    constraint_keys: str = 'geometry'
    # S_partial lets the final-state dimension use the simplified fold too
    simplified_final_state: bool = False
    fold: FoldConfig = FoldConfig()


@dataclass(frozen=True)
class SessionConfig:
    """Reward constants and limits for interactive sessions."""
    b_success: float = 0.05
    p_fail: float = 0.10
    c_step: float = 0.01
    round_cap: int = 10
    eval: EvalConfig = EvalConfig()


def validate_config() -> bool:
    """
    Validate that every setting is within its documented range.

    Returns:
        True if configuration is valid

    Raises:
        ValueError listing every invalid setting
    """
    problems: List[str] = []

    if MODE not in MODES:
        problems.append(f"CPFORGE_MODE={MODE!r} (expected one of {', '.join(MODES)})")
    if CONSTRAINT_KEYS not in CONSTRAINT_KEY_MODES:
        problems.append(f"CPFORGE_CONSTRAINT_KEYS={CONSTRAINT_KEYS!r}")
    if K_SENSITIVITY <= 0:
        problems.append(f"CPFORGE_K={K_SENSITIVITY} (must be > 0)")
    if LAYER_CAP < 1:
        problems.append(f"CPFORGE_LAYER_CAP={LAYER_CAP} (must be >= 1)")
    if ROUND_CAP < 1:
        problems.append(f"CPFORGE_ROUNDS={ROUND_CAP} (must be >= 1)")
    if JOBS < 1:
        problems.append(f"CPFORGE_JOBS={JOBS} (must be >= 1)")
    for name, value in (('CPFORGE_B_SUCCESS', B_SUCCESS),
                        ('CPFORGE_P_FAIL', P_FAIL),
                        ('CPFORGE_C_STEP', C_STEP)):
        if value < 0:
            problems.append(f"{name}={value} (must be >= 0)")

    if problems:
        raise ValueError(
            f"Invalid configuration: {'; '.join(problems)}\n"
            f"Please fix your .env file or environment variables."
        )

    return True


def get_fold_config() -> FoldConfig:
    """Get folding configuration from the environment settings."""
    return FoldConfig(layer_cap=LAYER_CAP, auto_complete=AUTO_COMPLETE)


def get_eval_config() -> EvalConfig:
    """Get evaluator configuration from the environment settings."""
    return EvalConfig(
        mode=MODE,
        k=K_SENSITIVITY,
        constraint_keys=CONSTRAINT_KEYS,
        fold=get_fold_config()
    )


def get_session_config() -> SessionConfig:
    """Get session configuration from the environment settings."""
    return SessionConfig(
        b_success=B_SUCCESS,
        p_fail=P_FAIL,
        c_step=C_STEP,
        round_cap=ROUND_CAP,
        eval=get_eval_config()
    )


def get_store_config() -> dict:
    """Get transcript storage configuration based on STORE_TYPE."""
    if STORE_TYPE == 'jsonl':
        return {
            'type': 'jsonl',
            'path': STORE_PATH
        }
    elif STORE_TYPE == 'sqlite':
        return {
            'type': 'sqlite',
            'path': STORE_PATH
        }
    else:
        raise ValueError(f"Unknown CPFORGE_STORE: {STORE_TYPE}")
