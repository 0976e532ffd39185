from .envs import get_env, list_envs
from .registry import CASES, get_case, list_cases

__all__ = ["get_env", "list_envs", "CASES", "get_case", "list_cases"]
