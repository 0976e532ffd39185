from .equiv import (
    EquivError, EquivNode, apply_equiv, chain, check_equiv, cond_cong, refl,
    rule, seq_cong, sym, while_cong,
)
from .expand import expand_derived
from .rules import (
    ACCEPTED, ACCEPTED_EVIDENCE, DERIVED_RULES, KERNEL_RULES, REJECTED,
    CheckContext, CheckReport, Derivation, Judgment, KernelError, Obligation,
    check, normalize_product, seq_compose,
)
from .serialize import (
    deriv_from_json, deriv_to_json, judgment_from_json, judgment_to_json,
)
from .validate import SoundnessReport, validate_product

__all__ = [
    "ACCEPTED", "ACCEPTED_EVIDENCE", "REJECTED",
    "KERNEL_RULES", "DERIVED_RULES",
    "CheckContext", "CheckReport", "Derivation", "Judgment", "KernelError",
    "Obligation", "check", "normalize_product", "seq_compose",
    "EquivError", "EquivNode", "apply_equiv", "check_equiv",
    "refl", "chain", "sym", "rule", "seq_cong", "cond_cong", "while_cong",
    "deriv_to_json", "deriv_from_json", "judgment_to_json",
    "judgment_from_json",
    "SoundnessReport", "validate_product",
]
