"""Contract verification: annotation parsing, level checks, VCs,
certificates, policies and PCC cost estimators."""

from .lang import (
    Annotation,
    ClassDecl,
    ExecutionError,
    LangError,
    eval_expr,
    parse_annotations,
    parse_contract,
    run_method,
)
from .vcgen import (
    VC,
    DischargeTranscript,
    VcError,
    discharge_bounded,
    gen_vcs,
    recheck_transcript,
)
from .pipeline import (
    Certificate,
    ContractPackage,
    Counterexample,
    PackageError,
    PccEstimate,
    ProofSection,
    SecurityProfile,
    TrustStore,
    build_proved_package,
    check_certificate,
    check_level2,
    check_level3,
    estimate_pcc_times,
    export_package,
    generate_signer,
    import_package,
    make_certificate,
    public_hex,
    sign_package,
    verify_extended,
    verify_standard,
)
from . import samples

__all__ = [
    "Annotation", "ClassDecl", "ExecutionError", "LangError", "eval_expr",
    "parse_annotations", "parse_contract", "run_method",
    "VC", "DischargeTranscript", "VcError", "discharge_bounded", "gen_vcs",
    "recheck_transcript",
    "Certificate", "ContractPackage", "Counterexample", "PackageError",
    "PccEstimate", "ProofSection", "SecurityProfile", "TrustStore",
    "build_proved_package", "check_certificate", "check_level2",
    "check_level3", "estimate_pcc_times", "export_package",
    "generate_signer", "import_package", "make_certificate", "public_hex",
    "sign_package", "verify_extended", "verify_standard", "samples",
]
