"""
Verification Check Suites
"""
from .bundles import BundleChecks
from .picard_three import BatyrevChecks
from .projective_spaces import ProjectiveSpaceChecks
from .properties import PropertyChecks
from .records import FAIL, PASS, VerificationRecord

__all__ = [
    'BundleChecks',
    'BatyrevChecks',
    'ProjectiveSpaceChecks',
    'PropertyChecks',
    'VerificationRecord',
    'PASS',
    'FAIL',
]
