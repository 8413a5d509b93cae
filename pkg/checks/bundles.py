"""
Picard-two checks: the P^1-bundle over P^{d-1}, the P^{d-2}-bundle over P^2,
and the ch_4 obstruction for projective-space bundles with d >= 5.
"""
import logging
from itertools import combinations_with_replacement
from typing import List

from catalog import BundleParams, Example41Params, build_family, grid_parameters, bundle_test_cones, four_term_test_cone
from chern import NEF_NOT_POSITIVE, POSITIVE, chern_value, classify, power_sum
from fan import is_fano
from intersect import intersect_against_subvariety

from .records import VerificationRecord, compare, crashed, named_relations

logger = logging.getLogger(__name__)

P1_BUNDLE = "P^1-bundle over P^{d-1}: ch_k positive for odd k, nef not positive for even k"
P2_BASE = "P^{d-2}-bundle over P^2: top intersections and ch_d-positivity"
CH4 = "Picard-two d >= 5: not ch_4-positive"
CH2 = "Picard two: not ch_2-positive"


class BundleChecks:
    """Checks over Picard-two fans with twists up to max_twist."""

    def __init__(self, max_twist: int = 3):
        self.max_twist = max_twist

    def run(self) -> List[VerificationRecord]:
        records = []
        for name, suite in (("p1_bundle", self._p1_bundle), ("p2_base", self._p2_base),
                            ("ch4", self._ch4), ("ch2", self._ch2)):
            try:
                records.extend(suite())
            except Exception as e:
                records.append(crashed(f"bundle.{name}", name, e))
        logger.info(f"Picard-two bundles: {len(records)} records")
        return records

    def _p1_bundle(self) -> List[VerificationRecord]:
        records = []
        for d in range(4, 8):
            for a in range(1, self.max_twist + 1):
                fan = build_family("kleinschmidt", BundleParams(d, 2, (a,)))
                for k in range(3, d):
                    tag = f"p1_bundle.d{d}.a{a}.k{k}"
                    v1, v2 = bundle_test_cones(fan, d, k)
                    records.append(compare(f"{tag}.E1^k.V1", P1_BUNDLE, (-a) ** (k - 1),
                                           intersect_against_subvariety(fan, ["y1"] * k, v1)))
                    records.append(compare(f"{tag}.E2^k.V1", P1_BUNDLE, a ** (k - 1),
                                           intersect_against_subvariety(fan, ["y2"] * k, v1)))
                    records.append(compare(f"{tag}.E1^k.V2", P1_BUNDLE, (-a) ** k,
                                           intersect_against_subvariety(fan, ["y1"] * k, v2)))
                    records.append(compare(f"{tag}.D^k.V2", P1_BUNDLE, [1] * d,
                                           [intersect_against_subvariety(fan, [f"x{i}"] * k, v2)
                                            for i in range(1, d + 1)]))
                    if d - a ** k < 1:
                        continue
                    # closed forms are for the power sum k! ch_k
                    odd = k % 2 == 1
                    records.append(compare(f"{tag}.ch_k.V1", P1_BUNDLE, 2 * a ** (k - 1) if odd else 0,
                                           power_sum(fan, k, v1)))
                    records.append(compare(f"{tag}.ch_k.V2", P1_BUNDLE, d - a ** k if odd else d + a ** k,
                                           power_sum(fan, k, v2)))
                    records.append(compare(f"{tag}.classification", P1_BUNDLE,
                                           POSITIVE if odd else NEF_NOT_POSITIVE, classify(fan, k).classification))
                    records.append(compare(f"{tag}.fano", P1_BUNDLE, True, is_fano(fan)))
        return records

    def _p2_base(self) -> List[VerificationRecord]:
        records = []
        for d in range(3, 7):
            for a in range(1, 4):
                tag = f"p2_base.d{d}.a{a}"
                fan = build_family("example41", Example41Params(d, a))
                records.append(compare(f"{tag}.picard_number", P2_BASE, 2, fan.picard_number))
                records.append(compare(f"{tag}.D^d", P2_BASE, [0, 0, 0],
                                       [intersect_against_subvariety(fan, [f"x{i}"] * d, []) for i in (1, 2, 3)]))
                e1 = a * a * (d - 2) + a * a * (d - 2) * (d - 3) // 2
                records.append(compare(f"{tag}.E1^d", P2_BASE, e1,
                                       intersect_against_subvariety(fan, ["y1"] * d, [])))
                records.append(compare(f"{tag}.Ej^d", P2_BASE, [a * a] * (d - 2),
                                       [intersect_against_subvariety(fan, [f"y{j}"] * d, []) for j in range(2, d)]))
                records.append(compare(f"{tag}.ch_d", P2_BASE, POSITIVE, classify(fan, d).classification))
                records.append(compare(f"{tag}.fano", P2_BASE, a <= 2, is_fano(fan)))

                # D1 = D2 = D3 and a D3 + E1 = E2 = ... = E_{d-1}
                last = f"y{d - 1}"
                expected = [{"x1": 1, "x3": -1}, {"x2": 1, "x3": -1}, {"y1": 1, "x3": a, last: -1}]
                expected += [{f"y{j}": 1, last: -1} for j in range(2, d - 1)]
                basis = ["x1", "x2"] + [f"y{j}" for j in range(1, d - 1)]
                records.append(compare(f"{tag}.picard_relations", P2_BASE, expected, named_relations(fan, basis)))
        return records

    def _ch4(self) -> List[VerificationRecord]:
        records = []
        for d in range(5, 8):
            for s in range(3, min(d, 5) + 1):
                for twists in combinations_with_replacement(range(self.max_twist, -1, -1), s - 1):
                    params = BundleParams(d, s, tuple(twists))
                    records.extend(self._ch4_instance(params))
        return records

    def _ch4_instance(self, params: BundleParams) -> List[VerificationRecord]:
        d, s, a = params.d, params.s, params.twists
        tag = f"ch4.d{d}.s{s}.a{''.join(map(str, a))}"
        fan = build_family("kleinschmidt", params)
        tau = four_term_test_cone(fan, params)

        def e4(j: int):
            return intersect_against_subvariety(fan, [f"y{j}"] * 4, tau)

        records = [compare(f"{tag}.D^4", CH4, [0] * (d - s + 2),
                           [intersect_against_subvariety(fan, [f"x{i}"] * 4, tau) for i in range(1, d - s + 3)])]
        if s == 3:
            a1, a2 = a
            expected = -(a1 - a2) ** 3 + a1 * a1 * (a2 - 2 * a1) - a1 * (a1 - a2) ** 2
            records.append(compare(f"{tag}.E1^4", CH4, expected, e4(1)))
            records.append(compare(f"{tag}.E2^4", CH4, -a2 ** 3, e4(2)))
            records.append(compare(f"{tag}.E3^4", CH4, a2 ** 3, e4(3)))
        else:
            records.append(compare(f"{tag}.four_term_sum", CH4, 0, sum(e4(j) for j in range(s - 3, s + 1))))
            tail = a[s - 4:s - 1]
            for i in range(1, s - 3):
                expected = -a[i - 1] + sum(aj - a[i - 1] for aj in tail)
                records.append(compare(f"{tag}.E{i}^4", CH4, expected, e4(i)))
        value = chern_value(fan, 4, tau)
        records.append(compare(f"{tag}.ch4_nonpositive", CH4, True, value <= 0, f"value {value}"))
        records.append(compare(f"{tag}.not_positive", CH4, False, classify(fan, 4).is_positive))
        return records

    def _ch2(self) -> List[VerificationRecord]:
        records = []
        bounds = {"max_d": 6, "max_s": 4, "max_twist": min(self.max_twist, 2)}
        for params in grid_parameters("kleinschmidt", bounds):
            fan = build_family("kleinschmidt", params)
            tag = f"ch2.d{params.d}.s{params.s}.a{''.join(map(str, params.twists))}"
            records.append(compare(tag, CH2, False, classify(fan, 2).is_positive))
        return records
