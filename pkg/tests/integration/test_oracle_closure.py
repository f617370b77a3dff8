"""
合成数据闭环测试

无噪声时规则流水线必须逐特征复现场景真值；加入 2 bpm 噪声后整体类别一致率不低于 95%
"""

import pytest

from src.classify.aggregator import assess_evidence


pytestmark = [pytest.mark.integration, pytest.mark.slow]

SEEDS = range(200)


def _classes(overall):
    return {f.feature: f.feature_class for f in overall.features}


@pytest.mark.parametrize("seed", SEEDS)
def test_noise_free_closure(synth_corpus, seed):
    case = synth_corpus.case(seed)
    detected = assess_evidence(case.evidence)

    assert _classes(detected) == case.truth.classes, case.scenario
    assert detected.feature_class is case.truth.overall


def test_overall_agreement_with_noise(synth_corpus):
    agree = 0
    for seed in SEEDS:
        case = synth_corpus.case(seed, noise_bpm=2.0)
        agree += assess_evidence(case.evidence).feature_class is case.truth.overall
    assert agree / len(SEEDS) >= 0.95


def test_corpus_covers_every_class(synth_corpus):
    overall = {synth_corpus.case(seed).truth.overall for seed in SEEDS}
    assert len(overall) == 3
