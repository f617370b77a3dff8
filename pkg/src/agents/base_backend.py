"""
智能体后端抽象接口

定义规则引擎后端与远程模型后端共同的接口，以及一次分析共享的上下文
"""

import asyncio
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional, Sequence

from src.analysis.pipeline import FeatureEvidence, extract_evidence
from src.classify.models import FeatureAssessment, FeatureKind, OverallAssessment
from src.config.config_parser import AnalyzerConfig
from src.record.ctg_record import CtgRecord
from src.render.raster import png_data_url, render_png


@dataclass
class AgentContext:
    """一条记录在各智能体之间共享的输入

    evidence 与 image_url 由后端的 prepare() 按需填充，每条记录只计算一次。
    """
    record: CtgRecord
    config: AnalyzerConfig = field(default_factory=AnalyzerConfig)
    evidence: Optional[FeatureEvidence] = None
    image_url: Optional[str] = field(default=None, repr=False)

    @property
    def record_id(self) -> str:
        return self.record.record_id

    @property
    def description(self) -> str:
        """随图片发送的一行数据说明"""
        render = self.config.render
        return (
            f"CTG record {self.record_id}: {self.record.duration_s / 60.0:.1f} minutes sampled at "
            f"{self.record.fs:g} Hz; upper panel FHR in bpm "
            f"({render.fhr_axis[0]:g}-{render.fhr_axis[1]:g}), lower panel uterine contractions "
            f"({render.uc_axis[0]:g}-{render.uc_axis[1]:g}); paper speed "
            f"{render.paper_speed_cm_per_min:g} cm/min, gridlines every minute."
        )

    async def ensure_evidence(self) -> FeatureEvidence:
        """在线程中提取特征证据（已存在则直接返回）

        Raises:
            TooShortError: 记录过短
            AllGapsError: 胎心率全部缺失
        """
        if self.evidence is None:
            self.evidence = await asyncio.to_thread(extract_evidence, self.record, self.config)
        return self.evidence

    async def ensure_image(self) -> str:
        """在线程中绘制 PNG 并转为 data URL（已存在则直接返回）"""
        if self.image_url is None:
            png = await asyncio.to_thread(render_png, self.record, self.config.render)
            self.image_url = png_data_url(png)
        return self.image_url


class BaseBackend(ABC):
    """智能体后端抽象接口

    所有后端实现必须继承此类，保证接口一致性

    实现类：
    - RuleBackend: 本地规则引擎
    - RemoteBackend: 远程 chat-completion 模型
    """

    name: str = "base"

    async def prepare(self, context: AgentContext) -> None:
        """在特征智能体并发执行前准备共享输入（默认不做任何事）"""
        return None

    @abstractmethod
    async def assess_feature(self, context: AgentContext, kind: FeatureKind) -> FeatureAssessment:
        """判读单个特征

        Args:
            context: 记录上下文
            kind: 特征种类

        Returns:
            FeatureAssessment: 特征判读

        Raises:
            BackendUnavailableError: 后端不可用
            ReplyParseError: 回复无法解析
        """
        pass

    @abstractmethod
    async def aggregate(self, context: AgentContext,
                        features: Sequence[FeatureAssessment]) -> OverallAssessment:
        """在五个特征判读全部完成后给出整体判读

        Args:
            context: 记录上下文
            features: 按固定顺序排列的五个特征判读

        Returns:
            OverallAssessment: 整体判读
        """
        pass

    @abstractmethod
    async def direct(self, context: AgentContext) -> OverallAssessment:
        """单次提示模式：一次请求直接给出整体判读

        Returns:
            OverallAssessment: features 为空且 features_omitted 为 True
        """
        pass

    async def close(self) -> None:
        """释放后端资源"""
        return None

    async def __aenter__(self) -> "BaseBackend":
        return self

    async def __aexit__(self, exc_type, exc, tb) -> None:
        await self.close()
