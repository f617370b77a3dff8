"""
自定义异常模块

定义了项目中使用的所有自定义异常类
"""

from typing import Dict, Optional, Sequence


class CtgAnalyzerError(Exception):
    """基础异常类

    所有项目特定异常的基类
    """
    pass


class ConfigValidationError(CtgAnalyzerError):
    """配置验证错误

    当配置文件验证失败时抛出
    """
    pass


class ScenarioValidationError(CtgAnalyzerError):
    """场景文件验证错误

    当合成场景 JSON 不符合结构要求时抛出
    """
    pass


# ----------------------------------------------------------------------
# 数据读取与预处理
# ----------------------------------------------------------------------

class MalformedRowError(CtgAnalyzerError):
    """CSV 行格式错误"""

    def __init__(self, line: Optional[int], detail: str = ""):
        self.line = line
        where = f"第 {line} 行" if line is not None else "未知行"
        message = f"CSV 格式错误（{where}）"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class LengthMismatchError(CtgAnalyzerError):
    """列长度不一致

    当 CSV 中各列的样本数量不同时抛出
    """

    def __init__(self, lengths: Dict[str, int]):
        self.lengths = dict(lengths)
        desc = ", ".join(f"{name}={count}" for name, count in self.lengths.items())
        super().__init__(f"各列长度不一致: {desc}")


class EmptyRecordError(CtgAnalyzerError):
    """记录为空

    当 CSV 文件不包含任何样本时抛出
    """
    pass


class TooShortError(CtgAnalyzerError):
    """记录时长不足

    分析至少需要 600 秒的信号
    """

    def __init__(self, duration_s: float, minimum_s: float = 600.0):
        self.duration_s = duration_s
        self.minimum_s = minimum_s
        super().__init__(
            f"记录时长 {duration_s:.1f} 秒，少于要求的 {minimum_s:.0f} 秒"
        )


class AllGapsError(CtgAnalyzerError):
    """信号全部缺失

    当没有任何有效样本可用于估计时抛出
    """
    pass


# ----------------------------------------------------------------------
# 分析
# ----------------------------------------------------------------------

class BaselineIndeterminableError(CtgAnalyzerError):
    """基线无法确定

    当基线不可确定却仍请求检测加速/减速时抛出
    """
    pass


class WrongFeatureSetError(CtgAnalyzerError):
    """特征集合错误

    汇总时五个特征必须各出现一次
    """

    def __init__(self, kinds: Sequence[str]):
        self.kinds = list(kinds)
        super().__init__(f"特征集合不完整或重复: {self.kinds}")


class UnknownFeatureError(CtgAnalyzerError):
    """未知特征名称"""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"未知特征: {name}")


# ----------------------------------------------------------------------
# 合成数据
# ----------------------------------------------------------------------

class OverlapError(CtgAnalyzerError):
    """场景事件重叠

    同类事件在时间上重叠时抛出
    """

    def __init__(self, kind: str, first: float, second: float):
        self.kind = kind
        self.first = first
        self.second = second
        super().__init__(
            f"{kind} 事件重叠: 起点 {first:.1f}s 与 {second:.1f}s"
        )


class OutOfRangeError(CtgAnalyzerError):
    """场景参数越界"""

    def __init__(self, field: str, value: float):
        self.field = field
        self.value = value
        super().__init__(f"参数越界: {field}={value}")


# ----------------------------------------------------------------------
# 智能体后端
# ----------------------------------------------------------------------

class BackendUnavailableError(CtgAnalyzerError):
    """后端不可用

    远程模型无法连接、拒绝请求或缺少 API 密钥时抛出
    """
    pass


class ReplyParseError(CtgAnalyzerError):
    """模型回复无法解析

    保留原始回复文本以便诊断
    """

    def __init__(self, raw: str, reason: str = "未找到唯一的分类标记"):
        self.raw = raw
        self.reason = reason
        super().__init__(f"回复解析失败（{reason}）: {raw[:200]!r}")


class AgentTimeoutError(CtgAnalyzerError):
    """单个智能体超时"""

    def __init__(self, feature: str, timeout_s: float):
        self.feature = feature
        self.timeout_s = timeout_s
        super().__init__(f"智能体 {feature} 超时（{timeout_s:.0f} 秒）")


class AgentFailedError(CtgAnalyzerError):
    """单个智能体失败

    任一特征智能体失败时整条流水线失败，诊断信息中包含特征名称
    """

    def __init__(self, feature: str, cause: Exception):
        self.feature = feature
        self.cause = cause
        super().__init__(f"智能体 {feature} 执行失败: {cause}")


# ----------------------------------------------------------------------
# 评估
# ----------------------------------------------------------------------

class MissingLabelError(CtgAnalyzerError):
    """记录缺少参考标签"""

    def __init__(self, record_id: str):
        self.record_id = record_id
        super().__init__(f"记录缺少标签: {record_id}")
