"""
远程模型后端

通过 JSON-over-HTTP 的 chat-completion 接口调用远程模型：
系统消息为组装好的提示词，用户消息为一行数据说明加走纸图 PNG。
"""

import asyncio
import logging
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import aiohttp

from src.agents.base_backend import AgentContext, BaseBackend
from src.agents.prompt_library import AGGREGATOR, PromptLibrary
from src.agents.reply_parser import parse_reply
from src.classify.aggregator import order_features
from src.classify.models import (
    AnalysisMode,
    FeatureAssessment,
    FeatureClass,
    FeatureKind,
    OverallAssessment,
)
from src.config.config_parser import AgentConfig
from src.exceptions import AgentTimeoutError, BackendUnavailableError, ReplyParseError
from src.utils.logger import get_logger

Content = Union[str, List[Dict[str, Any]]]


class RemoteBackend(BaseBackend):
    """远程 chat-completion 后端

    职责：
    1. 惰性创建并复用 HTTP 会话（asyncio 锁保护，可被多条记录并发使用）
    2. 按重试策略发送请求：传输错误、5xx 与超时重试，4xx 不重试
    3. 把回复解析为类别与说明
    """

    name = "remote"

    def __init__(self, config: Optional[AgentConfig] = None,
                 prompts: Optional[PromptLibrary] = None,
                 logger: Optional[logging.Logger] = None):
        """初始化远程后端

        Args:
            config: 智能体配置
            prompts: 提示词库（默认按 config.prompt_dir 创建）
            logger: 日志记录器
        """
        self.config = config or AgentConfig()
        self.prompts = prompts or PromptLibrary(self.config.prompt_dir)
        self.logger = logger or get_logger("remote")

        self._session: Optional[aiohttp.ClientSession] = None
        self._lock = asyncio.Lock()

    @property
    def endpoint(self) -> str:
        return self.config.base_url.rstrip("/") + "/chat/completions"

    def _api_key(self) -> str:
        key = os.environ.get(self.config.api_key_env, "").strip()
        if not key:
            raise BackendUnavailableError(
                f"环境变量 {self.config.api_key_env} 未设置，无法访问远程模型"
            )
        return key

    async def _get_session(self) -> aiohttp.ClientSession:
        async with self._lock:
            if self._session is None or self._session.closed:
                headers = {"Authorization": f"Bearer {self._api_key()}"}
                timeout = aiohttp.ClientTimeout(total=self.config.timeout_s)
                self._session = aiohttp.ClientSession(headers=headers, timeout=timeout)
                self.logger.info(f"已创建远程模型会话: {self.endpoint} (模型 {self.config.model})")
            return self._session

    async def close(self) -> None:
        async with self._lock:
            if self._session is not None and not self._session.closed:
                await self._session.close()
                self.logger.debug("远程模型会话已关闭")
            self._session = None

    async def prepare(self, context: AgentContext) -> None:
        if self.config.attach_image:
            await context.ensure_image()

    # ------------------------------------------------------------------
    # 传输
    # ------------------------------------------------------------------

    async def _post(self, payload: Dict[str, Any]) -> Tuple[int, Any]:
        """发送一次请求，返回 (HTTP 状态码, 响应 JSON 或文本)"""
        session = await self._get_session()
        async with session.post(self.endpoint, json=payload) as response:
            if response.status >= 400:
                return response.status, await response.text()
            return response.status, await response.json(content_type=None)

    async def complete(self, system_prompt: str, user_content: Content, agent: str) -> str:
        """发送一次对话请求并返回回复文本

        Args:
            system_prompt: 系统提示词
            user_content: 用户消息（字符串或多段内容）
            agent: 智能体名称（用于日志与异常）

        Returns:
            str: choices[0].message.content

        Raises:
            BackendUnavailableError: 4xx、缺少密钥，或重试后仍为传输错误 / 5xx
            AgentTimeoutError: 重试后仍超时
            ReplyParseError: 响应结构不符合 chat-completion 格式
        """
        payload = {
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [
                {"role": "system", "content": system_prompt},
                {"role": "user", "content": user_content},
            ],
        }
        attempts = self.config.max_retries + 1
        last_error: Optional[BaseException] = None

        for attempt in range(1, attempts + 1):
            try:
                status, body = await self._post(payload)
            except asyncio.TimeoutError as e:
                last_error = e
                self.logger.warning(f"⚠️ {agent} 请求超时（第 {attempt}/{attempts} 次）")
                continue
            except aiohttp.ClientError as e:
                last_error = e
                self.logger.warning(f"⚠️ {agent} 传输错误（第 {attempt}/{attempts} 次）: {e}")
                continue

            if status >= 500:
                last_error = BackendUnavailableError(f"远程模型返回 HTTP {status}: {str(body)[:200]}")
                self.logger.warning(f"⚠️ {agent} 服务端错误 HTTP {status}（第 {attempt}/{attempts} 次）")
                continue
            if status >= 400:
                raise BackendUnavailableError(f"远程模型拒绝请求 HTTP {status}: {str(body)[:200]}")

            try:
                return str(body["choices"][0]["message"]["content"])
            except (KeyError, IndexError, TypeError):
                raise ReplyParseError(str(body), "响应缺少 choices[0].message.content") from None

        if isinstance(last_error, asyncio.TimeoutError):
            raise AgentTimeoutError(agent, self.config.timeout_s)
        if isinstance(last_error, BackendUnavailableError):
            raise last_error
        raise BackendUnavailableError(f"远程模型不可达: {last_error}") from last_error

    def _user_content(self, context: AgentContext, text: str, with_image: bool) -> Content:
        if not (with_image and self.config.attach_image and context.image_url):
            return text
        return [
            {"type": "text", "text": text},
            {"type": "image_url", "image_url": {"url": context.image_url}},
        ]

    @staticmethod
    def _explanation(text: str, subject: str, feature_class: FeatureClass) -> str:
        return text or f"{subject} classified as {feature_class.value} by the remote model."

    # ------------------------------------------------------------------
    # 智能体
    # ------------------------------------------------------------------

    async def assess_feature(self, context: AgentContext, kind: FeatureKind) -> FeatureAssessment:
        reply = await self.complete(
            self.prompts.render(kind),
            self._user_content(context, context.description, with_image=True),
            kind.value,
        )
        feature_class, explanation = parse_reply(reply)
        self.logger.debug(f"{context.record_id} {kind.value}: {feature_class.value}")
        return FeatureAssessment(
            feature=kind,
            feature_class=feature_class,
            explanation=self._explanation(explanation, kind.title, feature_class),
            evidence={"reply": reply},
        )

    async def aggregate(self, context: AgentContext,
                        features: Sequence[FeatureAssessment]) -> OverallAssessment:
        ordered = list(order_features(features).values())
        lines = [context.description, "", "Feature assessments:"]
        lines.extend(
            f"- {f.feature.title}: {f.feature_class.value.capitalize()}. {f.explanation}"
            for f in ordered
        )
        reply = await self.complete(
            self.prompts.render(AGGREGATOR),
            self._user_content(context, "\n".join(lines), with_image=False),
            AGGREGATOR,
        )
        feature_class, explanation = parse_reply(reply)
        return OverallAssessment(
            record_id=context.record_id,
            feature_class=feature_class,
            explanation=self._explanation(explanation, "Tracing", feature_class),
            features=tuple(ordered),
            mode=AnalysisMode.MULTI,
        )

    async def direct(self, context: AgentContext) -> OverallAssessment:
        reply = await self.complete(
            self.prompts.render(AGGREGATOR, AnalysisMode.DIRECT),
            self._user_content(context, context.description, with_image=True),
            "direct",
        )
        feature_class, explanation = parse_reply(reply)
        return OverallAssessment(
            record_id=context.record_id,
            feature_class=feature_class,
            explanation=self._explanation(explanation, "Tracing", feature_class),
            features=(),
            mode=AnalysisMode.DIRECT,
            features_omitted=True,
        )
