"""Chat-completion providers used for generation and judging.

`MockProvider` is deterministic and offline. `RemoteProvider` talks to any
chat-completion style HTTP endpoint configured through the environment.
"""

import asyncio
import hashlib
import json
import logging
import re
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Awaitable, Callable, Dict, Optional

import aiohttp

from pavecorpus import settings
from pavecorpus.errors import ConfigError, ProviderError
from pavecorpus.models.evaluation import JUDGE_DIMENSIONS

logger = logging.getLogger("pavecorpus.genkit.provider")

PURPOSE_GENERATE = "generate"
PURPOSE_JUDGE = "judge"

FACTS_HEADER = "Reference facts:"
FACTS_FOOTER = "End of reference facts."
LENGTH_HINT = re.compile(r"^Length: (short|medium|long)\s*$", re.MULTILINE)
_FACTS_BLOCK = re.compile(re.escape(FACTS_HEADER) + r"\n(.*?)\n" + re.escape(FACTS_FOOTER), re.DOTALL)

PROVIDER_NAMES = ("template", "mock", "remote")

# Elaboration the mock appends after the reference facts
CANNED_SENTENCES = (
    "The assessment is based on the visible surface only.",
    "Drainage conditions around the section should be confirmed on site.",
    "Traffic loading on this route will influence how quickly the condition changes.",
    "A follow-up inspection after the next winter is advisable.",
    "Photographs taken after the work will document the repair quality.",
    "Local agency standards may adjust the exact treatment choice.",
    "Nearby sections should be checked for similar deterioration.",
    "Recording the location precisely will help the maintenance crew.",
)
_CANNED_COUNT = {"short": 0, "medium": 2, "long": 4}


@dataclass(frozen=True, slots=True)
class ProviderRequest:
    system_prompt: str
    user_prompt: str
    temperature: float = 0.7
    max_tokens: int = 512
    purpose: str = PURPOSE_GENERATE

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be positive, got {self.max_tokens}")

    def payload(self, model: str) -> Dict[str, Any]:
        return {
            "model": model,
            "messages": [
                {"role": "system", "content": self.system_prompt},
                {"role": "user", "content": self.user_prompt},
            ],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }


@dataclass(frozen=True, slots=True)
class ProviderResponse:
    text: str
    finish_reason: str = "stop"
    latency: float = 0.0


def reference_block(facts: str) -> str:
    return f"{FACTS_HEADER}\n{facts}\n{FACTS_FOOTER}"


def extract_reference_facts(user_prompt: str) -> Optional[str]:
    match = _FACTS_BLOCK.search(user_prompt)
    return match.group(1) if match else None


class Provider(ABC):
    name = "base"

    @abstractmethod
    async def complete(self, request: ProviderRequest) -> ProviderResponse:
        """Send one request and return the reply"""

    async def close(self) -> None:
        pass


# =========================================================
# MOCK
# =========================================================

class MockProvider(Provider):
    """Deterministic offline provider.

    Generation replies open with the request's reference facts verbatim and add
    hash-selected canned sentences according to the length hint. Judge replies
    are JSON with every dimension set to `judge_score`.
    """

    name = "mock"

    def __init__(self, judge_score: float = 8.0, fixed_reply: Optional[str] = None, fail_times: int = 0):
        self.judge_score = judge_score
        self.fixed_reply = fixed_reply
        self.fail_times = fail_times
        self.calls = 0

    async def complete(self, request: ProviderRequest) -> ProviderResponse:
        self.calls += 1
        if self.calls <= self.fail_times:
            raise ProviderError(f"mock failure {self.calls} of {self.fail_times}")
        if self.fixed_reply is not None:
            return ProviderResponse(text=self.fixed_reply)
        if request.purpose == PURPOSE_JUDGE:
            return ProviderResponse(text=self._judge_reply())
        return ProviderResponse(text=self._generation_reply(request.user_prompt))

    def _judge_reply(self) -> str:
        body = {"score": self.judge_score}
        body.update({dim: self.judge_score for dim in JUDGE_DIMENSIONS})
        return json.dumps(body)

    def _generation_reply(self, user_prompt: str) -> str:
        facts = extract_reference_facts(user_prompt)
        if facts is None:
            facts = CANNED_SENTENCES[0]
        hint = LENGTH_HINT.search(user_prompt)
        count = _CANNED_COUNT[hint.group(1)] if hint else 2
        if count == 0:
            return facts
        start = int(hashlib.sha256(user_prompt.encode("utf-8")).hexdigest()[:8], 16)
        picked = [CANNED_SENTENCES[(start + i) % len(CANNED_SENTENCES)] for i in range(count)]
        return f"{facts}\n{' '.join(picked)}"


# =========================================================
# REMOTE
# =========================================================

class RemoteProvider(Provider):
    """Chat-completion endpoint over aiohttp with rate limiting and bounded concurrency"""

    name = "remote"

    def __init__(
        self,
        url: str,
        api_key: str,
        model: str = settings.PROVIDER_MODEL,
        timeout: float = settings.PROVIDER_TIMEOUT,
        max_in_flight: int = 4,
        min_interval: float = 0.0,
    ):
        self.url = url
        self.api_key = api_key
        self.model = model
        self.timeout = timeout
        self.min_interval = min_interval
        self._semaphore = asyncio.Semaphore(max_in_flight)
        self._rate_lock = asyncio.Lock()
        self._last_request = 0.0
        self._session: Optional[aiohttp.ClientSession] = None

    def _get_session(self) -> aiohttp.ClientSession:
        if self._session is None or self._session.closed:
            self._session = aiohttp.ClientSession(
                timeout=aiohttp.ClientTimeout(total=self.timeout),
                headers={
                    "Authorization": f"Bearer {self.api_key}",
                    "Content-Type": "application/json",
                },
            )
        return self._session

    async def _wait_for_rate_limit(self) -> None:
        async with self._rate_lock:
            loop = asyncio.get_running_loop()
            elapsed = loop.time() - self._last_request
            if elapsed < self.min_interval:
                sleep_time = self.min_interval - elapsed
                logger.debug(f"Rate limiting: sleeping for {sleep_time:.2f} seconds")
                await asyncio.sleep(sleep_time)
            self._last_request = loop.time()

    async def complete(self, request: ProviderRequest) -> ProviderResponse:
        async with self._semaphore:
            await self._wait_for_rate_limit()
            started = time.perf_counter()
            session = self._get_session()
            async with session.post(self.url, json=request.payload(self.model)) as response:
                if response.status >= 400:
                    body = await response.text()
                    raise ProviderError(f"{self.url} returned status {response.status}: {body[:200]}")
                data = await response.json()
        try:
            choice = data["choices"][0]
            text = (choice["message"]["content"] or "").strip()
            finish_reason = choice.get("finish_reason") or "stop"
        except (KeyError, IndexError, TypeError) as e:
            raise ProviderError(f"unexpected reply shape from {self.url}: {e}") from None
        if not text:
            raise ProviderError(f"empty reply from {self.url}")
        return ProviderResponse(text=text, finish_reason=finish_reason, latency=time.perf_counter() - started)

    async def close(self) -> None:
        if self._session is not None and not self._session.closed:
            await self._session.close()


# =========================================================
# RETRIES / FACTORY
# =========================================================

async def complete_with_retries(
    provider: Provider,
    request: ProviderRequest,
    attempts: int = 3,
    base_delay: float = 1.0,
    sleep: Callable[[float], Awaitable[None]] = asyncio.sleep,
) -> ProviderResponse:
    """Call the provider with exponential backoff (base_delay, 2x, 4x ...) between attempts"""
    last_error: Optional[BaseException] = None
    for attempt in range(1, attempts + 1):
        try:
            return await provider.complete(request)
        except (ProviderError, aiohttp.ClientError, asyncio.TimeoutError) as e:
            last_error = e
            logger.warning(f"{provider.name} provider attempt {attempt}/{attempts} failed: {e}")
            if attempt < attempts:
                await sleep(base_delay * 2 ** (attempt - 1))
    raise ProviderError(f"{provider.name} provider failed after {attempts} attempts: {last_error}", attempts=attempts)


def make_provider(name: str, model: Optional[str] = None, max_in_flight: int = 4) -> Optional[Provider]:
    """Provider for a manifest/CLI name; `template` means no provider at all"""
    if name == "template":
        return None
    if name == "mock":
        return MockProvider()
    if name == "remote":
        if not settings.PROVIDER_URL:
            raise ConfigError("remote provider needs PROVIDER_URL in the environment")
        if not settings.PROVIDER_API_KEY:
            raise ConfigError("remote provider needs PROVIDER_API_KEY in the environment")
        return RemoteProvider(
            url=settings.PROVIDER_URL,
            api_key=settings.PROVIDER_API_KEY,
            model=model or settings.PROVIDER_MODEL,
            max_in_flight=max_in_flight,
        )
    raise ConfigError(f"unknown provider '{name}', expected one of {', '.join(PROVIDER_NAMES)}")
