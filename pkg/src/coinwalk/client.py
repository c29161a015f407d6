"""Thin client for the walk service.

The CLI talks to the service exclusively through this client.  By default
requests are dispatched in process to the bundled ASGI app, so no server needs
to be running; pass a base URL to target a remote instance instead.  Either
way the payloads go through the same pydantic request/response models.
"""

from __future__ import annotations

import asyncio
from typing import Any, Optional

import httpx

from .service.app import app

_TIMEOUT = httpx.Timeout(600.0)


class ServiceError(RuntimeError):
    """Non-2xx response from the service."""

    def __init__(self, status_code: int, detail: Any):
        super().__init__(f"service returned {status_code}: {detail}")
        self.status_code = status_code
        self.detail = detail


class ServiceClient:
    def __init__(self, server: Optional[str] = None):
        self.server = server.rstrip("/") if server else None

    def get(self, path: str) -> Any:
        return self._request("GET", path)

    def post(self, path: str, payload: dict) -> Any:
        return self._request("POST", path, payload)

    def _request(self, method: str, path: str, payload: Optional[dict] = None) -> Any:
        if self.server:
            with httpx.Client(base_url=self.server, timeout=_TIMEOUT) as client:
                resp = client.request(method, path, json=payload)
        else:
            resp = asyncio.run(self._asgi_request(method, path, payload))
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except Exception:
                detail = resp.text
            raise ServiceError(resp.status_code, detail)
        return resp.json()

    async def _asgi_request(self, method: str, path: str, payload: Optional[dict]) -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://coinwalk.internal", timeout=_TIMEOUT
        ) as client:
            return await client.request(method, path, json=payload)
