"""Bearer-token identities.

The admin token comes from LAVA_ADMIN_TOKEN (or the app factory).  User
tokens resolve through an optional tokens.json in the data directory
({token: user_id}); without that file the deployment runs in
self-identified mode where the token itself is the user id.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from fastapi import HTTPException, Request

TOKENS_NAME = "tokens.json"
ANONYMOUS = ""


@dataclass(frozen=True)
class Identity:
    user_id: str
    is_admin: bool = False


class TokenAuth:
    def __init__(self, data_dir: str | None, admin_token: str | None):
        self.admin_token = admin_token
        self.token_map: dict[str, str] | None = None
        if data_dir:
            path = os.path.join(data_dir, TOKENS_NAME)
            if os.path.exists(path):
                with open(path, "r", encoding="utf-8") as fh:
                    self.token_map = {str(k): str(v) for k, v in json.load(fh).items()}

    def identify(self, token: str | None) -> Identity | None:
        if not token:
            return None
        if self.admin_token and token == self.admin_token:
            return Identity("admin", is_admin=True)
        if self.token_map is not None:
            user = self.token_map.get(token)
            return Identity(user) if user else None
        return Identity(token)


def bearer_token(request: Request) -> str | None:
    header = request.headers.get("Authorization", "")
    if header.lower().startswith("bearer "):
        return header[7:].strip()
    return None


def require_identity(request: Request) -> Identity:
    auth: TokenAuth = request.app.state.auth
    identity = auth.identify(bearer_token(request))
    if identity is None:
        raise HTTPException(status_code=401, detail="missing or unknown bearer token")
    return identity


def optional_identity(request: Request) -> Identity:
    """Public endpoints: honour a token when present, else act anonymously."""
    auth: TokenAuth = request.app.state.auth
    return auth.identify(bearer_token(request)) or Identity(ANONYMOUS)
