from __future__ import annotations

from typing import List

from pydantic import BaseModel, Field

# contrato de saída da CLI
EXIT_OK = 0
EXIT_FAULT = 1
EXIT_INCONCLUSIVE = 2
EXIT_VIOLATION = 3


class CommandResult(BaseModel):
    status: int = EXIT_OK
    text: str = ""
    artifacts: List[str] = Field(default_factory=list)
