"""
Base specification type that all kinds must inherit from
"""

from pydantic import BaseModel, ConfigDict


class BaseSpec(BaseModel):
    kind: str

    model_config = ConfigDict(frozen=True)
