import json
from typing import Any

import pydash
from pydantic import BaseModel as BaseModelOrig
from pydantic import ConfigDict
from pydash import camel_case


class BaseModel(BaseModelOrig):
    model_config = ConfigDict(
        populate_by_name=True,
        alias_generator=camel_case,
        arbitrary_types_allowed=True,
        ser_json_bytes="hex",
        val_json_bytes="hex",
    )

    def to_dict(
        self,
        *,
        by_alias: bool = True,
        exclude_unset: bool = False,
        extra: dict[str, Any] | None = None,
    ) -> dict:
        """JSON-compatible rendering, used for debug output and result headers."""
        result: dict = json.loads(self.model_dump_json(by_alias=by_alias, exclude_unset=exclude_unset))
        if extra is None:
            return result
        return pydash.merge(result, extra)


class FrozenModel(BaseModel):
    model_config = ConfigDict(
        populate_by_name=True,
        alias_generator=camel_case,
        arbitrary_types_allowed=True,
        ser_json_bytes="hex",
        val_json_bytes="hex",
        frozen=True,
    )
